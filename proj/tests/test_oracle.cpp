#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "dolrm/oracle.hpp"
#include "support.hpp"

using namespace dolrm;
using dolrm::testing::kGreedy;
using dolrm::testing::kReverse;
using dolrm::testing::two_type;

TEST_CASE("expected_ratio of the toy policies") {
  CHECK(std::abs(expected_ratio(two_type(0.8), kGreedy) - 2.5) <= 1e-12);
  CHECK(std::abs(expected_ratio(two_type(0.8), kReverse) - 2.6) <= 1e-12);
  CHECK(std::abs(expected_ratio(two_type(0.2), kGreedy) - 3.0 / 1.8) <= 1e-12);
  CHECK(std::abs(expected_ratio(two_type(0.2), kReverse) - 1.4) <= 1e-12);
}

TEST_CASE("best_response") {
  const auto spec = two_type(0.8);
  CHECK(best_response(spec, 0.5) == kGreedy);
  CHECK(best_response(spec, 2.5) == kReverse);
  CHECK(best_response(spec, 2.0) == kGreedy);  // tie goes to the lower index
  const EnvironmentSpec singles{{0.5, 0.5}, {{{1.0, 2.0}}, {{4.0, 1.0}}}};
  CHECK(best_response(singles, 1.7) == PolicyMap{{0, 0}});
}

TEST_CASE("dinkelbach on the two-type environments") {
  const auto p08 = dinkelbach_theta_star(two_type(0.8));
  REQUIRE(p08.trace.size() == 4);
  CHECK(p08.trace[0] == 0.5);
  CHECK(p08.trace[1] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(p08.trace[2] == doctest::Approx(2.6).epsilon(1e-15));
  CHECK(p08.trace[3] == doctest::Approx(2.6).epsilon(1e-15));
  CHECK(p08.theta_star == doctest::Approx(2.6).epsilon(1e-15));
  CHECK(p08.policy == kReverse);
  CHECK(p08.iterations == 3);

  const auto p02 = dinkelbach_theta_star(two_type(0.2));
  CHECK(std::abs(p02.theta_star - 5.0 / 3.0) <= 1e-12);
  CHECK(p02.policy == kGreedy);

  CHECK_THROWS_AS(dinkelbach_theta_star(two_type(0.8), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(dinkelbach_theta_star(two_type(0.8), 1e-12, 1), std::runtime_error);
}

TEST_CASE("seven-type optimum") {
  const auto spec = testing::seven_type();
  CHECK(count_policy_maps(spec) == 8);
  const auto d = dinkelbach_theta_star(spec);
  const auto b = brute_force_theta_star(spec);
  // 97/46 from exact rational enumeration of the eight maps.
  CHECK(std::abs(d.theta_star - 97.0 / 46.0) <= 1e-12);
  CHECK(std::abs(d.theta_star - b.theta_star) <= 1e-9);
  CHECK(b.policy == PolicyMap{{0, 1, 0, 0, 0, 0, 0}});
  CHECK(b.iterations == 8);
}

TEST_CASE("brute_force_theta_star") {
  CHECK(brute_force_theta_star(two_type(0.8)).theta_star == doctest::Approx(2.6).epsilon(1e-15));
  const EnvironmentSpec single{{1.0}, {{{7.0, 4.0}}}};
  CHECK(brute_force_theta_star(single).theta_star == 7.0 / 4.0);
  CHECK(std::abs(brute_force_theta_star(two_type(0.2)).theta_star - 5.0 / 3.0) <= 1e-12);

  EnvironmentSpec wide{std::vector<double>(20, 0.05), {}};
  for (int s = 0; s < 20; ++s) wide.arms.push_back({{1.0, 1.0}, {2.0, 1.0}});
  CHECK(count_policy_maps(wide) == kMaxEnumeratedMaps + 1);
  CHECK_THROWS_AS(brute_force_theta_star(wide), std::length_error);
  // Dinkelbach has no enumeration guard.
  CHECK(dinkelbach_theta_star(wide).theta_star == doctest::Approx(2.0));
}

TEST_CASE("for_each_policy_map visits every map once in lexicographic order") {
  const EnvironmentSpec spec{{0.5, 0.25, 0.25}, {{{1, 1}, {1, 1}}, {{1, 1}}, {{1, 1}, {1, 1}, {1, 1}}}};
  std::vector<PolicyMap> seen;
  for_each_policy_map(spec, [&](const PolicyMap& m) { seen.push_back(m); });
  REQUIRE(seen.size() == 6);
  CHECK(seen.front() == PolicyMap{{0, 0, 0}});
  CHECK(seen[1] == PolicyMap{{0, 0, 1}});
  CHECK(seen.back() == PolicyMap{{1, 0, 2}});
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1].action < seen[i].action);
}

TEST_CASE("dinkelbach agrees with enumeration on random specs") {
  std::mt19937_64 rng(2025);
  for (int trial = 0; trial < 200; ++trial) {
    const auto spec = testing::random_spec(rng);
    validate_env(spec);
    const auto d = dinkelbach_theta_star(spec);
    const auto b = brute_force_theta_star(spec);
    CHECK(std::abs(d.theta_star - b.theta_star) <= 1e-9);
    CHECK(std::abs(expected_ratio(spec, d.policy) - expected_ratio(spec, b.policy)) <= 1e-9);
    // Non-decreasing iterates, at most one improvement per distinct map.
    for (std::size_t k = 1; k < d.trace.size(); ++k) CHECK(d.trace[k] >= d.trace[k - 1] - 1e-15);
    CHECK(d.iterations <= count_policy_maps(spec) + 1);
    const auto bounds = derived_bounds(spec);
    CHECK(d.theta_star >= bounds.theta_min);
    CHECK(d.theta_star <= bounds.theta_max);
    CHECK(std::abs(expected_ratio(spec, d.policy) - d.theta_star) <= 1e-12);
    for_each_policy_map(spec, [&](const PolicyMap& m) {
      CHECK(b.theta_star >= expected_ratio(spec, m));
    });
  }
}

TEST_CASE("reward scaling scales theta* and keeps the optimal map") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> any_scale(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto spec = testing::random_spec(rng);
    const auto base = brute_force_theta_star(spec);
    // Powers of two scale exactly, so the enumeration order is preserved bit for bit.
    for (const double kappa : {0.25, 2.0, 8.0}) {
      auto scaled = spec;
      for (auto& type_arms : scaled.arms) {
        for (auto& m : type_arms) m.reward *= kappa;
      }
      const auto s = brute_force_theta_star(scaled);
      CHECK(s.theta_star == kappa * base.theta_star);
      CHECK(s.policy == base.policy);
    }
    const double kappa = any_scale(rng);
    auto scaled = spec;
    for (auto& type_arms : scaled.arms) {
      for (auto& m : type_arms) m.reward *= kappa;
    }
    const auto s = dinkelbach_theta_star(scaled);
    CHECK(s.theta_star == doctest::Approx(kappa * base.theta_star).epsilon(1e-12));
    CHECK(expected_ratio(spec, s.policy) == doctest::Approx(base.theta_star).epsilon(1e-12));
  }
}

TEST_CASE("compute_gap") {
  const auto under = compute_gap(2.6, 250.0, 100.0, 100);
  CHECK(under.gap == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(under.regret == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(under.regret == 100.0 * under.gap);
  const auto exact = compute_gap(2.5, 250.0, 100.0, 100);
  CHECK(exact.gap == 0.0);
  CHECK(exact.regret == 0.0);
  CHECK(compute_gap(2.6, 270.0, 100.0, 100).gap == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(compute_gap(2.6, 1.0, 0.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(compute_gap(2.6, 1.0, 1.0, 0), std::invalid_argument);
}
