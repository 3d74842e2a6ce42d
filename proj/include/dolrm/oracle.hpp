#pragma once

#include <cstddef>
#include <vector>

#include "dolrm/env.hpp"
#include "dolrm/policy.hpp"

namespace dolrm {

struct OracleResult {
  double theta_star = 0.0;
  PolicyMap policy;
  /// Number of best-response evaluations (Dinkelbach) or maps enumerated.
  std::size_t iterations = 0;
  /// Dinkelbach iterates theta_0, theta_1, ...; empty for enumeration.
  std::vector<double> trace;
};

struct GapReport {
  double gap = 0.0;
  double regret = 0.0;
};

/// (sum_s p_s r_{s,a(s)}) / (sum_s p_s c_{s,a(s)}) on the true means.
double expected_ratio(const EnvironmentSpec& spec, const PolicyMap& map);

/// Per-type argmax of r - theta c, lowest index on ties.
PolicyMap best_response(const EnvironmentSpec& spec, double theta);

/// Fixed-point iteration theta <- expected_ratio(best_response(theta)) from
/// theta_min. Throws std::runtime_error if it has not settled in max_iter steps.
OracleResult dinkelbach_theta_star(const EnvironmentSpec& spec, double tol = 1e-12,
                                   std::size_t max_iter = 1000);

inline constexpr std::size_t kMaxEnumeratedMaps = 1'000'000;

/// Number of deterministic maps, saturating at kMaxEnumeratedMaps + 1.
std::size_t count_policy_maps(const EnvironmentSpec& spec);

/// Calls visit(map) for every deterministic map in lexicographic order.
template <typename Visit>
void for_each_policy_map(const EnvironmentSpec& spec, Visit&& visit) {
  PolicyMap map{std::vector<std::size_t>(spec.num_types(), 0)};
  while (true) {
    visit(static_cast<const PolicyMap&>(map));
    std::size_t s = spec.num_types();
    while (s > 0) {
      --s;
      if (++map.action[s] < spec.num_arms(s)) break;
      map.action[s] = 0;
      if (s == 0) return;
    }
    if (spec.num_types() == 0) return;
  }
}

/// Exhaustive maximum of expected_ratio over all deterministic maps; the
/// first map in lexicographic order wins ties. Throws std::length_error
/// beyond kMaxEnumeratedMaps.
OracleResult brute_force_theta_star(const EnvironmentSpec& spec);

/// |theta_star - cum_reward / cum_cost| and T times that.
GapReport compute_gap(double theta_star, double cum_reward, double cum_cost, std::size_t horizon);

}  // namespace dolrm
