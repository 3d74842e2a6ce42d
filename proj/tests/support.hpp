#pragma once

#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <random>
#include <vector>

#include "dolrm/env.hpp"
#include "dolrm/policy.hpp"

namespace dolrm::testing {

/// Arrivals {p, 1 - p}, with 1 - p rounded to the nearest short decimal so
/// that two_type(0.8) carries exactly 0.2.
inline EnvironmentSpec two_type(double p, double sigma = 1.0) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", 1.0 - p);
  EnvironmentSpec spec{{p, std::strtod(buf, nullptr)}, {{{3.0, 1.0}}, {{3.0, 2.0}, {1.0, 1.0}}}};
  spec.noise_sigma = sigma;
  return spec;
}

inline EnvironmentSpec seven_type(double sigma = 1.0) {
  EnvironmentSpec spec{{0.3, 0.1, 0.2, 0.1, 0.05, 0.1, 0.15},
                       {{{3.0, 1.0}},
                        {{3.0, 2.0}, {1.0, 1.0}},
                        {{2.0, 1.0}},
                        {{2.5, 1.5}},
                        {{2.0, 1.0}, {1.0, 1.0}},
                        {{3.0, 2.0}, {1.5, 1.5}},
                        {{2.5, 1.0}}}};
  spec.noise_sigma = sigma;
  return spec;
}

inline const PolicyMap kGreedy{{0, 0}};
inline const PolicyMap kReverse{{0, 1}};

/// Valid spec with 1..max_types types, 1..max_arms arms, means in [lo, hi].
inline EnvironmentSpec random_spec(std::mt19937_64& rng, std::size_t max_types = 5,
                                   std::size_t max_arms = 4, double lo = 0.5, double hi = 5.0) {
  std::uniform_int_distribution<std::size_t> types(1, max_types);
  std::uniform_int_distribution<std::size_t> arms(1, max_arms);
  std::uniform_real_distribution<double> mean(lo, hi);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  EnvironmentSpec spec;
  const auto n = types(rng);
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    spec.arrival_probs.push_back(weight(rng));
    total += spec.arrival_probs.back();
    std::vector<ArmMeans> type_arms(arms(rng));
    for (auto& m : type_arms) m = ArmMeans{mean(rng), mean(rng)};
    spec.arms.push_back(std::move(type_arms));
  }
  for (auto& p : spec.arrival_probs) p /= total;
  // Absorb rounding so the probabilities sum to one within 1e-12.
  double rest = 1.0;
  for (std::size_t s = 0; s + 1 < n; ++s) rest -= spec.arrival_probs[s];
  spec.arrival_probs.back() = rest;
  return spec;
}

inline std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = first + i;
  return seeds;
}

}  // namespace dolrm::testing
