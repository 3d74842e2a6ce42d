#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dolrm/rng.hpp"

namespace dolrm {

/// True mean reward and cost of one decision for one task type.
struct ArmMeans {
  double reward = 0.0;
  double cost = 1.0;

  bool operator==(const ArmMeans&) const = default;
};

/// How Gaussian noise on costs is kept above the cost floor.
enum class CostNoise {
  /// Noise restricted to |g| <= (c - cost_floor) / sigma; keeps E[C] = c.
  kTruncated,
  /// cost = max(cost_floor, c + sigma * g); biases E[C] upward.
  kClip,
};

std::string to_string(CostNoise mode);
CostNoise cost_noise_from_string(const std::string& name);

struct EnvironmentSpec {
  std::vector<double> arrival_probs;
  std::vector<std::vector<ArmMeans>> arms;
  double noise_sigma = 1.0;
  double cost_floor = 1e-6;
  CostNoise cost_noise = CostNoise::kTruncated;

  std::size_t num_types() const { return arrival_probs.size(); }
  std::size_t num_arms(std::size_t type) const { return arms.at(type).size(); }

  bool operator==(const EnvironmentSpec&) const = default;
};

struct DerivedBounds {
  double r_min = 0.0;
  double r_max = 0.0;
  double c_min = 1.0;
  double c_max = 1.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
};

struct Feedback {
  double reward = 0.0;
  double cost = 1.0;
};

/// Throws std::invalid_argument naming the offending field and index.
const EnvironmentSpec& validate_env(const EnvironmentSpec& spec);

DerivedBounds derived_bounds(const EnvironmentSpec& spec);

/// Inverse-CDF arrival sampling: the first type whose cumulative
/// probability strictly exceeds `u`. Falls back to the last type with
/// positive probability when rounding leaves the total just below `u`.
std::size_t sample_task(const EnvironmentSpec& spec, double u);
std::size_t sample_task(const EnvironmentSpec& spec, Rng& rng);

/// Applies given standard-normal draws to the means of (type, arm).
/// Under CostNoise::kTruncated the cost draw must already satisfy the
/// truncation bound; it is then applied unchanged.
Feedback noisy_feedback(const EnvironmentSpec& spec, std::size_t type, std::size_t arm,
                        double reward_draw, double cost_draw);

Feedback sample_feedback(const EnvironmentSpec& spec, std::size_t type, std::size_t arm, Rng& rng);

}  // namespace dolrm
