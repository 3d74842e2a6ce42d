#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dolrm/env.hpp"

namespace dolrm {

struct ArmCell {
  std::size_t count = 0;
  double mean_reward = 0.0;
  double mean_cost = 0.0;
};

/// Per-(type, arm) pull counts and running means of observed feedback.
class ArmStatistics {
 public:
  ArmStatistics() = default;
  explicit ArmStatistics(const EnvironmentSpec& spec);
  /// Shape given directly as the arm count of each type.
  explicit ArmStatistics(const std::vector<std::size_t>& arms_per_type);

  void record(std::size_t type, std::size_t arm, const Feedback& feedback);

  /// Overwrites one cell, e.g. to restore a snapshot; total_count follows.
  void assign(std::size_t type, std::size_t arm, const ArmCell& value);

  const ArmCell& cell(std::size_t type, std::size_t arm) const;
  std::size_t count(std::size_t type, std::size_t arm) const { return cell(type, arm).count; }

  std::size_t num_types() const { return cells_.size(); }
  std::size_t num_arms(std::size_t type) const;
  /// Sum of all counts; equals the number of record() calls.
  std::size_t total_count() const { return total_; }

 private:
  ArmCell& mutable_cell(std::size_t type, std::size_t arm);

  std::vector<std::vector<ArmCell>> cells_;
  std::size_t total_ = 0;
};

struct EstimatorConfig {
  std::size_t horizon = 1;
  double r_max = 0.0;
  double c_min = 1.0;
  /// log T, the numerator of the confidence bonus.
  double bonus_numerator = 0.0;

  static EstimatorConfig make(std::size_t horizon, const DerivedBounds& bounds);
};

/// sqrt(log T / N); callers guarantee count >= 1.
inline double confidence_bonus(const EstimatorConfig& cfg, std::size_t count) {
  return std::sqrt(cfg.bonus_numerator / static_cast<double>(count));
}

/// Truncated UCB of the mean reward; r_max for a never-pulled cell.
double ucb_reward(const ArmStatistics& stats, const EstimatorConfig& cfg, std::size_t type,
                  std::size_t arm);

/// Truncated LCB of the mean cost; c_min for a never-pulled cell.
double lcb_cost(const ArmStatistics& stats, const EstimatorConfig& cfg, std::size_t type,
                std::size_t arm);

}  // namespace dolrm

