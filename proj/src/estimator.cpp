#include "dolrm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dolrm {

ArmStatistics::ArmStatistics(const EnvironmentSpec& spec) {
  cells_.reserve(spec.arms.size());
  for (const auto& type_arms : spec.arms) cells_.emplace_back(type_arms.size());
}

ArmStatistics::ArmStatistics(const std::vector<std::size_t>& arms_per_type) {
  cells_.reserve(arms_per_type.size());
  for (const auto n : arms_per_type) cells_.emplace_back(n);
}

std::size_t ArmStatistics::num_arms(std::size_t type) const {
  if (type >= cells_.size()) {
    throw std::out_of_range("type index " + std::to_string(type) + " out of range");
  }
  return cells_[type].size();
}

const ArmCell& ArmStatistics::cell(std::size_t type, std::size_t arm) const {
  if (arm >= num_arms(type)) {
    throw std::out_of_range("arm index " + std::to_string(arm) + " out of range for type " +
                            std::to_string(type));
  }
  return cells_[type][arm];
}

ArmCell& ArmStatistics::mutable_cell(std::size_t type, std::size_t arm) {
  return const_cast<ArmCell&>(static_cast<const ArmStatistics&>(*this).cell(type, arm));
}

void ArmStatistics::record(std::size_t type, std::size_t arm, const Feedback& feedback) {
  auto& c = mutable_cell(type, arm);
  const auto previous = static_cast<double>(c.count);
  const auto next = previous + 1.0;
  c.mean_reward = (c.mean_reward * previous + feedback.reward) / next;
  c.mean_cost = (c.mean_cost * previous + feedback.cost) / next;
  ++c.count;
  ++total_;
}

void ArmStatistics::assign(std::size_t type, std::size_t arm, const ArmCell& value) {
  auto& c = mutable_cell(type, arm);
  total_ = total_ - c.count + value.count;
  c = value;
}

EstimatorConfig EstimatorConfig::make(std::size_t horizon, const DerivedBounds& bounds) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(bounds.c_min > 0.0)) throw std::invalid_argument("c_min must be positive");
  return EstimatorConfig{horizon, bounds.r_max, bounds.c_min,
                         std::log(static_cast<double>(horizon))};
}

double ucb_reward(const ArmStatistics& stats, const EstimatorConfig& cfg, std::size_t type,
                  std::size_t arm) {
  const auto& c = stats.cell(type, arm);
  if (c.count == 0) return cfg.r_max;
  return std::min(cfg.r_max, c.mean_reward + confidence_bonus(cfg, c.count));
}

double lcb_cost(const ArmStatistics& stats, const EstimatorConfig& cfg, std::size_t type,
                std::size_t arm) {
  const auto& c = stats.cell(type, arm);
  if (c.count == 0) return cfg.c_min;
  return std::max(cfg.c_min, c.mean_cost - confidence_bonus(cfg, c.count));
}

}  // namespace dolrm
