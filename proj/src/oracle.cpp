#include "dolrm/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dolrm {

double expected_ratio(const EnvironmentSpec& spec, const PolicyMap& map) {
  double reward = 0.0;
  double cost = 0.0;
  for (std::size_t s = 0; s < spec.num_types(); ++s) {
    const auto& m = spec.arms[s].at(map.action.at(s));
    reward += spec.arrival_probs[s] * m.reward;
    cost += spec.arrival_probs[s] * m.cost;
  }
  return reward / cost;
}

PolicyMap best_response(const EnvironmentSpec& spec, double theta) {
  PolicyMap map{std::vector<std::size_t>(spec.num_types(), 0)};
  std::vector<double> scores;
  for (std::size_t s = 0; s < spec.num_types(); ++s) {
    scores.clear();
    for (const auto& m : spec.arms[s]) scores.push_back(m.reward - theta * m.cost);
    map.action[s] = argmax_lowest(scores);
  }
  return map;
}

OracleResult dinkelbach_theta_star(const EnvironmentSpec& spec, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  OracleResult result;
  double theta = derived_bounds(spec).theta_min;
  result.trace.push_back(theta);
  for (std::size_t k = 0; k < max_iter; ++k) {
    auto map = best_response(spec, theta);
    const double next = expected_ratio(spec, map);
    result.trace.push_back(next);
    result.iterations = k + 1;
    if (std::abs(next - theta) <= tol) {
      result.theta_star = next;
      result.policy = std::move(map);
      return result;
    }
    theta = next;
  }
  throw std::runtime_error("Dinkelbach iteration did not converge within " +
                           std::to_string(max_iter) + " iterations");
}

std::size_t count_policy_maps(const EnvironmentSpec& spec) {
  std::size_t total = 1;
  for (const auto& type_arms : spec.arms) {
    total *= type_arms.size();
    if (total > kMaxEnumeratedMaps) return kMaxEnumeratedMaps + 1;
  }
  return total;
}

OracleResult brute_force_theta_star(const EnvironmentSpec& spec) {
  if (count_policy_maps(spec) > kMaxEnumeratedMaps) {
    throw std::length_error("policy enumeration exceeds " + std::to_string(kMaxEnumeratedMaps) +
                            " maps");
  }
  OracleResult result;
  bool first = true;
  for_each_policy_map(spec, [&](const PolicyMap& map) {
    const double ratio = expected_ratio(spec, map);
    ++result.iterations;
    if (first || ratio > result.theta_star) {
      result.theta_star = ratio;
      result.policy = map;
      first = false;
    }
  });
  return result;
}

GapReport compute_gap(double theta_star, double cum_reward, double cum_cost,
                      std::size_t horizon) {
  if (!(cum_cost > 0.0)) throw std::invalid_argument("cumulative cost must be positive");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  const double gap = std::abs(theta_star - cum_reward / cum_cost);
  return GapReport{gap, static_cast<double>(horizon) * gap};
}

}  // namespace dolrm
