#include "dolrm/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace dolrm {

namespace {

[[noreturn]] void reject(const std::string& message) { throw std::invalid_argument(message); }

void check_index(const EnvironmentSpec& spec, std::size_t type, std::size_t arm) {
  if (type >= spec.num_types()) {
    throw std::out_of_range("type index " + std::to_string(type) + " out of range (num_types " +
                            std::to_string(spec.num_types()) + ")");
  }
  if (arm >= spec.arms[type].size()) {
    throw std::out_of_range("arm index " + std::to_string(arm) + " out of range for type " +
                            std::to_string(type) + " (" + std::to_string(spec.arms[type].size()) +
                            " arms)");
  }
}

// Standard normal restricted to [-bound, bound], by inverse CDF on one uniform.
double truncated_normal(double bound, Rng& rng) {
  static const boost::math::normal_distribution<double> unit;
  const double lower = boost::math::cdf(unit, -bound);
  const double u = uniform01(rng);
  const double p = lower + u * (1.0 - 2.0 * lower);
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return std::clamp(boost::math::quantile(unit, p), -bound, bound);
}

}  // namespace

std::string to_string(CostNoise mode) {
  switch (mode) {
    case CostNoise::kTruncated:
      return "truncated";
    case CostNoise::kClip:
      return "clip";
  }
  return "truncated";
}

CostNoise cost_noise_from_string(const std::string& name) {
  if (name == "truncated") return CostNoise::kTruncated;
  if (name == "clip") return CostNoise::kClip;
  throw std::invalid_argument("unknown cost_noise \"" + name + "\" (expected truncated or clip)");
}

const EnvironmentSpec& validate_env(const EnvironmentSpec& spec) {
  if (spec.arrival_probs.empty()) reject("arrival_probs must contain at least one type");
  if (spec.arms.size() != spec.arrival_probs.size()) {
    std::ostringstream os;
    os << "arms has " << spec.arms.size() << " types but arrival_probs has "
       << spec.arrival_probs.size();
    reject(os.str());
  }
  double total = 0.0;
  for (std::size_t s = 0; s < spec.arrival_probs.size(); ++s) {
    const double p = spec.arrival_probs[s];
    if (!std::isfinite(p) || p < 0.0) {
      std::ostringstream os;
      os << "arrival_probs[" << s << "] = " << p << " must be a non-negative number";
      reject(os.str());
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "arrival_probs sum " << total << " ≠ 1";
    reject(os.str());
  }
  for (std::size_t s = 0; s < spec.arms.size(); ++s) {
    if (spec.arms[s].empty()) reject("arms[" + std::to_string(s) + "] must contain at least one arm");
    for (std::size_t a = 0; a < spec.arms[s].size(); ++a) {
      const auto& m = spec.arms[s][a];
      const std::string where = "arms[" + std::to_string(s) + "][" + std::to_string(a) + "]";
      if (!std::isfinite(m.reward)) reject(where + ": mean_reward must be finite");
      if (!std::isfinite(m.cost) || m.cost <= 0.0) {
        std::ostringstream os;
        os << where << ": mean_cost must be positive (got " << m.cost << ")";
        reject(os.str());
      }
    }
  }
  if (!std::isfinite(spec.noise_sigma) || spec.noise_sigma < 0.0) {
    reject("noise_sigma must be a non-negative number");
  }
  if (!std::isfinite(spec.cost_floor) || spec.cost_floor <= 0.0) {
    reject("cost_floor must be positive");
  }
  return spec;
}

DerivedBounds derived_bounds(const EnvironmentSpec& spec) {
  DerivedBounds b;
  bool first = true;
  for (const auto& type_arms : spec.arms) {
    for (const auto& m : type_arms) {
      if (first) {
        b.r_min = b.r_max = m.reward;
        b.c_min = b.c_max = m.cost;
        first = false;
        continue;
      }
      b.r_min = std::min(b.r_min, m.reward);
      b.r_max = std::max(b.r_max, m.reward);
      b.c_min = std::min(b.c_min, m.cost);
      b.c_max = std::max(b.c_max, m.cost);
    }
  }
  b.theta_min = b.r_min / b.c_max;
  b.theta_max = b.r_max / b.c_min;
  return b;
}

std::size_t sample_task(const EnvironmentSpec& spec, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t s = 0; s < spec.arrival_probs.size(); ++s) {
    if (spec.arrival_probs[s] > 0.0) last_positive = s;
    cumulative += spec.arrival_probs[s];
    if (cumulative > u) return s;
  }
  return last_positive;
}

std::size_t sample_task(const EnvironmentSpec& spec, Rng& rng) {
  return sample_task(spec, uniform01(rng));
}

Feedback noisy_feedback(const EnvironmentSpec& spec, std::size_t type, std::size_t arm,
                        double reward_draw, double cost_draw) {
  check_index(spec, type, arm);
  const auto& m = spec.arms[type][arm];
  const double sigma = spec.noise_sigma;
  Feedback fb{m.reward + sigma * reward_draw, m.cost + sigma * cost_draw};
  // Truncated draws land on [cost_floor, 2c - cost_floor] up to rounding.
  fb.cost = std::max(spec.cost_floor, fb.cost);
  return fb;
}

Feedback sample_feedback(const EnvironmentSpec& spec, std::size_t type, std::size_t arm,
                         Rng& rng) {
  check_index(spec, type, arm);
  if (spec.noise_sigma == 0.0) return noisy_feedback(spec, type, arm, 0.0, 0.0);
  std::normal_distribution<double> normal;
  const double reward_draw = normal(rng);
  double cost_draw = 0.0;
  switch (spec.cost_noise) {
    case CostNoise::kClip:
      cost_draw = normal(rng);
      break;
    case CostNoise::kTruncated: {
      const double bound = (spec.arms[type][arm].cost - spec.cost_floor) / spec.noise_sigma;
      cost_draw = bound > 0.0 ? truncated_normal(bound, rng) : 0.0;
      break;
    }
  }
  return noisy_feedback(spec, type, arm, reward_draw, cost_draw);
}

}  // namespace dolrm
