#include "dolrm/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace dolrm {

namespace {

void check_type(std::size_t type, std::size_t num_types) {
  if (type >= num_types) {
    throw std::out_of_range("type index " + std::to_string(type) + " out of range (num_types " +
                            std::to_string(num_types) + ")");
  }
}

// Guards the select/update alternation of the sequential interface.
class PendingDecision {
 public:
  void set(std::size_t type, std::size_t arm) { pending_ = {type, arm}; }

  void consume(std::size_t type, std::size_t arm) {
    if (!pending_ || pending_->first != type || pending_->second != arm) {
      throw std::logic_error("update for (type " + std::to_string(type) + ", arm " +
                             std::to_string(arm) + ") does not match the pending decision");
    }
    pending_.reset();
  }

 private:
  std::optional<std::pair<std::size_t, std::size_t>> pending_;
};

class DolRmPolicy final : public Policy {
 public:
  DolRmPolicy(const EnvironmentSpec& spec, std::size_t horizon, RateMode mode)
      : state_(DolRmState::init(spec, horizon, mode)) {}

  std::size_t select(std::size_t type) override {
    const auto arm = dolrm_select(state_, type);
    pending_.set(type, arm);
    return arm;
  }
  void update(std::size_t type, std::size_t arm, const Feedback& feedback) override {
    pending_.consume(type, arm);
    dolrm_update(state_, type, arm, feedback);
  }
  std::optional<double> theta() const override { return state_.theta; }
  const ArmStatistics* statistics() const override { return &state_.stats; }

 private:
  DolRmState state_;
  PendingDecision pending_;
};

class FixedMapPolicy final : public Policy {
 public:
  explicit FixedMapPolicy(PolicyMap map) : map_(std::move(map)) {}

  std::size_t select(std::size_t type) override {
    const auto arm = fixed_select(map_, type);
    pending_.set(type, arm);
    return arm;
  }
  void update(std::size_t type, std::size_t arm, const Feedback&) override {
    pending_.consume(type, arm);
  }

 private:
  PolicyMap map_;
  PendingDecision pending_;
};

class ClassicUcbPolicy final : public Policy {
 public:
  explicit ClassicUcbPolicy(const EnvironmentSpec& spec)
      : ratio_stats_(spec), stats_(spec), cost_floor_(spec.cost_floor) {}

  std::size_t select(std::size_t type) override {
    const auto arm = ucb_baseline_select(ratio_stats_, type, round_);
    pending_.set(type, arm);
    return arm;
  }
  void update(std::size_t type, std::size_t arm, const Feedback& feedback) override {
    pending_.consume(type, arm);
    const double rho = feedback.reward / std::max(feedback.cost, cost_floor_);
    ratio_stats_.record(type, arm, Feedback{rho, feedback.cost});
    stats_.record(type, arm, feedback);
    ++round_;
  }
  const ArmStatistics* statistics() const override { return &stats_; }

 private:
  ArmStatistics ratio_stats_;
  ArmStatistics stats_;
  double cost_floor_;
  std::size_t round_ = 1;
  PendingDecision pending_;
};

class ThompsonPolicy final : public Policy {
 public:
  ThompsonPolicy(const EnvironmentSpec& spec, Rng rng)
      : stats_(spec), c_min_(derived_bounds(spec).c_min), rng_(std::move(rng)) {}

  std::size_t select(std::size_t type) override {
    const auto arm = ts_baseline_select(stats_, type, c_min_, rng_);
    pending_.set(type, arm);
    return arm;
  }
  void update(std::size_t type, std::size_t arm, const Feedback& feedback) override {
    pending_.consume(type, arm);
    stats_.record(type, arm, feedback);
  }
  const ArmStatistics* statistics() const override { return &stats_; }

 private:
  ArmStatistics stats_;
  double c_min_;
  Rng rng_;
  PendingDecision pending_;
};

class OracleRmPolicy final : public Policy {
 public:
  OracleRmPolicy(const EnvironmentSpec& spec, std::size_t horizon, RateMode mode)
      : spec_(spec), state_(OracleRmState::init(spec, horizon, mode)), stats_(spec) {}

  std::size_t select(std::size_t type) override {
    const auto arm = oracle_rm_select_update(state_, spec_, type);
    pending_.set(type, arm);
    return arm;
  }
  void update(std::size_t type, std::size_t arm, const Feedback& feedback) override {
    pending_.consume(type, arm);
    stats_.record(type, arm, feedback);
  }
  std::optional<double> theta() const override { return state_.theta; }
  const ArmStatistics* statistics() const override { return &stats_; }

 private:
  EnvironmentSpec spec_;
  OracleRmState state_;
  ArmStatistics stats_;
  PendingDecision pending_;
};

}  // namespace

std::string to_string(RateMode mode) {
  return mode == RateMode::kFixedSqrtT ? "fixed-sqrtT" : "decaying";
}

RateMode rate_mode_from_string(const std::string& name) {
  if (name == "fixed-sqrtT") return RateMode::kFixedSqrtT;
  if (name == "decaying") return RateMode::kDecaying;
  throw std::invalid_argument("unknown learning-rate mode \"" + name +
                              "\" (expected fixed-sqrtT or decaying)");
}

double learning_rate(const LearningRate& schedule, std::size_t t) {
  switch (schedule.mode) {
    case RateMode::kFixedSqrtT:
      return 1.0 / (schedule.c_min * std::sqrt(static_cast<double>(schedule.horizon)));
    case RateMode::kDecaying:
      return 1.0 / (schedule.c_min * static_cast<double>(t + 1));
  }
  return 0.0;
}

void validate_map(const EnvironmentSpec& spec, const PolicyMap& map) {
  if (map.action.size() != spec.num_types()) {
    throw std::invalid_argument("policy map has " + std::to_string(map.action.size()) +
                                " entries for " + std::to_string(spec.num_types()) + " types");
  }
  for (std::size_t s = 0; s < map.action.size(); ++s) {
    if (map.action[s] >= spec.num_arms(s)) {
      throw std::invalid_argument("policy map action[" + std::to_string(s) + "] = " +
                                  std::to_string(map.action[s]) + " exceeds arm count " +
                                  std::to_string(spec.num_arms(s)));
    }
  }
}

std::size_t argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("argmax over an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

std::optional<std::size_t> first_unpulled(const ArmStatistics& stats, std::size_t type) {
  for (std::size_t a = 0; a < stats.num_arms(type); ++a) {
    if (stats.count(type, a) == 0) return a;
  }
  return std::nullopt;
}

double ratio_step(double theta, double eta, double reward, double cost,
                  const DerivedBounds& bounds) {
  return std::clamp(theta + eta * (reward - theta * cost), bounds.theta_min, bounds.theta_max);
}

DolRmState DolRmState::init(const EnvironmentSpec& spec, std::size_t horizon, RateMode mode) {
  DolRmState state;
  state.bounds = derived_bounds(spec);
  state.theta = state.bounds.theta_min;
  state.schedule = LearningRate{mode, state.bounds.c_min, horizon};
  state.stats = ArmStatistics(spec);
  state.cfg = EstimatorConfig::make(horizon, state.bounds);
  return state;
}

std::size_t dolrm_select(const DolRmState& state, std::size_t type) {
  check_type(type, state.stats.num_types());
  if (const auto unpulled = first_unpulled(state.stats, type)) return *unpulled;
  const auto arms = state.stats.num_arms(type);
  std::vector<double> scores(arms);
  for (std::size_t a = 0; a < arms; ++a) {
    scores[a] = ucb_reward(state.stats, state.cfg, type, a) -
                state.theta * lcb_cost(state.stats, state.cfg, type, a);
  }
  return argmax_lowest(scores);
}

void dolrm_update(DolRmState& state, std::size_t type, std::size_t arm, const Feedback& feedback) {
  const double reward_hat = ucb_reward(state.stats, state.cfg, type, arm);
  const double cost_check = lcb_cost(state.stats, state.cfg, type, arm);
  const double eta = learning_rate(state.schedule, state.round);
  state.theta = ratio_step(state.theta, eta, reward_hat, cost_check, state.bounds);
  state.stats.record(type, arm, feedback);
  ++state.round;
}

std::size_t fixed_select(const PolicyMap& map, std::size_t type) {
  check_type(type, map.action.size());
  return map.action[type];
}

std::size_t ucb_baseline_select(const ArmStatistics& ratio_stats, std::size_t type,
                                std::size_t round) {
  check_type(type, ratio_stats.num_types());
  if (const auto unpulled = first_unpulled(ratio_stats, type)) return *unpulled;
  const double log_t = std::log(static_cast<double>(std::max<std::size_t>(round, 1)));
  const auto arms = ratio_stats.num_arms(type);
  std::vector<double> index(arms);
  for (std::size_t a = 0; a < arms; ++a) {
    const auto& c = ratio_stats.cell(type, a);
    index[a] = c.mean_reward + std::sqrt(2.0 * log_t / static_cast<double>(c.count));
  }
  return argmax_lowest(index);
}

std::size_t ts_baseline_select(const ArmStatistics& stats, std::size_t type, double c_min,
                               Rng& rng) {
  check_type(type, stats.num_types());
  if (const auto unpulled = first_unpulled(stats, type)) return *unpulled;
  const auto arms = stats.num_arms(type);
  if (arms == 1) return 0;
  std::vector<double> sampled_ratio(arms);
  for (std::size_t a = 0; a < arms; ++a) {
    const auto& c = stats.cell(type, a);
    const double sd = 1.0 / std::sqrt(static_cast<double>(c.count));
    std::normal_distribution<double> reward_post(c.mean_reward, sd);
    std::normal_distribution<double> cost_post(c.mean_cost, sd);
    const double reward = reward_post(rng);
    const double cost = std::max(c_min, cost_post(rng));
    sampled_ratio[a] = reward / cost;
  }
  return argmax_lowest(sampled_ratio);
}

OracleRmState OracleRmState::init(const EnvironmentSpec& spec, std::size_t horizon,
                                  RateMode mode) {
  OracleRmState state;
  state.bounds = derived_bounds(spec);
  state.theta = state.bounds.theta_min;
  state.schedule = LearningRate{mode, state.bounds.c_min, horizon};
  return state;
}

std::size_t oracle_rm_select_update(OracleRmState& state, const EnvironmentSpec& spec,
                                    std::size_t type) {
  check_type(type, spec.num_types());
  const auto& arms = spec.arms[type];
  std::vector<double> scores(arms.size());
  for (std::size_t a = 0; a < arms.size(); ++a) {
    scores[a] = arms[a].reward - state.theta * arms[a].cost;
  }
  const auto arm = argmax_lowest(scores);
  const double eta = learning_rate(state.schedule, state.round);
  state.theta = ratio_step(state.theta, eta, arms[arm].reward, arms[arm].cost, state.bounds);
  ++state.round;
  return arm;
}

std::string policy_label(const PolicyKind& kind) {
  struct Visitor {
    std::string operator()(const DolRmKind&) const { return "dolrm"; }
    std::string operator()(const FixedMapKind& k) const { return "fixed:" + k.name; }
    std::string operator()(const ClassicUcbKind&) const { return "ucb"; }
    std::string operator()(const ThompsonKind&) const { return "ts"; }
    std::string operator()(const OracleRmKind&) const { return "oracle-rm"; }
  };
  return std::visit(Visitor{}, kind);
}

std::unique_ptr<Policy> make_policy(const PolicyKind& kind, const EnvironmentSpec& spec,
                                    std::size_t horizon, Rng policy_rng) {
  struct Visitor {
    const EnvironmentSpec& spec;
    std::size_t horizon;
    Rng& rng;

    std::unique_ptr<Policy> operator()(const DolRmKind& k) const {
      return std::make_unique<DolRmPolicy>(spec, horizon, k.rate);
    }
    std::unique_ptr<Policy> operator()(const FixedMapKind& k) const {
      validate_map(spec, k.map);
      return std::make_unique<FixedMapPolicy>(k.map);
    }
    std::unique_ptr<Policy> operator()(const ClassicUcbKind&) const {
      return std::make_unique<ClassicUcbPolicy>(spec);
    }
    std::unique_ptr<Policy> operator()(const ThompsonKind&) const {
      return std::make_unique<ThompsonPolicy>(spec, std::move(rng));
    }
    std::unique_ptr<Policy> operator()(const OracleRmKind& k) const {
      return std::make_unique<OracleRmPolicy>(spec, horizon, k.rate);
    }
  };
  return std::visit(Visitor{spec, horizon, policy_rng}, kind);
}

}  // namespace dolrm
