#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dolrm/env.hpp"
#include "dolrm/estimator.hpp"
#include "dolrm/rng.hpp"

namespace dolrm {

enum class RateMode {
  /// eta = 1 / (c_min sqrt(T)) for every round.
  kFixedSqrtT,
  /// eta_t = 1 / (c_min (t + 1)).
  kDecaying,
};

std::string to_string(RateMode mode);
RateMode rate_mode_from_string(const std::string& name);

struct LearningRate {
  RateMode mode = RateMode::kDecaying;
  double c_min = 1.0;
  std::size_t horizon = 1;
};

/// Step size for 1-based round t.
double learning_rate(const LearningRate& schedule, std::size_t t);

/// Deterministic stationary policy: one arm per task type.
struct PolicyMap {
  std::vector<std::size_t> action;

  bool operator==(const PolicyMap&) const = default;
};

/// Throws std::invalid_argument unless map.action[s] < |arms[s]| for all s.
void validate_map(const EnvironmentSpec& spec, const PolicyMap& map);

/// Index of the largest score; the lowest index wins ties.
std::size_t argmax_lowest(std::span<const double> scores);

/// Lowest-index arm of `type` never pulled, if any.
std::optional<std::size_t> first_unpulled(const ArmStatistics& stats, std::size_t type);

/// Projection of theta + eta (reward - theta cost) onto [theta_min, theta_max].
double ratio_step(double theta, double eta, double reward, double cost,
                  const DerivedBounds& bounds);

struct DolRmState {
  double theta = 0.0;
  DerivedBounds bounds;
  LearningRate schedule;
  /// 1-based index of the round about to be played.
  std::size_t round = 1;
  ArmStatistics stats;
  EstimatorConfig cfg;

  static DolRmState init(const EnvironmentSpec& spec, std::size_t horizon, RateMode mode);
};

std::size_t dolrm_select(const DolRmState& state, std::size_t type);

/// Ratio step from the pre-update estimates of (type, arm), then the
/// statistics refresh, then the round advances.
void dolrm_update(DolRmState& state, std::size_t type, std::size_t arm, const Feedback& feedback);

std::size_t fixed_select(const PolicyMap& map, std::size_t type);

/// UCB1 on the per-sample ratio R / max(C, cost_floor). `ratio_stats`
/// carries the ratio's running mean in its reward slot.
std::size_t ucb_baseline_select(const ArmStatistics& ratio_stats, std::size_t type,
                                std::size_t round);

/// Gaussian Thompson sampling on reward and cost with posterior variance
/// 1/N; sampled costs are floored at c_min before taking the ratio.
std::size_t ts_baseline_select(const ArmStatistics& stats, std::size_t type, double c_min,
                               Rng& rng);

struct OracleRmState {
  double theta = 0.0;
  DerivedBounds bounds;
  LearningRate schedule;
  std::size_t round = 1;

  static OracleRmState init(const EnvironmentSpec& spec, std::size_t horizon, RateMode mode);
};

/// Decision and ratio step on the true means.
std::size_t oracle_rm_select_update(OracleRmState& state, const EnvironmentSpec& spec,
                                    std::size_t type);

struct DolRmKind {
  RateMode rate = RateMode::kDecaying;
  bool operator==(const DolRmKind&) const = default;
};
struct FixedMapKind {
  std::string name;
  PolicyMap map;
  bool operator==(const FixedMapKind&) const = default;
};
struct ClassicUcbKind {
  bool operator==(const ClassicUcbKind&) const = default;
};
struct ThompsonKind {
  bool operator==(const ThompsonKind&) const = default;
};
struct OracleRmKind {
  RateMode rate = RateMode::kDecaying;
  bool operator==(const OracleRmKind&) const = default;
};

using PolicyKind = std::variant<DolRmKind, FixedMapKind, ClassicUcbKind, ThompsonKind, OracleRmKind>;

/// Short stable name used in trace files: dolrm, ucb, ts, oracle-rm, fixed:<name>.
std::string policy_label(const PolicyKind& kind);

/// Sequential policy: select an arm for an arriving type, then ingest the
/// feedback for exactly that decision.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::size_t select(std::size_t type) = 0;
  virtual void update(std::size_t type, std::size_t arm, const Feedback& feedback) = 0;

  /// Current ratio estimate, for policies that keep one.
  virtual std::optional<double> theta() const { return std::nullopt; }
  /// Pull statistics, for learning policies.
  virtual const ArmStatistics* statistics() const { return nullptr; }
};

std::unique_ptr<Policy> make_policy(const PolicyKind& kind, const EnvironmentSpec& spec,
                                    std::size_t horizon, Rng policy_rng);

}  // namespace dolrm
