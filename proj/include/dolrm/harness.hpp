#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dolrm/env.hpp"
#include "dolrm/policy.hpp"

namespace dolrm {

struct TraceRow {
  std::size_t t = 0;
  std::size_t type = 0;
  std::size_t arm = 0;
  double reward = 0.0;
  double cost = 0.0;
  double cum_reward = 0.0;
  double cum_cost = 0.0;
  double ratio = 0.0;
  /// Ratio estimate after this round's update; absent for policies without one.
  std::optional<double> theta;
};

struct EpisodeTrace {
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::size_t stride = 1;
  /// Rounds t with (t - 1) % stride == 0, plus round T.
  std::vector<TraceRow> rows;

  double cum_reward = 0.0;
  double cum_cost = 0.0;
  /// Range of theta over every round, logged or not.
  std::optional<double> theta_low;
  std::optional<double> theta_high;
  /// Sum of pull counts held by the policy at the end, for learning policies.
  std::optional<std::size_t> total_pulls;

  double final_ratio() const { return cum_reward / cum_cost; }
};

/// max(1, T / 1000).
std::size_t default_stride(std::size_t horizon);

/// Runs T rounds of arrival, decision, feedback, update. Arrival, feedback
/// and policy randomness come from independent streams of `seed`.
/// stride 0 selects default_stride(T).
EpisodeTrace run_episode(const EnvironmentSpec& spec, const PolicyKind& kind, std::size_t horizon,
                         std::uint64_t seed, std::size_t stride = 0);

/// Same loop driving a caller-owned policy; its policy stream is the caller's.
EpisodeTrace run_episode(const EnvironmentSpec& spec, Policy& policy, const std::string& label,
                         std::size_t horizon, std::uint64_t seed, std::size_t stride = 0);

struct ReplicationSummary {
  std::string policy;
  std::size_t horizon = 0;
  std::size_t replications = 0;
  double theta_star = 0.0;
  double mean_ratio = 0.0;
  double std_ratio = 0.0;
  double mean_gap = 0.0;
  double std_gap = 0.0;
  double mean_regret = 0.0;
  std::vector<double> final_ratios;
};

/// Sample mean and (n - 1)-normalized standard deviation; 0 for n = 1.
std::pair<double, double> mean_and_std(std::span<const double> values);

/// Aggregates final ratios and gaps of episodes sharing one policy and horizon.
ReplicationSummary summarize_episodes(std::span<const EpisodeTrace> traces, double theta_star);

/// Independent episodes per seed, run on up to `threads` workers (0 means
/// hardware concurrency). Results are independent of the thread count.
ReplicationSummary run_replications(const EnvironmentSpec& spec, const PolicyKind& kind,
                                    std::size_t horizon, std::span<const std::uint64_t> seeds,
                                    double theta_star, unsigned threads = 0);

/// Uses the Dinkelbach optimum as theta_star.
ReplicationSummary run_replications(const EnvironmentSpec& spec, const PolicyKind& kind,
                                    std::size_t horizon, std::span<const std::uint64_t> seeds,
                                    unsigned threads = 0);

/// Least-squares slope of log(y) against log(x). Requires positive values.
double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

struct SlopeResult {
  std::vector<std::size_t> horizons;
  std::vector<double> mean_gaps;
  /// Absent when some mean gap is exactly zero.
  std::optional<double> slope;

  bool below_measurement_floor() const { return !slope.has_value(); }
};

/// Mean realized gap per horizon (fresh policy per horizon) and its log-log slope.
SlopeResult gap_slope(const EnvironmentSpec& spec, const PolicyKind& kind,
                      std::span<const std::size_t> horizons, std::span<const std::uint64_t> seeds,
                      unsigned threads = 0);

}  // namespace dolrm
