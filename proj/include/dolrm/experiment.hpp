#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dolrm/config.hpp"
#include "dolrm/harness.hpp"
#include "dolrm/oracle.hpp"

namespace dolrm {

struct MapRatio {
  std::string name;
  PolicyMap map;
  double ratio = 0.0;
};

struct PolicySlope {
  std::string policy;
  SlopeResult result;
};

struct OutputBundle {
  ExperimentConfig config;
  OracleResult oracle;
  /// Enumeration cross-check, when the map count is within the guard.
  std::optional<double> brute_force_theta_star;
  /// Named maps and fixed-map policies with their exact expected ratios.
  std::vector<MapRatio> map_ratios;
  /// One per (policy, horizon, seed), policy-major then horizon then seed.
  std::vector<EpisodeTrace> traces;
  /// One per (policy, horizon), same order.
  std::vector<ReplicationSummary> summaries;
  /// Per policy, present when the config has three or more horizons.
  std::vector<PolicySlope> slopes;
};

inline constexpr char kTraceHeader[] =
    "run_id,policy,t,type,arm,reward,cost,cum_reward,cum_cost,ratio,theta";

/// printf %.*g with the given significant digits.
std::string format_number(double value, int digits = 17);

/// "<policy>-T<horizon>-seed<seed>" with ':' replaced by '_'.
std::string run_id(const EpisodeTrace& trace);

/// Header line plus one row per logged round.
std::string trace_csv(const EpisodeTrace& trace);

/// Solves the oracle once, then runs all (policy, horizon, seed) episodes.
OutputBundle run_experiment(const ExperimentConfig& cfg);

nlohmann::json oracle_json(const OutputBundle& bundle);
nlohmann::json summary_json(const OutputBundle& bundle);
std::string summary_text(const OutputBundle& bundle);

/// theta* and the optimal map only.
std::string oracle_text(const ExperimentConfig& cfg, const OracleResult& oracle);

/// Writes traces/<run_id>.csv, summary.txt, summary.json, oracle.json and
/// config.resolved.json under the config's output directory. Each file is
/// written to a temporary name and renamed into place.
void write_outputs(const OutputBundle& bundle);

/// Atomic whole-file write via temp-then-rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace dolrm
