#include "dolrm/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dolrm/parallel.hpp"

namespace dolrm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Summary numbers are rounded once so the text table and the JSON record
// carry the same values.
constexpr int kSummaryDigits = 15;

double rounded(double v) { return std::stod(format_number(v, kSummaryDigits)); }

std::string map_string(const PolicyMap& map) {
  std::string out = "[";
  for (std::size_t s = 0; s < map.action.size(); ++s) {
    out += (s ? ", " : "") + std::to_string(map.action[s]);
  }
  return out + "]";
}

}  // namespace

std::string format_number(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

std::string run_id(const EpisodeTrace& trace) {
  std::string label = trace.policy;
  for (auto& ch : label) {
    if (ch == ':') ch = '_';
  }
  return label + "-T" + std::to_string(trace.horizon) + "-seed" + std::to_string(trace.seed);
}

std::string trace_csv(const EpisodeTrace& trace) {
  const auto id = run_id(trace);
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& row : trace.rows) {
    out += id;
    out += ',' + trace.policy;
    out += ',' + std::to_string(row.t);
    out += ',' + std::to_string(row.type);
    out += ',' + std::to_string(row.arm);
    out += ',' + format_number(row.reward);
    out += ',' + format_number(row.cost);
    out += ',' + format_number(row.cum_reward);
    out += ',' + format_number(row.cum_cost);
    out += ',' + format_number(row.ratio);
    out += ',';
    if (row.theta) out += format_number(*row.theta);
    out += '\n';
  }
  return out;
}

OutputBundle run_experiment(const ExperimentConfig& cfg) {
  if (cfg.policies.empty()) throw std::invalid_argument("experiment has no policies");
  if (cfg.horizons.empty()) throw std::invalid_argument("experiment has no horizons");
  if (cfg.seeds.empty()) throw std::invalid_argument("experiment has no seeds");
  validate_env(cfg.environment);

  OutputBundle bundle;
  bundle.config = cfg;
  bundle.oracle = dinkelbach_theta_star(cfg.environment);
  if (count_policy_maps(cfg.environment) <= kMaxEnumeratedMaps) {
    bundle.brute_force_theta_star = brute_force_theta_star(cfg.environment).theta_star;
  }
  for (const auto& m : cfg.maps) {
    bundle.map_ratios.push_back(MapRatio{m.name, m.map, expected_ratio(cfg.environment, m.map)});
  }
  for (const auto& kind : cfg.policies) {
    if (const auto* fixed = std::get_if<FixedMapKind>(&kind)) {
      bool listed = false;
      for (const auto& mr : bundle.map_ratios) listed = listed || (mr.map == fixed->map && mr.name == fixed->name);
      if (!listed) {
        bundle.map_ratios.push_back(
            MapRatio{fixed->name, fixed->map, expected_ratio(cfg.environment, fixed->map)});
      }
    }
  }

  struct Job {
    std::size_t policy;
    std::size_t horizon;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    for (std::size_t h = 0; h < cfg.horizons.size(); ++h) {
      for (std::size_t s = 0; s < cfg.seeds.size(); ++s) jobs.push_back(Job{p, h, s});
    }
  }
  bundle.traces.resize(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const auto& job = jobs[i];
    bundle.traces[i] = run_episode(cfg.environment, cfg.policies[job.policy],
                                   cfg.horizons[job.horizon], cfg.seeds[job.seed], cfg.stride);
  });

  const double theta_star = bundle.oracle.theta_star;
  const auto per_batch = cfg.seeds.size();
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    PolicySlope slope{policy_label(cfg.policies[p]), {}};
    for (std::size_t h = 0; h < cfg.horizons.size(); ++h) {
      const auto offset = (p * cfg.horizons.size() + h) * per_batch;
      const std::span<const EpisodeTrace> batch(bundle.traces.data() + offset, per_batch);
      bundle.summaries.push_back(summarize_episodes(batch, theta_star));
      slope.result.horizons.push_back(cfg.horizons[h]);
      slope.result.mean_gaps.push_back(bundle.summaries.back().mean_gap);
    }
    if (cfg.horizons.size() >= 3) {
      const auto& gaps = slope.result.mean_gaps;
      if (std::none_of(gaps.begin(), gaps.end(), [](double g) { return g == 0.0; })) {
        std::vector<double> xs(cfg.horizons.begin(), cfg.horizons.end());
        slope.result.slope = fit_loglog_slope(xs, gaps);
      }
      bundle.slopes.push_back(std::move(slope));
    }
  }
  return bundle;
}

json oracle_json(const OutputBundle& bundle) {
  json doc;
  doc["environment"] = bundle.config.environment_name;
  doc["theta_star"] = bundle.oracle.theta_star;
  doc["policy"] = bundle.oracle.policy.action;
  doc["iterations"] = bundle.oracle.iterations;
  doc["iterates"] = bundle.oracle.trace;
  if (bundle.brute_force_theta_star) {
    doc["brute_force_theta_star"] = *bundle.brute_force_theta_star;
  } else {
    doc["brute_force_theta_star"] = nullptr;
  }
  json maps = json::array();
  for (const auto& m : bundle.map_ratios) {
    maps.push_back({{"name", m.name}, {"map", m.map.action}, {"expected_ratio", m.ratio}});
  }
  doc["map_ratios"] = std::move(maps);
  return doc;
}

json summary_json(const OutputBundle& bundle) {
  json doc;
  doc["environment"] = bundle.config.environment_name;
  doc["theta_star"] = rounded(bundle.oracle.theta_star);
  doc["optimal_map"] = bundle.oracle.policy.action;
  json maps = json::array();
  for (const auto& m : bundle.map_ratios) {
    maps.push_back({{"name", m.name}, {"map", m.map.action}, {"expected_ratio", rounded(m.ratio)}});
  }
  doc["map_ratios"] = std::move(maps);
  json rows = json::array();
  for (const auto& s : bundle.summaries) {
    rows.push_back({{"policy", s.policy},
                    {"horizon", s.horizon},
                    {"replications", s.replications},
                    {"mean_ratio", rounded(s.mean_ratio)},
                    {"std_ratio", rounded(s.std_ratio)},
                    {"mean_gap", rounded(s.mean_gap)},
                    {"std_gap", rounded(s.std_gap)},
                    {"mean_regret", rounded(s.mean_regret)}});
  }
  doc["replications"] = std::move(rows);
  json slopes = json::array();
  for (const auto& ps : bundle.slopes) {
    json gaps = json::array();
    for (const double g : ps.result.mean_gaps) gaps.push_back(rounded(g));
    json entry{{"policy", ps.policy}, {"horizons", ps.result.horizons}, {"mean_gaps", gaps}};
    if (ps.result.slope) {
      entry["slope"] = rounded(*ps.result.slope);
    } else {
      entry["slope"] = nullptr;
      entry["note"] = "converged below measurement floor";
    }
    slopes.push_back(std::move(entry));
  }
  doc["gap_slopes"] = std::move(slopes);
  return doc;
}

std::string summary_text(const OutputBundle& bundle) {
  const auto num = [](double v) { return format_number(rounded(v), kSummaryDigits); };
  std::ostringstream os;
  os << "environment: " << bundle.config.environment_name << "\n";
  os << "theta_star: " << num(bundle.oracle.theta_star) << "\n";
  os << "optimal_map: " << map_string(bundle.oracle.policy) << "\n\n";
  os << "expected ratio per map\n";
  for (const auto& m : bundle.map_ratios) {
    os << "  " << m.name << " " << map_string(m.map) << ": " << num(m.ratio) << "\n";
  }
  os << "\n";
  char line[512];
  std::snprintf(line, sizeof line, "%-16s %10s %6s %22s %22s %22s %22s\n", "policy", "horizon",
                "reps", "mean_ratio", "std_ratio", "mean_gap", "mean_regret");
  os << line;
  for (const auto& s : bundle.summaries) {
    std::snprintf(line, sizeof line, "%-16s %10zu %6zu %22s %22s %22s %22s\n", s.policy.c_str(),
                  s.horizon, s.replications, num(s.mean_ratio).c_str(), num(s.std_ratio).c_str(),
                  num(s.mean_gap).c_str(), num(s.mean_regret).c_str());
    os << line;
  }
  if (!bundle.slopes.empty()) {
    os << "\nlog-log slope of mean gap vs horizon\n";
    for (const auto& ps : bundle.slopes) {
      os << "  " << ps.policy << ": "
         << (ps.result.slope ? num(*ps.result.slope) : "converged below measurement floor") << "\n";
    }
  }
  return os.str();
}

std::string oracle_text(const ExperimentConfig& cfg, const OracleResult& oracle) {
  std::ostringstream os;
  os << "environment: " << cfg.environment_name << "\n";
  os << "theta_star: " << format_number(oracle.theta_star) << "\n";
  os << "optimal_map: " << map_string(oracle.policy) << "\n";
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

void write_outputs(const OutputBundle& bundle) {
  const fs::path root(bundle.config.output_dir);
  std::error_code ec;
  fs::create_directories(root / "traces", ec);
  if (ec) throw std::runtime_error("cannot create " + (root / "traces").string() + ": " + ec.message());
  for (const auto& trace : bundle.traces) {
    write_file_atomic((root / "traces" / (run_id(trace) + ".csv")).string(), trace_csv(trace));
  }
  write_file_atomic((root / "summary.txt").string(), summary_text(bundle));
  write_file_atomic((root / "summary.json").string(), summary_json(bundle).dump(2) + "\n");
  write_file_atomic((root / "oracle.json").string(), oracle_json(bundle).dump(2) + "\n");
  write_file_atomic((root / "config.resolved.json").string(),
                    config_to_json(bundle.config).dump(2) + "\n");
}

}  // namespace dolrm
