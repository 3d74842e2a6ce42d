#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dolrm/config.hpp"
#include "dolrm/experiment.hpp"
#include "support.hpp"

using namespace dolrm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_of(const json& doc) {
  try {
    config_from_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dolrm-test-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("presets match the published environments digit for digit") {
  const auto& p08 = find_preset("two-type-p08");
  CHECK(p08.spec == testing::two_type(0.8));
  CHECK(p08.spec.arrival_probs == std::vector<double>{0.8, 0.2});
  CHECK(p08.spec.noise_sigma == 1.0);
  const auto& p06 = find_preset("two-type-p06");
  CHECK(p06.spec.arrival_probs == std::vector<double>{0.6, 0.4});
  CHECK(p06.spec.arms == p08.spec.arms);
  const auto& seven = find_preset("seven-type");
  CHECK(seven.spec == testing::seven_type());
  double total = 0.0;
  for (const double p : seven.spec.arrival_probs) total += p;
  CHECK(std::abs(total - 1.0) <= 1e-12);
  for (const auto& p : presets()) CHECK_NOTHROW(validate_env(p.spec));
  CHECK_THROWS_AS(find_preset("three-type"), std::invalid_argument);
}

TEST_CASE("greedy_map picks the best per-type ratio") {
  CHECK(greedy_map(testing::two_type(0.8)) == testing::kGreedy);
  CHECK(greedy_map(testing::seven_type()) == PolicyMap{{0, 0, 0, 0, 0, 0, 0}});
}

TEST_CASE("preset expansion and defaults") {
  const auto cfg = config_from_json(json{{"environment", "two-type-p08"},
                                         {"policies", {"dolrm"}},
                                         {"horizon", 1000}});
  CHECK(cfg.environment_name == "two-type-p08");
  CHECK(cfg.environment.arrival_probs == std::vector<double>{0.8, 0.2});
  CHECK(cfg.environment.arms[1][1] == ArmMeans{1.0, 1.0});
  CHECK(cfg.environment.noise_sigma == 1.0);
  CHECK(cfg.seeds.size() == 20);
  CHECK(cfg.seeds.front() == 1);
  CHECK(cfg.learning_rate == RateMode::kDecaying);
  CHECK(cfg.stride == 0);
  CHECK(cfg.horizons == std::vector<std::size_t>{1000});
  CHECK(std::get<DolRmKind>(cfg.policies[0]).rate == RateMode::kDecaying);

  const auto seven = config_from_json(json{{"environment", "seven-type"},
                                           {"policies", {"ts"}},
                                           {"horizons", {100, 200, 400}},
                                           {"seeds", {{"count", 1}}}});
  CHECK(seven.environment.num_types() == 7);
  CHECK(seven.seeds == std::vector<std::uint64_t>{1});
}

TEST_CASE("policy forms") {
  const auto cfg = config_from_json(json::parse(R"({
    "environment": {"preset": "two-type-p06", "noise_sigma": 0.5},
    "learning_rate": "fixed-sqrtT",
    "policies": ["dol-rm", "ucb", "ts", "oracle-rm", "fixed:reverse",
                 {"kind": "fixed", "map": "greedy"},
                 {"kind": "fixed", "map": [0, 1], "name": "mine"},
                 {"kind": "dolrm", "learning_rate": "decaying"}],
    "horizon": 10,
    "seeds": [5, 9],
    "stride": 3,
    "output_dir": "/tmp/x"
  })"));
  CHECK(cfg.environment.noise_sigma == 0.5);
  CHECK(cfg.environment.arrival_probs == std::vector<double>{0.6, 0.4});
  REQUIRE(cfg.policies.size() == 8);
  CHECK(std::get<DolRmKind>(cfg.policies[0]).rate == RateMode::kFixedSqrtT);
  CHECK(std::holds_alternative<ClassicUcbKind>(cfg.policies[1]));
  CHECK(std::holds_alternative<ThompsonKind>(cfg.policies[2]));
  CHECK(std::get<OracleRmKind>(cfg.policies[3]).rate == RateMode::kFixedSqrtT);
  CHECK(std::get<FixedMapKind>(cfg.policies[4]).map == testing::kReverse);
  CHECK(std::get<FixedMapKind>(cfg.policies[5]).map == testing::kGreedy);
  CHECK(std::get<FixedMapKind>(cfg.policies[6]).name == "mine");
  CHECK(std::get<DolRmKind>(cfg.policies[7]).rate == RateMode::kDecaying);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{5, 9});
  CHECK(cfg.stride == 3);
}

TEST_CASE("diagnostics carry the path to the offending key") {
  const json base{{"environment", "two-type-p08"}, {"policies", {"dolrm"}}, {"horizon", 10}};

  auto doc = base;
  doc["environment"] = "four-type";
  CHECK(error_of(doc).find("config.environment: unknown preset \"four-type\"") == 0);

  doc = base;
  doc.erase("policies");
  CHECK(error_of(doc).find("config: missing required key \"policies\"") == 0);

  doc = base;
  doc["horizon"] = "long";
  CHECK(error_of(doc).find("config.horizon: expected a non-negative integer") == 0);

  doc = base;
  doc["policies"] = json::array({"dolrm", {{"kind", "exp3"}}});
  CHECK(error_of(doc).find("config.policies[1]: unknown policy kind \"exp3\"") == 0);

  doc = base;
  doc["policies"] = json::array();
  CHECK(error_of(doc).find("config.policies: at least one policy") == 0);

  doc = base;
  doc["policies"] = json::array({"fixed:sideways"});
  CHECK(error_of(doc).find("unknown policy map \"sideways\"") != std::string::npos);

  doc = base;
  doc["environment"] = json::parse(R"({"arrival_probs": [0.5, 0.5], "arms": [[[1, 1]], [[1, "x"]]]})");
  CHECK(error_of(doc).find("config.environment.arms[1][0][1]: expected a number") == 0);

  doc = base;
  doc["environment"] = json::parse(R"({"arrival_probs": [0.5, 0.6], "arms": [[[1, 1]], [[1, 1]]]})");
  CHECK(error_of(doc).find("config.environment: arrival_probs sum 1.1") == 0);

  doc = base;
  doc["horizons"] = {10, 20};
  CHECK(error_of(doc).find("exactly one of") != std::string::npos);

  doc = base;
  doc.erase("horizon");
  doc["horizons"] = {10, 10, 20};
  CHECK(error_of(doc).find("config.horizons[1]: horizons must be strictly increasing") == 0);

  doc = base;
  doc["learning_rate"] = "constant";
  CHECK(error_of(doc).find("config.learning_rate: unknown learning-rate mode") == 0);

  doc = base;
  doc["sigma"] = 1.0;
  CHECK(error_of(doc).find("config.sigma: unknown key") == 0);

  doc = base;
  doc["policies"] = json::array({{{"kind", "fixed"}, {"map", {0, 3}}}});
  CHECK(error_of(doc).find("config.policies[0]: policy map action[1]") == 0);

  CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("resolved config round-trips through its JSON echo") {
  const auto seven = config_from_json(json{{"environment", "seven-type"},
                                           {"policies", {"dolrm", "ts", "fixed:greedy"}},
                                           {"horizons", {100, 400, 1600}},
                                           {"seeds", {{"count", 3}, {"base", 40}}}});
  CHECK(config_from_json(config_to_json(seven)) == seven);

  const auto inline_cfg = config_from_json(json::parse(R"({
    "environment": {"name": "custom", "arrival_probs": [0.25, 0.75],
                    "arms": [[[1.5, 0.5], [2, 1]], [[4, 3]]],
                    "cost_floor": 0.001, "cost_noise": "clip",
                    "maps": {"zeta": [1, 0], "alpha": [0, 0]}},
    "noise_sigma": 0.3,
    "policies": [{"kind": "fixed", "map": "zeta"}, {"kind": "oracle-rm", "learning_rate": "fixed-sqrtT"}],
    "horizon": 77, "stride": 5, "threads": 2, "output_dir": "elsewhere"
  })"));
  CHECK(inline_cfg.environment.cost_noise == CostNoise::kClip);
  CHECK(inline_cfg.maps.front().name == "greedy");
  CHECK(config_from_json(config_to_json(inline_cfg)) == inline_cfg);

  const auto dir = scratch_dir("roundtrip");
  fs::create_directories(dir);
  write_file_atomic((dir / "cfg.json").string(), config_to_json(inline_cfg).dump(2));
  CHECK(parse_config((dir / "cfg.json").string()) == inline_cfg);
  fs::remove_all(dir);
}

TEST_CASE("trace CSV schema") {
  const auto trace = run_episode(testing::two_type(0.8), DolRmKind{}, 10, 3, 1);
  const auto csv = trace_csv(trace);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "run_id,policy,t,type,arm,reward,cost,cum_reward,cum_cost,ratio,theta");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("dolrm-T10-seed3,dolrm,", 0) == 0);
    CHECK(line.back() != ',');
  }
  CHECK(rows == 10);

  const auto ucb = trace_csv(run_episode(testing::two_type(0.8), ClassicUcbKind{}, 10, 3, 1));
  std::istringstream uin(ucb);
  std::getline(uin, line);
  while (std::getline(uin, line)) CHECK(line.back() == ',');

  CHECK(format_number(2.6) == "2.6000000000000001");
  CHECK(format_number(1.0 / 3.0, 12) == "0.333333333333");
  EpisodeTrace fixed;
  fixed.policy = "fixed:reverse";
  fixed.horizon = 5;
  fixed.seed = 2;
  CHECK(run_id(fixed) == "fixed_reverse-T5-seed2");
}

TEST_CASE("run_experiment reports exact map ratios and writes a reproducible bundle") {
  const auto dir = scratch_dir("bundle");
  auto doc = json{{"environment", {{"preset", "two-type-p08"}, {"noise_sigma", 0.0}}},
                  {"policies", {"fixed:greedy", "fixed:reverse", "dolrm", "ucb"}},
                  {"horizons", {50, 100, 200}},
                  {"seeds", {{"count", 2}}},
                  {"stride", 1},
                  {"output_dir", dir.string()}};
  const auto cfg = config_from_json(doc);
  const auto bundle = run_experiment(cfg);
  CHECK(bundle.oracle.theta_star == doctest::Approx(2.6).epsilon(1e-15));
  REQUIRE(bundle.brute_force_theta_star.has_value());
  REQUIRE(bundle.map_ratios.size() == 2);
  CHECK(bundle.map_ratios[0].name == "greedy");
  CHECK(std::abs(bundle.map_ratios[0].ratio - 2.5) <= 1e-12);
  CHECK(bundle.map_ratios[1].name == "reverse");
  CHECK(std::abs(bundle.map_ratios[1].ratio - 2.6) <= 1e-12);
  CHECK(bundle.traces.size() == 4 * 3 * 2);
  CHECK(bundle.summaries.size() == 4 * 3);
  CHECK(bundle.slopes.size() == 4);

  write_outputs(bundle);
  const auto trace_path = dir / "traces" / "dolrm-T200-seed2.csv";
  REQUIRE(fs::exists(trace_path));
  const auto first = slurp(trace_path);
  CHECK(std::count(first.begin(), first.end(), '\n') == 201);
  for (const auto* name : {"summary.txt", "summary.json", "oracle.json", "config.resolved.json"}) {
    CHECK(fs::exists(dir / name));
  }
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    CHECK(entry.path().extension() != ".tmp");
  }

  const auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary["map_ratios"][1]["expected_ratio"].get<double>() == doctest::Approx(2.6).epsilon(1e-14));
  const auto text = slurp(dir / "summary.txt");
  for (const auto& row : summary["replications"]) {
    CHECK(text.find(format_number(row["mean_ratio"].get<double>(), 15)) != std::string::npos);
  }
  const auto oracle = json::parse(slurp(dir / "oracle.json"));
  CHECK(oracle["policy"] == json({0, 1}));
  CHECK(parse_config((dir / "config.resolved.json").string()) == cfg);

  const auto again = run_experiment(cfg);
  fs::remove_all(dir);
  write_outputs(again);
  CHECK(slurp(trace_path) == first);
  fs::remove_all(dir);
}

TEST_CASE("run_experiment refuses an empty policy list") {
  auto cfg = config_from_json(json{{"environment", "two-type-p08"}, {"policies", {"dolrm"}}, {"horizon", 10}});
  cfg.policies.clear();
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}
