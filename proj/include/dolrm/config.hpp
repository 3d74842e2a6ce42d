#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dolrm/env.hpp"
#include "dolrm/policy.hpp"

namespace dolrm {

/// Configuration problem; the message starts with the path of the key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedMap {
  std::string name;
  PolicyMap map;

  bool operator==(const NamedMap&) const = default;
};

/// A built-in environment together with the policy maps named for it.
struct Preset {
  std::string name;
  std::string description;
  EnvironmentSpec spec;
  std::vector<NamedMap> maps;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

/// Per-type argmax of r / c, lowest index on ties.
PolicyMap greedy_map(const EnvironmentSpec& spec);

inline constexpr std::size_t kDefaultSeedCount = 20;
inline constexpr std::uint64_t kDefaultBaseSeed = 1;

struct ExperimentConfig {
  /// Preset name, or "inline" for an environment given in full.
  std::string environment_name = "inline";
  EnvironmentSpec environment;
  std::vector<NamedMap> maps;
  std::vector<PolicyKind> policies;
  std::vector<std::size_t> horizons;
  std::vector<std::uint64_t> seeds;
  RateMode learning_rate = RateMode::kDecaying;
  std::string output_dir = "results";
  /// 0 selects the harness default for each horizon.
  std::size_t stride = 0;
  /// 0 selects hardware concurrency.
  unsigned threads = 0;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Builds a fully resolved config: presets expanded, named maps looked up,
/// defaults filled in (sigma 1, 20 seeds from base 1, decaying rate).
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Resolved echo; config_from_json(config_to_json(c)) == c.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

ExperimentConfig parse_config(const std::string& path);

}  // namespace dolrm
