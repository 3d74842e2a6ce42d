#include "dolrm/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <tuple>
#include <set>

namespace dolrm {

using nlohmann::json;

namespace {

std::string quote(const std::string& s) { return "\"" + s + "\""; }

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

std::string type_name(const json& j) { return j.type_name(); }

const json& require(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing required key " + quote(key));
  return *it;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number, got " + type_name(j));
  return j.get<double>();
}

std::uint64_t as_unsigned(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  fail(path, "expected a non-negative integer, got " + (j.is_number_integer() ? std::string("negative integer") : type_name(j)));
}

std::size_t as_positive(const json& j, const std::string& path) {
  const auto v = as_unsigned(j, path);
  if (v == 0) fail(path, "must be at least 1");
  return static_cast<std::size_t>(v);
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string, got " + type_name(j));
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array, got " + type_name(j));
  return j;
}

const json& as_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object, got " + type_name(j));
  return j;
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

PolicyMap parse_map(const json& j, const std::string& path) {
  PolicyMap map;
  const auto& arr = as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    map.action.push_back(static_cast<std::size_t>(as_unsigned(arr[i], index_path(path, i))));
  }
  return map;
}

template <typename F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

CostNoise parse_cost_noise(const json& j, const std::string& path) {
  const auto name = as_string(j, path);
  return with_path(path, [&] { return cost_noise_from_string(name); });
}

RateMode parse_rate(const json& j, const std::string& path) {
  const auto name = as_string(j, path);
  return with_path(path, [&] { return rate_mode_from_string(name); });
}

void apply_noise_keys(const json& obj, EnvironmentSpec& spec, const std::string& path) {
  if (obj.contains("noise_sigma")) spec.noise_sigma = as_number(obj["noise_sigma"], path + ".noise_sigma");
  if (obj.contains("cost_floor")) spec.cost_floor = as_number(obj["cost_floor"], path + ".cost_floor");
  if (obj.contains("cost_noise")) spec.cost_noise = parse_cost_noise(obj["cost_noise"], path + ".cost_noise");
}

void parse_environment(const json& j, const std::string& path, ExperimentConfig& cfg) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    const auto& preset = with_path(path, [&]() -> const Preset& { return find_preset(name); });
    cfg.environment_name = preset.name;
    cfg.environment = preset.spec;
    cfg.maps = preset.maps;
    return;
  }
  const auto& obj = as_object(j, path);
  if (obj.contains("preset")) {
    reject_unknown_keys(obj, {"preset", "noise_sigma", "cost_floor", "cost_noise"}, path);
    parse_environment(obj["preset"], path + ".preset", cfg);
    apply_noise_keys(obj, cfg.environment, path);
    return;
  }
  reject_unknown_keys(obj,
                      {"name", "arrival_probs", "arms", "noise_sigma", "cost_floor", "cost_noise",
                       "maps"},
                      path);
  EnvironmentSpec spec;
  const auto probs_path = path + ".arrival_probs";
  const auto& probs = as_array(require(obj, "arrival_probs", path), probs_path);
  for (std::size_t s = 0; s < probs.size(); ++s) {
    spec.arrival_probs.push_back(as_number(probs[s], index_path(probs_path, s)));
  }
  const auto arms_path = path + ".arms";
  const auto& arms = as_array(require(obj, "arms", path), arms_path);
  for (std::size_t s = 0; s < arms.size(); ++s) {
    const auto type_path = index_path(arms_path, s);
    std::vector<ArmMeans> type_arms;
    for (std::size_t a = 0; a < as_array(arms[s], type_path).size(); ++a) {
      const auto arm_path = index_path(type_path, a);
      const auto& pair = as_array(arms[s][a], arm_path);
      if (pair.size() != 2) fail(arm_path, "expected a [reward, cost] pair");
      type_arms.push_back(ArmMeans{as_number(pair[0], index_path(arm_path, 0)),
                                   as_number(pair[1], index_path(arm_path, 1))});
    }
    spec.arms.push_back(std::move(type_arms));
  }
  apply_noise_keys(obj, spec, path);
  cfg.environment_name = obj.contains("name") ? as_string(obj["name"], path + ".name") : "inline";
  cfg.environment = std::move(spec);
  cfg.maps.clear();
  if (obj.contains("maps")) {
    const auto maps_path = path + ".maps";
    const auto& maps = obj["maps"];
    if (maps.is_array()) {
      for (std::size_t i = 0; i < maps.size(); ++i) {
        const auto entry_path = index_path(maps_path, i);
        const auto& entry = as_object(maps[i], entry_path);
        reject_unknown_keys(entry, {"name", "map"}, entry_path);
        cfg.maps.push_back(NamedMap{as_string(require(entry, "name", entry_path), entry_path + ".name"),
                                    parse_map(require(entry, "map", entry_path), entry_path + ".map")});
      }
    } else {
      for (const auto& [name, value] : as_object(maps, maps_path).items()) {
        cfg.maps.push_back(NamedMap{name, parse_map(value, maps_path + "." + name)});
      }
    }
  }
}

const PolicyMap& lookup_map(const ExperimentConfig& cfg, const std::string& name,
                            const std::string& path) {
  for (const auto& m : cfg.maps) {
    if (m.name == name) return m.map;
  }
  std::string known;
  for (const auto& m : cfg.maps) known += (known.empty() ? "" : ", ") + m.name;
  fail(path, "unknown policy map " + quote(name) + " (known: " + known + ")");
}

PolicyKind parse_policy(const json& j, const std::string& path, const ExperimentConfig& cfg) {
  std::string kind;
  RateMode rate = cfg.learning_rate;
  if (j.is_string()) {
    kind = j.get<std::string>();
    if (kind.rfind("fixed:", 0) == 0) {
      const auto name = kind.substr(6);
      return FixedMapKind{name, lookup_map(cfg, name, path)};
    }
  } else {
    const auto& obj = as_object(j, path);
    reject_unknown_keys(obj, {"kind", "learning_rate", "map", "name"}, path);
    kind = as_string(require(obj, "kind", path), path + ".kind");
    if (obj.contains("learning_rate")) rate = parse_rate(obj["learning_rate"], path + ".learning_rate");
    if (kind == "fixed") {
      const auto& map_json = require(obj, "map", path);
      if (map_json.is_string()) {
        const auto name = map_json.get<std::string>();
        return FixedMapKind{name, lookup_map(cfg, name, path + ".map")};
      }
      const auto name = obj.contains("name") ? as_string(obj["name"], path + ".name") : "custom";
      return FixedMapKind{name, parse_map(map_json, path + ".map")};
    }
  }
  if (kind == "dolrm" || kind == "dol-rm") return DolRmKind{rate};
  if (kind == "ucb") return ClassicUcbKind{};
  if (kind == "ts") return ThompsonKind{};
  if (kind == "oracle-rm") return OracleRmKind{rate};
  fail(path, "unknown policy kind " + quote(kind) +
                 " (expected dolrm, ucb, ts, oracle-rm, fixed or fixed:<map>)");
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

EnvironmentSpec two_type(double p, double q) {
  return EnvironmentSpec{{p, q}, {{{3.0, 1.0}}, {{3.0, 2.0}, {1.0, 1.0}}}};
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;
  // Literal complements: 1.0 - 0.8 is not the double nearest 0.2.
  for (const auto& [name, p, q] :
       {std::tuple{"two-type-p08", 0.8, 0.2}, std::tuple{"two-type-p06", 0.6, 0.4}}) {
    Preset preset{name,
                  "two task types, first type arriving with probability " + format_p(p),
                  two_type(p, q),
                  {}};
    // Type 1 arm 0 is the (3, 2) decision, arm 1 the (1, 1) decision.
    preset.maps = {{"greedy", PolicyMap{{0, 0}}}, {"reverse", PolicyMap{{0, 1}}}};
    out.push_back(std::move(preset));
  }
  Preset seven{"seven-type",
               "seven task types with one or two decisions each",
               EnvironmentSpec{{0.3, 0.1, 0.2, 0.1, 0.05, 0.1, 0.15},
                               {{{3.0, 1.0}},
                                {{3.0, 2.0}, {1.0, 1.0}},
                                {{2.0, 1.0}},
                                {{2.5, 1.5}},
                                {{2.0, 1.0}, {1.0, 1.0}},
                                {{3.0, 2.0}, {1.5, 1.5}},
                                {{2.5, 1.0}}}},
               {}};
  seven.maps = {{"greedy", greedy_map(seven.spec)}};
  out.push_back(std::move(seven));
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw std::invalid_argument("unknown preset " + quote(name) + " (known: " + known + ")");
}

PolicyMap greedy_map(const EnvironmentSpec& spec) {
  PolicyMap map;
  for (const auto& type_arms : spec.arms) {
    std::vector<double> ratios;
    for (const auto& m : type_arms) ratios.push_back(m.reward / m.cost);
    map.action.push_back(argmax_lowest(ratios));
  }
  return map;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  const std::string root = "config";
  const auto& obj = as_object(doc, root);
  reject_unknown_keys(obj,
                      {"environment", "noise_sigma", "policies", "horizon", "horizons", "seeds",
                       "learning_rate", "output_dir", "stride", "threads"},
                      root);
  ExperimentConfig cfg;

  parse_environment(require(obj, "environment", root), root + ".environment", cfg);
  if (obj.contains("noise_sigma")) {
    cfg.environment.noise_sigma = as_number(obj["noise_sigma"], root + ".noise_sigma");
  }
  with_path(root + ".environment", [&] { return validate_env(cfg.environment); });
  const bool has_greedy = std::any_of(cfg.maps.begin(), cfg.maps.end(),
                                      [](const NamedMap& m) { return m.name == "greedy"; });
  if (!has_greedy) cfg.maps.insert(cfg.maps.begin(), NamedMap{"greedy", greedy_map(cfg.environment)});
  for (const auto& m : cfg.maps) {
    with_path(root + ".environment.maps." + m.name, [&] {
      validate_map(cfg.environment, m.map);
      return 0;
    });
  }

  if (obj.contains("learning_rate")) {
    cfg.learning_rate = parse_rate(obj["learning_rate"], root + ".learning_rate");
  }

  const auto& policies = as_array(require(obj, "policies", root), root + ".policies");
  if (policies.empty()) fail(root + ".policies", "at least one policy is required");
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const auto path = index_path(root + ".policies", i);
    auto kind = parse_policy(policies[i], path, cfg);
    if (const auto* fixed = std::get_if<FixedMapKind>(&kind)) {
      with_path(path, [&] {
        validate_map(cfg.environment, fixed->map);
        return 0;
      });
    }
    cfg.policies.push_back(std::move(kind));
  }

  const bool has_horizon = obj.contains("horizon");
  const bool has_horizons = obj.contains("horizons");
  if (has_horizon == has_horizons) fail(root, "exactly one of \"horizon\" or \"horizons\" is required");
  if (has_horizon) {
    cfg.horizons.push_back(as_positive(obj["horizon"], root + ".horizon"));
  } else {
    const auto path = root + ".horizons";
    const auto& arr = as_array(obj["horizons"], path);
    if (arr.empty()) fail(path, "at least one horizon is required");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      cfg.horizons.push_back(as_positive(arr[i], index_path(path, i)));
      if (i > 0 && cfg.horizons[i] <= cfg.horizons[i - 1]) {
        fail(index_path(path, i), "horizons must be strictly increasing");
      }
    }
  }

  if (!obj.contains("seeds")) {
    for (std::size_t i = 0; i < kDefaultSeedCount; ++i) cfg.seeds.push_back(kDefaultBaseSeed + i);
  } else if (obj["seeds"].is_array()) {
    const auto path = root + ".seeds";
    for (std::size_t i = 0; i < obj["seeds"].size(); ++i) {
      cfg.seeds.push_back(as_unsigned(obj["seeds"][i], index_path(path, i)));
    }
    if (cfg.seeds.empty()) fail(path, "at least one seed is required");
  } else {
    const auto path = root + ".seeds";
    const auto& seeds = as_object(obj["seeds"], path);
    reject_unknown_keys(seeds, {"count", "base"}, path);
    const auto count = seeds.contains("count") ? as_positive(seeds["count"], path + ".count")
                                               : kDefaultSeedCount;
    const auto base = seeds.contains("base") ? as_unsigned(seeds["base"], path + ".base")
                                             : kDefaultBaseSeed;
    for (std::size_t i = 0; i < count; ++i) cfg.seeds.push_back(base + i);
  }

  if (obj.contains("output_dir")) cfg.output_dir = as_string(obj["output_dir"], root + ".output_dir");
  if (obj.contains("stride")) cfg.stride = static_cast<std::size_t>(as_unsigned(obj["stride"], root + ".stride"));
  if (obj.contains("threads")) cfg.threads = static_cast<unsigned>(as_unsigned(obj["threads"], root + ".threads"));
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  json env;
  env["name"] = cfg.environment_name;
  env["arrival_probs"] = cfg.environment.arrival_probs;
  json arms = json::array();
  for (const auto& type_arms : cfg.environment.arms) {
    json t = json::array();
    for (const auto& m : type_arms) t.push_back({m.reward, m.cost});
    arms.push_back(std::move(t));
  }
  env["arms"] = std::move(arms);
  env["noise_sigma"] = cfg.environment.noise_sigma;
  env["cost_floor"] = cfg.environment.cost_floor;
  env["cost_noise"] = to_string(cfg.environment.cost_noise);
  // Array form keeps the map order; json objects would sort by name.
  json maps = json::array();
  for (const auto& m : cfg.maps) maps.push_back({{"name", m.name}, {"map", m.map.action}});
  env["maps"] = std::move(maps);

  json policies = json::array();
  for (const auto& kind : cfg.policies) {
    struct Visitor {
      json operator()(const DolRmKind& k) const {
        return {{"kind", "dolrm"}, {"learning_rate", to_string(k.rate)}};
      }
      json operator()(const FixedMapKind& k) const {
        return {{"kind", "fixed"}, {"name", k.name}, {"map", k.map.action}};
      }
      json operator()(const ClassicUcbKind&) const { return {{"kind", "ucb"}}; }
      json operator()(const ThompsonKind&) const { return {{"kind", "ts"}}; }
      json operator()(const OracleRmKind& k) const {
        return {{"kind", "oracle-rm"}, {"learning_rate", to_string(k.rate)}};
      }
    };
    policies.push_back(std::visit(Visitor{}, kind));
  }

  json doc;
  doc["environment"] = std::move(env);
  doc["policies"] = std::move(policies);
  doc["horizons"] = cfg.horizons;
  doc["seeds"] = cfg.seeds;
  doc["learning_rate"] = to_string(cfg.learning_rate);
  doc["output_dir"] = cfg.output_dir;
  doc["stride"] = cfg.stride;
  doc["threads"] = cfg.threads;
  return doc;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace dolrm
