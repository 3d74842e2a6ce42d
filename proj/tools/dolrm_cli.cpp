#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dolrm/config.hpp"
#include "dolrm/experiment.hpp"
#include "dolrm/oracle.hpp"

namespace {

std::string arms_string(const dolrm::EnvironmentSpec& spec) {
  std::string out = "{";
  for (std::size_t s = 0; s < spec.arms.size(); ++s) {
    out += s ? ", [" : "[";
    for (std::size_t a = 0; a < spec.arms[s].size(); ++a) {
      out += (a ? ", (" : "(") + dolrm::format_number(spec.arms[s][a].reward, 6) + "," +
             dolrm::format_number(spec.arms[s][a].cost, 6) + ")";
    }
    out += "]";
  }
  return out + "}";
}

int list_presets() {
  for (const auto& p : dolrm::presets()) {
    std::cout << p.name << "\n  " << p.description << "\n  arrival_probs {";
    for (std::size_t s = 0; s < p.spec.arrival_probs.size(); ++s) {
      std::cout << (s ? ", " : "") << dolrm::format_number(p.spec.arrival_probs[s], 6);
    }
    std::cout << "}\n  arms " << arms_string(p.spec) << "\n  maps";
    for (const auto& m : p.maps) {
      std::cout << " " << m.name << "=" << dolrm::format_number(dolrm::expected_ratio(p.spec, m.map), 12);
    }
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-to-cost ratio scheduling experiments (DOL-RM and baselines)"};
  app.require_subcommand(1);

  std::string run_path;
  auto* run = app.add_subcommand("run", "Run every (policy, horizon, seed) episode and write outputs");
  run->add_option("config", run_path, "Experiment config (JSON)")->required();

  std::string oracle_path;
  auto* oracle = app.add_subcommand("oracle", "Print the optimal ratio and policy map");
  oracle->add_option("config", oracle_path, "Experiment config (JSON)")->required();

  app.add_subcommand("presets", "List built-in environments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = dolrm::parse_config(run_path);
      const auto bundle = dolrm::run_experiment(cfg);
      dolrm::write_outputs(bundle);
      std::cout << dolrm::summary_text(bundle);
      std::cout << "\nwrote " << bundle.traces.size() << " traces to " << cfg.output_dir << "\n";
      return 0;
    }
    if (*oracle) {
      const auto cfg = dolrm::parse_config(oracle_path);
      std::cout << dolrm::oracle_text(cfg, dolrm::dinkelbach_theta_star(cfg.environment));
      return 0;
    }
    return list_presets();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
