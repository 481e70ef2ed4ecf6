#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rcf/harness.hpp"
#include "rcf/version.hpp"

namespace fs = std::filesystem;

namespace {

rcf::ExperimentConfig load_config(const std::string& config_path,
                                  const std::string& scenario_name) {
  rcf::ExperimentConfig config;
  if (!scenario_name.empty()) config = rcf::scenario(scenario_name);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config: " + config_path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (!scenario_name.empty()) {
      // File fields override the scenario preset.
      nlohmann::json base = rcf::config_to_json(config);
      base.merge_patch(j);
      j = base;
    }
    config = rcf::config_from_json(j);
  }
  if (config_path.empty() && scenario_name.empty())
    throw std::invalid_argument("need --config and/or --scenario");
  return config;
}

int run_command(const std::string& config_path, const std::string& scenario_name,
                int trials, long long seed, int workers,
                const std::string& out_dir) {
  rcf::ExperimentConfig config;
  try {
    config = load_config(config_path, scenario_name);
    if (trials > 0) config.trials = trials;
    if (seed >= 0) config.base_seed = std::uint64_t(seed);
    if (workers > 0) config.workers = workers;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  fs::create_directories(out_dir);
  const auto started = std::chrono::steady_clock::now();
  try {
    if (config.sweep) {
      const auto summaries = rcf::run_sweep(config);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        started)
              .count();
      rcf::emit_sweep_csv(summaries, out_dir + "/sweep.csv");
      rcf::emit_json(config, summaries, wall, out_dir + "/results.json");
      std::cout << "wrote " << out_dir << "/sweep.csv and results.json\n";
    } else {
      const double t_lyap = rcf::lyapunov_time(config.system, config.base_seed);
      const auto results = rcf::run_trials(config, t_lyap);
      const auto summary = rcf::aggregate(results);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        started)
              .count();
      rcf::emit_trials_csv(results, out_dir + "/trials.csv");
      rcf::emit_json(config, {summary}, wall, out_dir + "/results.json");
      std::cout << "wrote " << out_dir << "/trials.csv and results.json\n";
      std::size_t failed = 0;
      for (const auto& r : results)
        if (r.failed) ++failed;
      if (2 * failed > results.size()) {
        std::cerr << "runtime failure in more than half of the trials\n";
        return 3;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RC / NGRC / hybrid time-series forecasting experiments"};
  app.set_version_flag("--version", std::string(rcf::kBuildVersion));
  app.require_subcommand(1);

  std::string config_path, scenario_name, out_dir = ".", out_file;
  int trials = 0, workers = 0;
  long long seed = -1;

  auto* run = app.add_subcommand("run", "run an experiment or sweep");
  run->add_option("--config", config_path, "JSON experiment configuration");
  run->add_option("--scenario", scenario_name, "named scenario preset");
  run->add_option("--trials", trials, "override trial count");
  run->add_option("--seed", seed, "override base seed");
  run->add_option("--workers", workers, "worker pool size");
  run->add_option("--out", out_dir, "output directory");

  auto* list = app.add_subcommand("list-scenarios", "print scenario names");

  auto* psd = app.add_subcommand("psd", "export Welch spectra for one trial");
  psd->add_option("--config", config_path, "JSON experiment configuration");
  psd->add_option("--scenario", scenario_name, "named scenario preset");
  psd->add_option("--out", out_file, "output file prefix")->required();

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    for (const auto& name : rcf::scenario_names()) std::cout << name << "\n";
    return 0;
  }
  if (psd->parsed()) {
    try {
      rcf::ExperimentConfig config = load_config(config_path, scenario_name);
      std::string prefix = out_file;
      if (prefix.size() > 4 && prefix.substr(prefix.size() - 4) == ".csv")
        prefix = prefix.substr(0, prefix.size() - 4);
      rcf::export_psd(config, prefix);
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "runtime error: " << e.what() << "\n";
      return 3;
    }
    return 0;
  }
  return run_command(config_path, scenario_name, trials, seed, workers, out_dir);
}
