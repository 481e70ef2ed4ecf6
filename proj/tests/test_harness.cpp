#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rcf/harness.hpp"

using namespace rcf;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig config;
  config.trajectory.n_train = 600;
  config.trajectory.n_predict = 100;
  config.reservoir.n_nodes = 20;
  config.reservoir.n_warmup = 50;
  config.base_seed = 12345;
  config.trials = 3;
  return config;
}

bool same_results(const std::vector<TrialResult>& a,
                  const std::vector<TrialResult>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].trial != b[i].trial || a[i].seed != b[i].seed ||
        a[i].model != b[i].model || a[i].vpt_lyap != b[i].vpt_lyap ||
        a[i].diverged != b[i].diverged || a[i].failed != b[i].failed)
      return false;
  }
  return true;
}

std::string first_line(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("aggregate arithmetic") {
  std::vector<TrialResult> results;
  for (int i = 0; i < 4; ++i) {
    TrialResult r;
    r.trial = i;
    r.model = ModelVariant::RC;
    r.vpt_lyap = double(i + 1);
    results.push_back(r);
  }
  const SweepSummary summary = aggregate(results);
  REQUIRE(summary.stats.size() == 1);
  const ModelStats& stats = summary.stats[0].second;
  CHECK(stats.n_trials == 4);
  CHECK(stats.vpt_mean == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(stats.vpt_median == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(stats.vpt_stderr == doctest::Approx(0.6455).epsilon(1e-3));
  CHECK(stats.vpt_q1 == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(stats.vpt_q3 == doctest::Approx(3.25).epsilon(1e-12));
  CHECK(stats.diverged_frac == 0.0);
}

TEST_CASE("aggregate single-trial and divergence conventions") {
  TrialResult r;
  r.model = ModelVariant::NGRC;
  r.vpt_lyap = 1.5;
  r.diverged = true;
  r.mean_map_error = 99.0;
  const SweepSummary summary = aggregate({r});
  const ModelStats& stats = summary.stats[0].second;
  CHECK(stats.n_trials == 1);
  CHECK(stats.vpt_stderr == 0.0);
  CHECK(stats.diverged_frac == 1.0);
  // Diverged runs are excluded from the map-error mean.
  CHECK(!stats.map_err_mean.has_value());
  CHECK_THROWS(aggregate({}));
}

TEST_CASE("config json round trip") {
  ExperimentConfig config = tiny_config();
  config.sweep = SweepSpec{"trajectory.tau", {json(0.01), json(0.06)}};
  config.partial_state = {0};
  config.outputs.map_error = true;
  const json j = config_to_json(config);
  const ExperimentConfig back = config_from_json(j);
  CHECK(config_to_json(back) == j);
}

TEST_CASE("config accepts a bare system name") {
  const ExperimentConfig config = config_from_json(json{{"system", "rossler"}});
  CHECK(config.system.name == SystemName::Rossler);
  CHECK_THROWS(config_from_json(json{{"system", "unknown"}}));
  CHECK_THROWS(config_from_json(json{{"trials", 0}}));
}

TEST_CASE("apply_override reaches every documented path") {
  ExperimentConfig config;
  apply_override(config, "system", json("doublescroll"));
  CHECK(config.system.name == SystemName::DoubleScroll);
  apply_override(config, "trajectory.tau", json(0.03));
  CHECK(config.trajectory.tau == 0.03);
  apply_override(config, "reservoir.n_nodes", json(123));
  CHECK(config.reservoir.n_nodes == 123);
  apply_override(config, "ngrc.k", json(4));
  CHECK(config.ngrc.k == 4);
  apply_override(config, "training.beta", json(1e-5));
  CHECK(config.beta == 1e-5);
  apply_override(config, "training.noise_std", json(0.01));
  CHECK(config.noise_std == 0.01);
  CHECK_THROWS(apply_override(config, "reservoir.bogus", json(1)));
}

TEST_CASE("scenario closure over all presets") {
  const auto names = scenario_names();
  CHECK(names.size() == 18);
  for (const auto& name : names) CHECK_NOTHROW(scenario(name));
  CHECK_THROWS(scenario("fig99"));

  CHECK(scenario("fig2").trials == 100);
  const ExperimentConfig table2 = scenario("table2");
  CHECK(table2.trials == 64);
  CHECK(table2.outputs.map_error);
  REQUIRE(table2.sweep.has_value());
  CHECK(table2.sweep->parameter == "system");
  const ExperimentConfig partial = scenario("supp-partial");
  CHECK(partial.partial_state == std::vector<int>{0});
  CHECK(partial.ngrc.k == 10);
  const ExperimentConfig heatmap = scenario("supp-heatmap");
  CHECK(heatmap.sweep2.has_value());
}

TEST_CASE("run_trial is deterministic and model-complete") {
  const ExperimentConfig config = tiny_config();
  const double t_lyap = 1.1;
  const auto a = run_trial(config, t_lyap, 0);
  const auto b = run_trial(config, t_lyap, 0);
  REQUIRE(a.size() == 3);
  CHECK(a[0].model == ModelVariant::RC);
  CHECK(a[1].model == ModelVariant::NGRC);
  CHECK(a[2].model == ModelVariant::Hybrid);
  CHECK(same_results(a, b));
  // Different trial index: different trajectory, different results.
  const auto c = run_trial(config, t_lyap, 1);
  CHECK(a[0].vpt_lyap != c[0].vpt_lyap);
  CHECK(a[0].seed != c[0].seed);
}

TEST_CASE("worker count does not change results") {
  ExperimentConfig config = tiny_config();
  const double t_lyap = 1.1;
  config.workers = 1;
  const auto serial = run_trials(config, t_lyap);
  config.workers = 3;
  const auto parallel = run_trials(config, t_lyap);
  CHECK(same_results(serial, parallel));
  CHECK(serial.size() == 9);
}

TEST_CASE("csv schemas") {
  TrialResult r;
  r.trial = 0;
  r.seed = 42;
  r.model = ModelVariant::Hybrid;
  r.vpt_lyap = 2.0;
  const std::string trials_path = "/tmp/rcf_test_trials.csv";
  emit_trials_csv({r}, trials_path);
  CHECK(first_line(trials_path) == "trial,seed,model,vpt_lyap,map_err_mean,diverged");
  std::remove(trials_path.c_str());

  SweepSummary summary = aggregate({r});
  summary.parameter = "trajectory.tau";
  summary.value = 0.06;
  const std::string sweep_path = "/tmp/rcf_test_sweep.csv";
  emit_sweep_csv({summary}, sweep_path);
  CHECK(first_line(sweep_path) ==
        "sweep_param,sweep_value,model,n_trials,vpt_mean,vpt_stderr,vpt_median,"
        "vpt_q1,vpt_q3,map_err_mean,map_err_stderr,diverged_frac");

  summary.parameter2 = "training.beta";
  summary.value2 = 1e-8;
  emit_sweep_csv({summary}, sweep_path);
  CHECK(first_line(sweep_path) ==
        "sweep_param,sweep_value,sweep2_param,sweep2_value,model,n_trials,"
        "vpt_mean,vpt_stderr,vpt_median,vpt_q1,vpt_q3,map_err_mean,"
        "map_err_stderr,diverged_frac");
  std::remove(sweep_path.c_str());
}

TEST_CASE("partial-state trials observe a single component") {
  ExperimentConfig config = tiny_config();
  config.partial_state = {0};
  config.ngrc.k = 10;
  const auto results = run_trial(config, 1.1, 0);
  for (const auto& r : results) CHECK(!r.failed);
}

TEST_CASE("json summary echoes the configuration") {
  ExperimentConfig config = tiny_config();
  config.trials = 1;
  const auto results = run_trial(config, 1.1, 0);
  const std::string path = "/tmp/rcf_test_results.json";
  emit_json(config, {aggregate(results)}, 1.5, path);
  std::ifstream in(path);
  json j;
  in >> j;
  CHECK(j["config"]["base_seed"] == 12345);
  CHECK(j["wall_clock_s"] == 1.5);
  CHECK(j["summaries"].size() == 1);
  CHECK(j["summaries"][0]["models"].contains("hybrid"));
  std::remove(path.c_str());
}
