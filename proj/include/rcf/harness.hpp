#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rcf/forecaster.hpp"
#include "rcf/metrics.hpp"
#include "rcf/systems.hpp"

namespace rcf {

using nlohmann::json;

struct TrajectorySettings {
  double tau = 0.06;
  double tau_int = 0.001;
  Eigen::Index n_train = 10000;
  Eigen::Index n_predict = 2000;
  double settle_time = -1.0;  // < 0: system default
};

struct OutputFlags {
  bool vpt = true;
  bool map_error = false;
  bool psd = false;
};

struct SweepSpec {
  std::string parameter;
  std::vector<json> values;
};

struct ExperimentConfig {
  SystemSpec system = SystemSpec::lorenz();
  TrajectorySettings trajectory;
  ReservoirParams reservoir;
  NgrcConfig ngrc;  // d is overwritten with the observed dimension per trial
  double beta = 1e-8;
  double noise_std = 1.3e-3;  // calibrated default; see TrainingConfig::noise_std
  std::vector<ModelVariant> models = {ModelVariant::RC, ModelVariant::NGRC,
                                      ModelVariant::Hybrid};
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::optional<SweepSpec> sweep;
  std::optional<SweepSpec> sweep2;  // grid scenarios (cross product)
  OutputFlags outputs;
  std::vector<int> partial_state;  // observed components; empty = full state
  bool auto_warmup = false;       // sync-time warmup rule
  int workers = 1;
};

json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const json& j);

// Overrides a single field addressed by a dotted path ("trajectory.tau",
// "reservoir.n_nodes", "system", ...). Throws on unknown paths.
void apply_override(ExperimentConfig& config, const std::string& path,
                    const json& value);

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  ModelVariant model = ModelVariant::RC;
  double vpt_lyap = 0.0;
  std::optional<double> mean_map_error;
  std::optional<double> psd_distance;
  bool diverged = false;
  bool failed = false;  // trial-level runtime failure (e.g. integration blew up)
  double runtime_s = 0.0;
};

struct ModelStats {
  int n_trials = 0;
  double vpt_mean = 0.0;
  double vpt_stderr = 0.0;
  double vpt_median = 0.0;
  double vpt_q1 = 0.0;
  double vpt_q3 = 0.0;
  std::optional<double> map_err_mean;
  std::optional<double> map_err_stderr;
  double diverged_frac = 0.0;
};

struct SweepSummary {
  std::string parameter;  // empty for plain (non-sweep) runs
  json value;
  std::string parameter2;
  json value2;
  std::vector<std::pair<ModelVariant, ModelStats>> stats;
};

// Maximal-Lyapunov-exponent inverse for the configured system, derived
// deterministically from base_seed.
double lyapunov_time(const SystemSpec& spec, std::uint64_t base_seed);

// One seeded trial: one trajectory and one reservoir realization shared by
// all requested models. Never throws for per-model runtime failures; those
// are recorded with the failed flag.
std::vector<TrialResult> run_trial(const ExperimentConfig& config,
                                   double t_lyap, int trial_index);

// All trials of one configuration on a worker pool; results in trial order.
std::vector<TrialResult> run_trials(const ExperimentConfig& config,
                                    double t_lyap);

SweepSummary aggregate(const std::vector<TrialResult>& results);

// Runs the sweep grid (or a single point when no sweep is set).
std::vector<SweepSummary> run_sweep(const ExperimentConfig& config);

// Named presets reproducing the benchmark scenarios.
ExperimentConfig scenario(const std::string& name);
std::vector<std::string> scenario_names();

void emit_sweep_csv(const std::vector<SweepSummary>& summaries,
                    const std::string& path);
void emit_trials_csv(const std::vector<TrialResult>& results,
                     const std::string& path);
void emit_json(const ExperimentConfig& config,
               const std::vector<SweepSummary>& summaries, double wall_clock_s,
               const std::string& path);

// Welch spectra of the last observed component for one trial: one CSV per
// model plus the true trajectory, named <prefix>_<model>.csv.
void export_psd(const ExperimentConfig& config, const std::string& out_prefix);

}  // namespace rcf
