#include "rcf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rcf/rng.hpp"
#include "rcf/version.hpp"

namespace rcf {

namespace {

SystemSpec make_system(const std::string& name) {
  switch (system_from_string(name)) {
    case SystemName::Lorenz: return SystemSpec::lorenz();
    case SystemName::Rossler: return SystemSpec::rossler();
    case SystemName::DoubleScroll: return SystemSpec::double_scroll();
    case SystemName::MackeyGlass: return SystemSpec::mackey_glass();
  }
  throw std::logic_error("unreachable");
}

Trajectory head(const Trajectory& traj, Eigen::Index n) {
  Trajectory out;
  out.samples = traj.samples.topRows(n);
  out.dt = traj.dt;
  out.t0 = traj.t0;
  return out;
}

Trajectory tail(const Trajectory& traj, Eigen::Index n) {
  Trajectory out;
  out.samples = traj.samples.bottomRows(n);
  out.dt = traj.dt;
  out.t0 = traj.t0 + double(traj.n() - n) * traj.dt;
  return out;
}

Trajectory slice(const Trajectory& traj, Eigen::Index start, Eigen::Index n) {
  Trajectory out;
  out.samples = traj.samples.middleRows(start, n);
  out.dt = traj.dt;
  out.t0 = traj.t0 + double(start) * traj.dt;
  return out;
}

Trajectory project(const Trajectory& traj, const std::vector<int>& components) {
  if (components.empty()) return traj;
  Trajectory out;
  out.dt = traj.dt;
  out.t0 = traj.t0;
  out.samples.resize(traj.n(), Eigen::Index(components.size()));
  for (size_t j = 0; j < components.size(); ++j) {
    if (components[j] < 0 || components[j] >= traj.dim())
      throw std::invalid_argument("partial_state component out of range");
    out.samples.col(Eigen::Index(j)) = traj.samples.col(components[j]);
  }
  return out;
}

double quantile(std::vector<double> sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double pos = p * double(sorted.size() - 1);
  const auto lo = size_t(std::floor(pos));
  const auto hi = size_t(std::ceil(pos));
  const double frac = pos - double(lo);
  return (1.0 - frac) * sorted[lo] + frac * sorted[hi];
}

std::string csv_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  std::ostringstream ss;
  ss.precision(17);
  if (v.is_number_float())
    ss << v.get<double>();
  else
    ss << v;
  return ss.str();
}

ForecastModel make_model(ModelVariant variant,
                         std::shared_ptr<const Reservoir> res,
                         const NgrcConfig& ngrc) {
  switch (variant) {
    case ModelVariant::RC: return make_rc_model(std::move(res));
    case ModelVariant::NGRC: return make_ngrc_model(ngrc);
    case ModelVariant::Hybrid: return make_hybrid_model(std::move(res), ngrc);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["system"] = {{"name", to_string(c.system.name)},
                 {"parameters", c.system.parameters}};
  j["trajectory"] = {{"tau", c.trajectory.tau},
                     {"tau_int", c.trajectory.tau_int},
                     {"n_train", c.trajectory.n_train},
                     {"n_predict", c.trajectory.n_predict},
                     {"settle_time", c.trajectory.settle_time}};
  j["reservoir"] = {{"n_nodes", c.reservoir.n_nodes},
                    {"avg_degree", c.reservoir.avg_degree},
                    {"spectral_radius", c.reservoir.spectral_radius},
                    {"leak", c.reservoir.leak},
                    {"bias", c.reservoir.bias},
                    {"input_scale", c.reservoir.input_scale},
                    {"n_warmup", c.reservoir.n_warmup}};
  j["ngrc"] = {{"k", c.ngrc.k}, {"s", c.ngrc.s}};
  j["training"] = {{"beta", c.beta}, {"noise_std", c.noise_std}};
  json models = json::array();
  for (auto m : c.models) models.push_back(to_string(m));
  j["models"] = models;
  j["trials"] = c.trials;
  j["base_seed"] = c.base_seed;
  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter},
                             {"values", c.sweep->values}};
  if (c.sweep2) j["sweep2"] = {{"parameter", c.sweep2->parameter},
                               {"values", c.sweep2->values}};
  j["outputs"] = {{"vpt", c.outputs.vpt},
                  {"map_error", c.outputs.map_error},
                  {"psd", c.outputs.psd}};
  if (!c.partial_state.empty()) j["partial_state"] = c.partial_state;
  j["auto_warmup"] = c.auto_warmup;
  j["workers"] = c.workers;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("system")) {
    const auto& s = j.at("system");
    if (s.is_string()) {
      c.system = make_system(s.get<std::string>());
    } else {
      c.system = make_system(s.at("name").get<std::string>());
      if (s.contains("parameters"))
        for (auto& [key, val] : s.at("parameters").items())
          c.system.parameters[key] = val.get<double>();
    }
  }
  if (j.contains("trajectory")) {
    const auto& t = j.at("trajectory");
    if (t.contains("tau")) c.trajectory.tau = t.at("tau");
    if (t.contains("tau_int")) c.trajectory.tau_int = t.at("tau_int");
    if (t.contains("n_train")) c.trajectory.n_train = t.at("n_train");
    if (t.contains("n_predict")) c.trajectory.n_predict = t.at("n_predict");
    if (t.contains("settle_time")) c.trajectory.settle_time = t.at("settle_time");
  }
  if (j.contains("reservoir")) {
    const auto& r = j.at("reservoir");
    if (r.contains("n_nodes")) c.reservoir.n_nodes = r.at("n_nodes");
    if (r.contains("avg_degree")) c.reservoir.avg_degree = r.at("avg_degree");
    if (r.contains("spectral_radius"))
      c.reservoir.spectral_radius = r.at("spectral_radius");
    if (r.contains("leak")) c.reservoir.leak = r.at("leak");
    if (r.contains("bias")) c.reservoir.bias = r.at("bias");
    if (r.contains("input_scale")) c.reservoir.input_scale = r.at("input_scale");
    if (r.contains("n_warmup")) c.reservoir.n_warmup = r.at("n_warmup");
  }
  if (j.contains("ngrc")) {
    const auto& n = j.at("ngrc");
    if (n.contains("k")) c.ngrc.k = n.at("k");
    if (n.contains("s")) c.ngrc.s = n.at("s");
  }
  if (j.contains("training")) {
    const auto& t = j.at("training");
    if (t.contains("beta")) c.beta = t.at("beta");
    if (t.contains("noise_std")) c.noise_std = t.at("noise_std");
  }
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& m : j.at("models"))
      c.models.push_back(model_from_string(m.get<std::string>()));
  }
  if (j.contains("trials")) c.trials = j.at("trials");
  if (j.contains("base_seed")) c.base_seed = j.at("base_seed");
  for (const char* key : {"sweep", "sweep2"}) {
    if (!j.contains(key)) continue;
    SweepSpec spec;
    spec.parameter = j.at(key).at("parameter").get<std::string>();
    for (const auto& v : j.at(key).at("values")) spec.values.push_back(v);
    if (spec.values.empty())
      throw std::invalid_argument("sweep values must be nonempty");
    (std::string(key) == "sweep" ? c.sweep : c.sweep2) = std::move(spec);
  }
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    if (o.contains("vpt")) c.outputs.vpt = o.at("vpt");
    if (o.contains("map_error")) c.outputs.map_error = o.at("map_error");
    if (o.contains("psd")) c.outputs.psd = o.at("psd");
  }
  if (j.contains("partial_state"))
    c.partial_state = j.at("partial_state").get<std::vector<int>>();
  if (j.contains("auto_warmup")) c.auto_warmup = j.at("auto_warmup");
  if (j.contains("workers")) c.workers = j.at("workers");
  if (c.trials < 1) throw std::invalid_argument("trials must be >= 1");
  return c;
}

void apply_override(ExperimentConfig& c, const std::string& path,
                    const json& value) {
  if (path == "system") {
    c.system = make_system(value.get<std::string>());
  } else if (path == "trajectory.tau") {
    c.trajectory.tau = value;
  } else if (path == "trajectory.tau_int") {
    c.trajectory.tau_int = value;
  } else if (path == "trajectory.n_train") {
    c.trajectory.n_train = value;
  } else if (path == "trajectory.n_predict") {
    c.trajectory.n_predict = value;
  } else if (path == "reservoir.n_nodes") {
    c.reservoir.n_nodes = value;
  } else if (path == "reservoir.avg_degree") {
    c.reservoir.avg_degree = value;
  } else if (path == "reservoir.spectral_radius") {
    c.reservoir.spectral_radius = value;
  } else if (path == "reservoir.leak") {
    c.reservoir.leak = value;
  } else if (path == "reservoir.bias") {
    c.reservoir.bias = value;
  } else if (path == "reservoir.input_scale") {
    c.reservoir.input_scale = value;
  } else if (path == "reservoir.n_warmup") {
    c.reservoir.n_warmup = value;
  } else if (path == "ngrc.k") {
    c.ngrc.k = value;
  } else if (path == "ngrc.s") {
    c.ngrc.s = value;
  } else if (path == "training.beta") {
    c.beta = value;
  } else if (path == "training.noise_std") {
    c.noise_std = value;
  } else {
    throw std::invalid_argument("unknown sweep parameter: " + path);
  }
}

double lyapunov_time(const SystemSpec& spec, std::uint64_t base_seed) {
  double duration = 500.0, renorm = 1.0;
  if (spec.name != SystemName::Lorenz) {
    duration = 2000.0;
    renorm = 5.0;
  }
  auto rng = make_rng(base_seed, 0, Stream::Lyapunov);
  const double lam = estimate_max_lyapunov(spec, duration, renorm, rng);
  if (!(lam > 0.0))
    throw std::runtime_error("lyapunov_time: non-positive exponent for " +
                             to_string(spec.name));
  return 1.0 / lam;
}

std::vector<TrialResult> run_trial(const ExperimentConfig& config,
                                   double t_lyap, int trial_index) {
  const std::uint64_t trial_seed =
      hash64({config.base_seed, std::uint64_t(trial_index)});
  std::vector<TrialResult> results;

  const auto& tc = config.trajectory;
  const Eigen::Index n_total = tc.n_train + tc.n_predict;

  TrialResult stub;
  stub.trial = trial_index;
  stub.seed = trial_seed;

  Trajectory norm_traj;
  NormalizationStats stats;
  std::shared_ptr<const Reservoir> res;
  TrainingConfig tcfg;
  try {
    auto rng_ic = make_rng(config.base_seed, std::uint64_t(trial_index),
                           Stream::TrajectoryIc);
    Trajectory traj = integrate_and_sample(config.system, tc.tau_int, tc.tau,
                                           n_total, tc.settle_time, rng_ic);
    const Trajectory obs = project(traj, config.partial_state);
    stats = compute_stats(obs, tc.n_train);
    norm_traj = normalize(obs, stats);
    const int d_obs = int(norm_traj.dim());

    const bool needs_reservoir =
        std::any_of(config.models.begin(), config.models.end(),
                    [](ModelVariant m) { return m != ModelVariant::NGRC; });
    if (needs_reservoir) {
      auto rng_res = make_rng(config.base_seed, std::uint64_t(trial_index),
                              Stream::Reservoir);
      res = std::make_shared<Reservoir>(
          build_reservoir(config.reservoir, d_obs, rng_res));
    }

    tcfg.beta = config.beta;
    tcfg.noise_std = config.noise_std;
    tcfg.n_train = tc.n_train;
    tcfg.n_warmup = config.reservoir.n_warmup;
    if (config.auto_warmup && res) {
      const Eigen::VectorXd r1 = Eigen::VectorXd::Zero(config.reservoir.n_nodes);
      const Eigen::VectorXd r2 =
          Eigen::VectorXd::Constant(config.reservoir.n_nodes, 0.5);
      const double t_sync = estimate_sync_time(
          *res, norm_traj.samples.topRows(tc.n_train), r1, r2, tc.tau);
      const double t_warm =
          warmup_recommendation(t_sync, double(tc.n_train) * tc.tau);
      tcfg.n_warmup = std::clamp<Eigen::Index>(
          Eigen::Index(std::llround(t_warm / tc.tau)), 1, tc.n_train - 2);
    }
  } catch (const std::exception&) {
    for (auto m : config.models) {
      TrialResult r = stub;
      r.model = m;
      r.failed = true;
      results.push_back(r);
    }
    return results;
  }

  const Trajectory train_traj = head(norm_traj, tc.n_train);
  const Trajectory truth = slice(norm_traj, tc.n_train, tc.n_predict);
  NgrcConfig ngrc_cfg = config.ngrc;
  ngrc_cfg.d = int(norm_traj.dim());
  const Eigen::Index warm_rows =
      std::min<Eigen::Index>(tc.n_train,
                             std::max<Eigen::Index>(ngrc_cfg.warmup_steps() + 1, 64));
  const Trajectory warmstart = tail(train_traj, warm_rows);

  for (auto variant : config.models) {
    TrialResult result = stub;
    result.model = variant;
    const auto started = std::chrono::steady_clock::now();
    try {
      auto rng_noise = make_rng(config.base_seed, std::uint64_t(trial_index),
                                Stream::InputNoise);
      ForecastModel model = make_model(variant, res, ngrc_cfg);
      model = train(std::move(model), train_traj, tcfg, rng_noise);
      const Prediction pred = predict_autonomous(model, warmstart, tc.n_predict);
      result.diverged = pred.diverged;

      if (config.outputs.vpt)
        result.vpt_lyap =
            valid_prediction_time(pred.traj, truth, {0.9, t_lyap});

      if (config.outputs.map_error && config.system.delay == 0.0 &&
          config.partial_state.empty()) {
        MapErrorConfig mcfg;
        mcfg.tau_int = tc.tau_int;
        mcfg.n_predict = tc.n_predict;
        mcfg.persistence_norm = persistence_normalizer(train_traj);
        const auto errs =
            normalized_map_error(pred.traj, config.system, mcfg, stats);
        if (!errs.empty()) result.mean_map_error = mean_map_error(errs);
      }

      if (config.outputs.psd && !pred.diverged) {
        const Eigen::Index z = norm_traj.dim() - 1;
        const auto col = [](const Trajectory& t, Eigen::Index c) {
          return std::vector<double>(t.samples.col(c).data(),
                                     t.samples.col(c).data() + t.n());
        };
        const PsdEstimate truth_psd = welch_psd(col(truth, z), tc.tau);
        const PsdEstimate pred_psd = welch_psd(col(pred.traj, z), tc.tau);
        result.psd_distance = psd_distance(pred_psd, truth_psd);
      }
    } catch (const std::exception&) {
      result.failed = true;
    }
    result.runtime_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - started)
                           .count();
    results.push_back(result);
  }
  return results;
}

std::vector<TrialResult> run_trials(const ExperimentConfig& config,
                                    double t_lyap) {
  const int workers = std::max(1, config.workers);
  std::vector<std::vector<TrialResult>> per_trial(size_t(config.trials));
  std::atomic<int> next{0};
  auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= config.trials) return;
      per_trial[size_t(i)] = run_trial(config, t_lyap, i);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<TrialResult> flat;
  for (auto& chunk : per_trial)
    flat.insert(flat.end(), chunk.begin(), chunk.end());
  return flat;
}

SweepSummary aggregate(const std::vector<TrialResult>& results) {
  if (results.empty()) throw std::invalid_argument("aggregate: empty results");
  SweepSummary summary;
  std::vector<ModelVariant> order;
  for (const auto& r : results)
    if (std::find(order.begin(), order.end(), r.model) == order.end())
      order.push_back(r.model);

  for (auto variant : order) {
    ModelStats stats;
    std::vector<double> vpts, maps;
    int diverged = 0;
    for (const auto& r : results) {
      if (r.model != variant) continue;
      ++stats.n_trials;
      if (r.diverged || r.failed) ++diverged;
      if (r.failed) continue;
      vpts.push_back(r.vpt_lyap);
      // Map-error means cover non-diverged runs only; a diverged run's
      // finite-prefix error would dominate the average.
      if (r.mean_map_error && !r.diverged) maps.push_back(*r.mean_map_error);
    }
    stats.diverged_frac =
        stats.n_trials ? double(diverged) / double(stats.n_trials) : 0.0;
    auto mean_stderr = [](const std::vector<double>& xs, double& mean,
                          double& stderr_out) {
      if (xs.empty()) return;
      mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
      if (xs.size() < 2) {
        stderr_out = 0.0;  // n = 1 convention
        return;
      }
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      stderr_out = std::sqrt(ss / double(xs.size() - 1)) /
                   std::sqrt(double(xs.size()));
    };
    mean_stderr(vpts, stats.vpt_mean, stats.vpt_stderr);
    if (!vpts.empty()) {
      std::sort(vpts.begin(), vpts.end());
      stats.vpt_median = quantile(vpts, 0.5);
      stats.vpt_q1 = quantile(vpts, 0.25);
      stats.vpt_q3 = quantile(vpts, 0.75);
    }
    if (!maps.empty()) {
      double m = 0.0, se = 0.0;
      mean_stderr(maps, m, se);
      stats.map_err_mean = m;
      stats.map_err_stderr = se;
    }
    summary.stats.emplace_back(variant, stats);
  }
  return summary;
}

std::vector<SweepSummary> run_sweep(const ExperimentConfig& config) {
  std::vector<json> values1{nullptr}, values2{nullptr};
  if (config.sweep) values1 = config.sweep->values;
  if (config.sweep2) values2 = config.sweep2->values;
  if (config.sweep2 && !config.sweep)
    throw std::invalid_argument("sweep2 requires sweep");

  std::map<std::string, double> lyap_cache;
  std::vector<SweepSummary> summaries;
  for (const auto& v1 : values1) {
    for (const auto& v2 : values2) {
      ExperimentConfig point = config;
      point.sweep.reset();
      point.sweep2.reset();
      if (config.sweep) apply_override(point, config.sweep->parameter, v1);
      if (config.sweep2) apply_override(point, config.sweep2->parameter, v2);
      // Training-size sweeps scale regularization with n_train and pick the
      // warmup length from the measured synchronization time.
      const bool n_train_swept =
          (config.sweep && config.sweep->parameter == "trajectory.n_train") ||
          (config.sweep2 && config.sweep2->parameter == "trajectory.n_train");
      if (n_train_swept) {
        point.beta = double(point.trajectory.n_train) * 1e-12;
        point.auto_warmup = true;
      }

      const std::string sys_key = to_string(point.system.name);
      if (!lyap_cache.count(sys_key))
        lyap_cache[sys_key] = lyapunov_time(point.system, config.base_seed);

      SweepSummary summary =
          aggregate(run_trials(point, lyap_cache[sys_key]));
      if (config.sweep) {
        summary.parameter = config.sweep->parameter;
        summary.value = v1;
      }
      if (config.sweep2) {
        summary.parameter2 = config.sweep2->parameter;
        summary.value2 = v2;
      }
      summaries.push_back(std::move(summary));
    }
  }
  return summaries;
}

ExperimentConfig scenario(const std::string& name) {
  ExperimentConfig c;  // Table-style defaults
  c.base_seed = 20240901;
  const std::vector<json> tau_grid = {0.01, 0.02, 0.03, 0.06, 0.09, 0.12};
  const std::vector<json> n_train_grid = {100, 200, 500, 1000, 2000, 5000, 10000};

  if (name == "fig2") {
    c.trials = 100;
  } else if (name == "fig3") {
    c.trials = 10;
    c.outputs.psd = true;
    c.trajectory.n_predict = 32768;
  } else if (name == "fig4a") {
    c.trials = 64;
    c.sweep = SweepSpec{"reservoir.n_nodes", {25, 50, 100, 200, 500, 1000}};
  } else if (name == "fig4b") {
    c.trials = 64;
    c.sweep = SweepSpec{"trajectory.tau", tau_grid};
  } else if (name == "fig5-sigma") {
    c.trials = 64;
    c.sweep = SweepSpec{"reservoir.input_scale", {0.1, 0.25, 0.5, 1.0, 2.0, 4.0}};
  } else if (name == "fig6a") {
    c.trials = 64;
    c.reservoir.n_nodes = 100;
    c.sweep = SweepSpec{"trajectory.n_train", n_train_grid};
  } else if (name == "fig6b") {
    c.trials = 64;
    c.reservoir.n_nodes = 500;
    c.trajectory.tau = 0.01;
    c.sweep = SweepSpec{"trajectory.n_train", n_train_grid};
  } else if (name == "fig7-rossler") {
    c.trials = 64;
    c.system = SystemSpec::rossler();
    c.sweep = SweepSpec{"trajectory.tau", tau_grid};
  } else if (name == "fig7-doublescroll") {
    c.trials = 64;
    c.system = SystemSpec::double_scroll();
    c.sweep = SweepSpec{"trajectory.tau", tau_grid};
  } else if (name == "fig7-mackeyglass") {
    c.trials = 64;
    c.system = SystemSpec::mackey_glass();
    c.ngrc.s = 6;
    c.sweep = SweepSpec{"trajectory.tau", tau_grid};
  } else if (name == "table2") {
    c.trials = 64;
    c.outputs.map_error = true;
    c.sweep = SweepSpec{"system", {"lorenz", "rossler", "doublescroll"}};
  } else if (name == "supp-noise") {
    c.trials = 64;
    c.reservoir.n_nodes = 100;
    c.noise_std = 0.0;
    c.sweep = SweepSpec{"trajectory.tau", tau_grid};
  } else if (name == "supp-heatmap") {
    c.trials = 32;
    c.sweep = SweepSpec{"training.noise_std",
                        {0.0, 1e-5, 1e-4, 1e-3, 1.3e-3, 1e-2}};
    c.sweep2 = SweepSpec{"training.beta", {1e-11, 1e-9, 1e-8, 1e-6, 1e-4}};
  } else if (name == "supp-rho") {
    c.trials = 64;
    c.sweep = SweepSpec{"reservoir.spectral_radius",
                        {0.05, 0.1, 0.3, 0.6, 0.9, 1.2}};
  } else if (name == "supp-partial") {
    c.trials = 100;
    c.partial_state = {0};
    c.ngrc.k = 10;
  } else if (name == "supp-c") {
    c.trials = 64;
    c.sweep = SweepSpec{"reservoir.bias", {0.0, 0.25, 0.5, 1.0, 2.0}};
  } else if (name == "supp-k") {
    c.trials = 64;
    c.sweep = SweepSpec{"reservoir.avg_degree", {2.0, 5.0, 10.0, 20.0, 50.0}};
  } else if (name == "supp-beta") {
    c.trials = 64;
    c.sweep = SweepSpec{"training.beta", {1e-11, 1e-10, 1e-8, 1e-6, 1e-4}};
  } else {
    throw std::invalid_argument("unknown scenario: " + name);
  }
  return c;
}

std::vector<std::string> scenario_names() {
  return {"fig2",        "fig3",          "fig4a",
          "fig4b",       "fig5-sigma",    "fig6a",
          "fig6b",       "fig7-rossler",  "fig7-doublescroll",
          "fig7-mackeyglass", "table2",   "supp-noise",
          "supp-heatmap", "supp-rho",     "supp-partial",
          "supp-c",      "supp-k",        "supp-beta"};
}

void emit_sweep_csv(const std::vector<SweepSummary>& summaries,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_sweep_csv: cannot open " + path);
  const bool two_d =
      !summaries.empty() && !summaries.front().parameter2.empty();
  out << "sweep_param,sweep_value";
  if (two_d) out << ",sweep2_param,sweep2_value";
  out << ",model,n_trials,vpt_mean,vpt_stderr,vpt_median,vpt_q1,vpt_q3,"
         "map_err_mean,map_err_stderr,diverged_frac\n";
  out.precision(17);
  for (const auto& s : summaries) {
    for (const auto& [variant, st] : s.stats) {
      out << s.parameter << ',' << csv_value(s.value);
      if (two_d) out << ',' << s.parameter2 << ',' << csv_value(s.value2);
      out << ',' << to_string(variant) << ',' << st.n_trials << ','
          << st.vpt_mean << ',' << st.vpt_stderr << ',' << st.vpt_median << ','
          << st.vpt_q1 << ',' << st.vpt_q3 << ',';
      if (st.map_err_mean) out << *st.map_err_mean;
      out << ',';
      if (st.map_err_stderr) out << *st.map_err_stderr;
      out << ',' << st.diverged_frac << "\n";
    }
  }
}

void emit_trials_csv(const std::vector<TrialResult>& results,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_trials_csv: cannot open " + path);
  out << "trial,seed,model,vpt_lyap,map_err_mean,diverged\n";
  out.precision(17);
  for (const auto& r : results) {
    out << r.trial << ',' << r.seed << ',' << to_string(r.model) << ','
        << r.vpt_lyap << ',';
    if (r.mean_map_error) out << *r.mean_map_error;
    out << ',' << (r.diverged || r.failed ? 1 : 0) << "\n";
  }
}

void emit_json(const ExperimentConfig& config,
               const std::vector<SweepSummary>& summaries, double wall_clock_s,
               const std::string& path) {
  json j;
  j["config"] = config_to_json(config);
  j["build"] = kBuildVersion;
  j["wall_clock_s"] = wall_clock_s;
  json out_summaries = json::array();
  for (const auto& s : summaries) {
    json entry;
    if (!s.parameter.empty()) {
      entry["sweep_param"] = s.parameter;
      entry["sweep_value"] = s.value;
    }
    if (!s.parameter2.empty()) {
      entry["sweep2_param"] = s.parameter2;
      entry["sweep2_value"] = s.value2;
    }
    json per_model;
    for (const auto& [variant, st] : s.stats) {
      json m = {{"n_trials", st.n_trials},
                {"vpt_mean", st.vpt_mean},
                {"vpt_stderr", st.vpt_stderr},
                {"vpt_median", st.vpt_median},
                {"vpt_q1", st.vpt_q1},
                {"vpt_q3", st.vpt_q3},
                {"diverged_frac", st.diverged_frac}};
      if (st.map_err_mean) {
        m["map_err_mean"] = *st.map_err_mean;
        m["map_err_stderr"] = *st.map_err_stderr;
      }
      per_model[to_string(variant)] = m;
    }
    entry["models"] = per_model;
    out_summaries.push_back(entry);
  }
  j["summaries"] = out_summaries;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_json: cannot open " + path);
  out << j.dump(2) << "\n";
}

void export_psd(const ExperimentConfig& config, const std::string& out_prefix) {
  ExperimentConfig c = config;
  c.outputs.psd = true;
  const double t_lyap = lyapunov_time(c.system, c.base_seed);
  (void)t_lyap;

  const auto& tc = c.trajectory;
  auto rng_ic = make_rng(c.base_seed, 0, Stream::TrajectoryIc);
  Trajectory traj = integrate_and_sample(c.system, tc.tau_int, tc.tau,
                                         tc.n_train + tc.n_predict,
                                         tc.settle_time, rng_ic);
  const Trajectory obs = project(traj, c.partial_state);
  const NormalizationStats stats = compute_stats(obs, tc.n_train);
  const Trajectory norm_traj = normalize(obs, stats);
  const Trajectory train_traj = head(norm_traj, tc.n_train);
  const Trajectory truth = slice(norm_traj, tc.n_train, tc.n_predict);
  const Eigen::Index z = norm_traj.dim() - 1;

  auto col = [](const Trajectory& t, Eigen::Index cidx) {
    return std::vector<double>(t.samples.col(cidx).data(),
                               t.samples.col(cidx).data() + t.n());
  };
  write_psd_csv(welch_psd(col(truth, z), tc.tau), out_prefix + "_true.csv");

  std::shared_ptr<const Reservoir> res;
  {
    auto rng_res = make_rng(c.base_seed, 0, Stream::Reservoir);
    res = std::make_shared<Reservoir>(
        build_reservoir(c.reservoir, int(norm_traj.dim()), rng_res));
  }
  NgrcConfig ngrc_cfg = c.ngrc;
  ngrc_cfg.d = int(norm_traj.dim());
  TrainingConfig tcfg{c.beta, c.noise_std, tc.n_train, c.reservoir.n_warmup};
  const Trajectory warmstart = tail(
      train_traj, std::min<Eigen::Index>(
                      tc.n_train,
                      std::max<Eigen::Index>(ngrc_cfg.warmup_steps() + 1, 64)));
  for (auto variant : c.models) {
    auto rng_noise = make_rng(c.base_seed, 0, Stream::InputNoise);
    ForecastModel model =
        train(make_model(variant, res, ngrc_cfg), train_traj, tcfg, rng_noise);
    const Prediction pred = predict_autonomous(model, warmstart, tc.n_predict);
    write_psd_csv(welch_psd(col(pred.traj, z), tc.tau),
                  out_prefix + "_" + to_string(variant) + ".csv");
  }
}

}  // namespace rcf
