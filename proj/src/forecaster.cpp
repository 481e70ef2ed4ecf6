#include "rcf/forecaster.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rcf {

namespace {
constexpr double kDivergenceThreshold = 1e6;
}

std::string to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::RC: return "rc";
    case ModelVariant::NGRC: return "ngrc";
    case ModelVariant::Hybrid: return "hybrid";
  }
  return "?";
}

ModelVariant model_from_string(const std::string& s) {
  if (s == "rc") return ModelVariant::RC;
  if (s == "ngrc") return ModelVariant::NGRC;
  if (s == "hybrid") return ModelVariant::Hybrid;
  throw std::invalid_argument("unknown model variant: " + s);
}

Eigen::Index ForecastModel::state_dim() const {
  Eigen::Index m = 0;
  if (variant != ModelVariant::NGRC) m += reservoir->params.n_nodes;
  if (variant != ModelVariant::RC) m += ngrc->feature_dim();
  return m;
}

ForecastModel make_rc_model(std::shared_ptr<const Reservoir> res) {
  ForecastModel model;
  model.variant = ModelVariant::RC;
  model.reservoir = std::move(res);
  return model;
}

ForecastModel make_ngrc_model(const NgrcConfig& cfg) {
  ForecastModel model;
  model.variant = ModelVariant::NGRC;
  model.ngrc = cfg;
  return model;
}

ForecastModel make_hybrid_model(std::shared_ptr<const Reservoir> res,
                                const NgrcConfig& cfg) {
  ForecastModel model;
  model.variant = ModelVariant::Hybrid;
  model.reservoir = std::move(res);
  model.ngrc = cfg;
  return model;
}

Eigen::MatrixXd ridge_fit(const Eigen::MatrixXd& S, const Eigen::MatrixXd& Y,
                          double beta) {
  if (beta < 0.0) throw std::invalid_argument("ridge_fit: beta < 0");
  if (S.cols() < 1 || S.cols() != Y.cols())
    throw std::invalid_argument("ridge_fit: design/target size mismatch");

  const Eigen::Index m = S.rows();
  Eigen::MatrixXd gram = S * S.transpose();
  gram.diagonal().array() += beta;
  const Eigen::MatrixXd rhs = S * Y.transpose();  // m x d

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (beta == 0.0) {
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    if (d.minCoeff() <= 1e-12 * d.maxCoeff())
      throw std::runtime_error(
          "ridge_fit: singular normal matrix with beta = 0; use beta > 0");
  }
  Eigen::MatrixXd x = ldlt.solve(rhs);
  x += ldlt.solve(rhs - gram * x);  // one refinement pass

  const double rhs_norm = rhs.norm();
  const double residual = (gram * x - rhs).norm();
  if (rhs_norm > 0.0 && residual > 1e-6 * rhs_norm) {
    if (beta == 0.0)
      throw std::runtime_error(
          "ridge_fit: singular normal matrix with beta = 0; use beta > 0");
    throw std::runtime_error("ridge_fit: normal system solve failed");
  }
  (void)m;
  return x.transpose();
}

Trajectory add_input_noise(const Trajectory& traj, double gamma,
                           std::mt19937_64& rng) {
  if (gamma < 0.0) throw std::invalid_argument("add_input_noise: gamma < 0");
  if (gamma == 0.0) return traj;
  Trajectory out = traj;
  std::normal_distribution<double> noise(0.0, gamma);
  for (Eigen::Index i = 0; i < out.n(); ++i)
    for (Eigen::Index j = 0; j < out.dim(); ++j) out.samples(i, j) += noise(rng);
  return out;
}

DesignMatrices collect_states(const ForecastModel& model,
                              const Trajectory& noisy_traj,
                              const Trajectory& clean_traj,
                              const TrainingConfig& cfg) {
  const Eigen::Index n = cfg.n_train;
  if (noisy_traj.n() < n || clean_traj.n() < n)
    throw std::invalid_argument("collect_states: trajectory shorter than n_train");

  const bool has_res = model.variant != ModelVariant::NGRC;
  const bool has_ngrc = model.variant != ModelVariant::RC;
  if (has_res && cfg.n_warmup >= n)
    throw std::invalid_argument("collect_states: n_warmup >= n_train");

  Eigen::Index start = 0;
  if (has_res) start = std::max(start, cfg.n_warmup);
  if (has_ngrc) start = std::max(start, model.ngrc->warmup_steps());
  const Eigen::Index n_fit = n - 1 - start;
  if (n_fit < 1)
    throw std::invalid_argument("collect_states: insufficient data after warmup");

  const Eigen::Index res_dim = has_res ? model.reservoir->params.n_nodes : 0;
  DesignMatrices dm;
  dm.S.resize(model.state_dim(), n_fit);
  dm.Y.resize(clean_traj.dim(), n_fit);

  Eigen::VectorXd r;
  if (has_res) r = Eigen::VectorXd::Zero(res_dim);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (has_res) r = update(*model.reservoir, r, noisy_traj.samples.row(j));
    if (j < start || j > n - 2) continue;
    const Eigen::Index col = j - start;
    if (has_res) dm.S.col(col).head(res_dim) = r;
    if (has_ngrc)
      dm.S.col(col).tail(model.ngrc->feature_dim()) = build_features(
          window_from_series(noisy_traj.samples, j, *model.ngrc), *model.ngrc);
    dm.Y.col(col) = clean_traj.samples.row(j + 1);
  }
  if (has_res) dm.final_reservoir_state = r;
  return dm;
}

ForecastModel train(ForecastModel model, const Trajectory& traj,
                    const TrainingConfig& cfg, std::mt19937_64& rng) {
  if (traj.n() < cfg.n_train)
    throw std::invalid_argument("train: trajectory shorter than n_train");
  Trajectory clean = traj;
  clean.samples = traj.samples.topRows(cfg.n_train);
  const Trajectory noisy = add_input_noise(clean, cfg.noise_std, rng);

  model.cfg = cfg;
  DesignMatrices dm = collect_states(model, noisy, clean, cfg);
  model.W = ridge_fit(dm.S, dm.Y, cfg.beta);
  model.final_reservoir_state = dm.final_reservoir_state;
  return model;
}

Prediction predict_autonomous(const ForecastModel& model,
                              const Trajectory& warmstart,
                              Eigen::Index n_steps) {
  if (model.W.size() == 0)
    throw std::invalid_argument("predict_autonomous: model not trained");
  const bool has_res = model.variant != ModelVariant::NGRC;
  const bool has_ngrc = model.variant != ModelVariant::RC;
  const Eigen::Index d = model.W.rows();
  const Eigen::Index res_dim = has_res ? model.reservoir->params.n_nodes : 0;

  Eigen::VectorXd r;
  if (has_res) {
    if (model.final_reservoir_state.size() > 0)
      r = model.final_reservoir_state;
    else
      r = warmup(*model.reservoir, warmstart.samples);
  }
  SplicedSeries spliced(warmstart.samples, warmstart.n());
  if (has_ngrc && warmstart.n() < model.ngrc->warmup_steps() + 1)
    throw std::invalid_argument(
        "predict_autonomous: warmstart shorter than the delay window");

  Prediction pred;
  pred.traj.dt = warmstart.dt;
  pred.traj.t0 = warmstart.t0 + double(warmstart.n()) * warmstart.dt;
  pred.traj.samples.resize(n_steps, d);

  Eigen::VectorXd state(model.state_dim());
  Eigen::Index produced = 0;
  for (Eigen::Index i = 0; i < n_steps; ++i) {
    const Eigen::Index t = warmstart.n() - 1 + i;  // index of the latest sample
    if (has_res) state.head(res_dim) = r;
    if (has_ngrc)
      state.tail(model.ngrc->feature_dim()) = build_features(
          window_from_series(spliced, t, *model.ngrc), *model.ngrc);
    const Eigen::VectorXd v = model.W * state;
    if (!v.allFinite() || v.cwiseAbs().maxCoeff() > kDivergenceThreshold) {
      pred.diverged = true;
      pred.diverged_at = i;
      break;
    }
    pred.traj.samples.row(i) = v;
    ++produced;
    spliced.append(v);
    if (has_res) r = update(*model.reservoir, r, v);
  }
  pred.traj.samples.conservativeResize(produced, d);
  return pred;
}

void dump_model(const ForecastModel& model, std::uint64_t seed,
                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_model: cannot open " + path);
  out << "variant " << to_string(model.variant) << "\n";
  out << "seed " << seed << "\n";
  out << "beta " << model.cfg.beta << "\n";
  out << "noise_std " << model.cfg.noise_std << "\n";
  out << "n_train " << model.cfg.n_train << "\n";
  out << "n_warmup " << model.cfg.n_warmup << "\n";
  if (model.reservoir) {
    const auto& p = model.reservoir->params;
    out << "reservoir N " << p.n_nodes << " avg_degree " << p.avg_degree
        << " spectral_radius " << p.spectral_radius << " leak " << p.leak
        << " bias " << p.bias << " input_scale " << p.input_scale << "\n";
  }
  if (model.ngrc)
    out << "ngrc k " << model.ngrc->k << " s " << model.ngrc->s << " d "
        << model.ngrc->d << "\n";
  out << "W " << model.W.rows() << " " << model.W.cols() << "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < model.W.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.W.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", model.W(i, j));
      out << buf << (j + 1 == model.W.cols() ? '\n' : ' ');
    }
  }
}

}  // namespace rcf
