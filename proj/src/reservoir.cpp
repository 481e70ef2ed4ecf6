#include "rcf/reservoir.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rcf {

double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Reservoir build_reservoir(const ReservoirParams& params, int input_dim,
                          std::mt19937_64& rng) {
  const int n = params.n_nodes;
  if (n < 1) throw std::invalid_argument("build_reservoir: N < 1");
  if (params.avg_degree > double(n))
    throw std::invalid_argument("build_reservoir: <k> > N");
  if (!(params.leak > 0.0 && params.leak <= 1.0))
    throw std::invalid_argument("build_reservoir: leak outside (0, 1]");
  if (params.spectral_radius < 0.0)
    throw std::invalid_argument("build_reservoir: negative spectral radius");

  Reservoir res;
  res.params = params;
  res.input_dim = input_dim;

  const double p = params.avg_degree / double(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);

  const int max_retries = 10;
  Eigen::MatrixXd a;
  double rho0 = 0.0;
  for (int attempt = 0;; ++attempt) {
    a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (unit(rng) < p) a(i, j) = weight(rng);
    if (params.spectral_radius == 0.0) {
      a.setZero();
      rho0 = 0.0;
      break;
    }
    rho0 = spectral_radius(a);
    if (rho0 > 0.0) break;
    if (attempt + 1 >= max_retries)
      throw std::runtime_error(
          "build_reservoir: zero spectral radius after retries; increase N or "
          "<k>");
  }
  if (rho0 > 0.0) a *= params.spectral_radius / rho0;

  res.dense = p >= 0.25;
  if (res.dense) {
    res.A = std::move(a);
  } else {
    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (a(i, j) != 0.0) triplets.emplace_back(i, j, a(i, j));
    res.A_sparse.resize(n, n);
    res.A_sparse.setFromTriplets(triplets.begin(), triplets.end());
  }

  std::uniform_real_distribution<double> input_weight(-params.input_scale,
                                                      params.input_scale);
  res.B.resize(n, input_dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < input_dim; ++j) res.B(i, j) = input_weight(rng);
  return res;
}

Eigen::VectorXd update(const Reservoir& res, const Eigen::VectorXd& r,
                       const Eigen::VectorXd& u) {
  const double alpha = res.params.leak;
  Eigen::VectorXd pre = res.apply_adjacency(r) + res.B * u;
  pre.array() += res.params.bias;
  return (1.0 - alpha) * r + alpha * pre.array().tanh().matrix();
}

Eigen::VectorXd warmup(const Reservoir& res, const Eigen::MatrixXd& inputs) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(res.params.n_nodes);
  for (Eigen::Index i = 0; i < inputs.rows(); ++i)
    r = update(res, r, inputs.row(i));
  return r;
}

double estimate_sync_time(const Reservoir& res, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& r1_init,
                          const Eigen::VectorXd& r2_init, double dt) {
  if ((r1_init - r2_init).norm() == 0.0)
    throw std::invalid_argument("estimate_sync_time: identical initial states");

  // Gap sequence, cut at the numerical noise floor and at 500 steps so the
  // floor does not corrupt the fitted slope.
  constexpr double kFloor = 1e-12;
  constexpr Eigen::Index kMaxSteps = 500;
  std::vector<double> log_gap;
  Eigen::VectorXd r1 = r1_init;
  Eigen::VectorXd r2 = r2_init;
  log_gap.push_back(std::log((r1 - r2).norm()));
  for (Eigen::Index i = 0; i < std::min(inputs.rows(), kMaxSteps); ++i) {
    r1 = update(res, r1, inputs.row(i));
    r2 = update(res, r2, inputs.row(i));
    const double gap = (r1 - r2).norm();
    if (gap <= kFloor) break;
    log_gap.push_back(std::log(gap));
  }
  // Memoryless reservoirs close the gap within one update.
  if (log_gap.size() < 3) return dt;

  const auto m = Eigen::Index(log_gap.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = double(i) * dt;
    st += t;
    sy += log_gap[size_t(i)];
    stt += t * t;
    sty += t * log_gap[size_t(i)];
  }
  const double slope = (double(m) * sty - st * sy) / (double(m) * stt - st * st);
  if (!(slope < 0.0))
    throw std::runtime_error(
        "estimate_sync_time: non-negative slope, reservoir does not "
        "synchronize");
  return -1.0 / slope;
}

double warmup_recommendation(double t_sync, double t_train) {
  return std::min(10.0 * t_sync, t_train / 4.0);
}

}  // namespace rcf
