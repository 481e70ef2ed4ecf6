#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <random>

namespace rcf {

struct ReservoirParams {
  int n_nodes = 50;              // N
  double avg_degree = 10.0;      // <k>
  double spectral_radius = 0.9;  // rho
  double leak = 1.0;             // alpha in (0, 1]
  double bias = 0.5;             // c, broadcast inside the activation
  double input_scale = 1.0;      // sigma
  int n_warmup = 1000;
};

/// Fixed random recurrent network: adjacency A (rescaled to the requested
/// spectral radius), input matrix B with entries in [-sigma, sigma], and a
/// constant bias. Immutable after construction and shareable across threads.
struct Reservoir {
  ReservoirParams params;
  int input_dim = 0;
  bool dense = true;
  Eigen::MatrixXd A;
  Eigen::SparseMatrix<double> A_sparse;
  Eigen::MatrixXd B;  // N x d

  Eigen::VectorXd apply_adjacency(const Eigen::VectorXd& r) const {
    return dense ? Eigen::VectorXd(A * r) : Eigen::VectorXd(A_sparse * r);
  }
};

// Largest eigenvalue magnitude of a dense real matrix.
double spectral_radius(const Eigen::MatrixXd& m);

// Directed Erdos-Renyi graph with link probability <k>/N, weights uniform on
// [-1, 1], rescaled to the requested spectral radius; B uniform on
// [-sigma, sigma]. Deterministic given the rng state. Retries (up to a cap)
// when the random pattern has zero spectrum and a positive radius was asked.
Reservoir build_reservoir(const ReservoirParams& params, int input_dim,
                          std::mt19937_64& rng);

// r' = (1 - alpha) r + alpha tanh(A r + B u + c)
Eigen::VectorXd update(const Reservoir& res, const Eigen::VectorXd& r,
                       const Eigen::VectorXd& u);

// Folds update over the rows of `inputs` starting from the zero state.
Eigen::VectorXd warmup(const Reservoir& res, const Eigen::MatrixXd& inputs);

// Drives two copies from r1_init / r2_init with the same inputs (rows of
// `inputs`, spaced dt apart) and fits ln||r1 - r2|| vs t; returns -1/slope.
// Throws if the fitted slope is non-negative (no synchronization).
double estimate_sync_time(const Reservoir& res, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& r1_init,
                          const Eigen::VectorXd& r2_init, double dt);

// Warmup-time rule: min(10 t_sync, t_train / 4).
double warmup_recommendation(double t_sync, double t_train);

}  // namespace rcf
