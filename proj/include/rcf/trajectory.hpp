#pragma once

#include <Eigen/Dense>
#include <string>

namespace rcf {

/// Uniformly sampled multivariate time series. Row i holds the state at
/// t0 + i * dt.
struct Trajectory {
  Eigen::MatrixXd samples;  // n x d
  double dt = 0.0;
  double t0 = 0.0;

  Eigen::Index n() const { return samples.rows(); }
  Eigen::Index dim() const { return samples.cols(); }
};

/// Per-component mean and (population) standard deviation of a training
/// segment. std components are strictly positive.
struct NormalizationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

// Stats over the first n_train samples only. Throws if any component has
// zero standard deviation.
NormalizationStats compute_stats(const Trajectory& traj, Eigen::Index n_train);

Trajectory normalize(const Trajectory& traj, const NormalizationStats& stats);
Trajectory denormalize(const Trajectory& traj, const NormalizationStats& stats);

// CSV with header t,u0,...,u{d-1}, 17 significant digits.
void write_csv(const Trajectory& traj, const std::string& path);
Trajectory read_csv(const std::string& path);

}  // namespace rcf
