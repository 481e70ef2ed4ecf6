#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rcf {

/// Delay structure of the NGRC feature vector: k stacked observations of
/// dimension d, spaced s steps apart.
struct NgrcConfig {
  int k = 2;
  int s = 1;
  int d = 3;

  // 1 (constant) + dk (linear) + dk(dk+1)/2 (quadratic monomials)
  Eigen::Index feature_dim() const {
    const Eigen::Index dk = Eigen::Index(d) * k;
    return 1 + dk + dk * (dk + 1) / 2;
  }
  Eigen::Index warmup_steps() const { return Eigen::Index(s) * (k - 1); }
};

/// k rows of d columns; row 0 is the current observation, row j is the
/// observation j*s steps in the past.
using ObservationWindow = Eigen::MatrixXd;

// Feature vector: constant 1, then the stacked observations (current first),
// then all quadratic monomials x_i x_j with i <= j of the linear block in
// row-major upper-triangular order.
Eigen::VectorXd build_features(const ObservationWindow& window,
                               const NgrcConfig& config);

// Window at index t of a series given by an accessor `row(i) -> d-vector`.
// Requires t >= s (k - 1).
template <typename RowFn>
ObservationWindow window_from_accessor(RowFn&& row, Eigen::Index t,
                                       const NgrcConfig& config) {
  if (t < config.warmup_steps())
    throw std::out_of_range("window_from_series: index before warmup");
  ObservationWindow window(config.k, config.d);
  for (int j = 0; j < config.k; ++j)
    window.row(j) = row(t - Eigen::Index(j) * config.s);
  return window;
}

ObservationWindow window_from_series(const Eigen::MatrixXd& series,
                                     Eigen::Index t, const NgrcConfig& config);

/// Logical series that splices a truth segment with a growing prediction:
/// indices below n_truth read from `truth`, later ones from the appended
/// predictions. Used to build windows across the training boundary.
class SplicedSeries {
 public:
  SplicedSeries(const Eigen::MatrixXd& truth, Eigen::Index n_truth)
      : truth_(&truth), n_truth_(n_truth) {}

  void append(const Eigen::VectorXd& v) { predicted_.push_back(v); }
  Eigen::Index size() const {
    return n_truth_ + Eigen::Index(predicted_.size());
  }
  Eigen::VectorXd at(Eigen::Index t) const {
    return t < n_truth_ ? Eigen::VectorXd(truth_->row(t))
                        : predicted_[size_t(t - n_truth_)];
  }

 private:
  const Eigen::MatrixXd* truth_;
  Eigen::Index n_truth_;
  std::vector<Eigen::VectorXd> predicted_;
};

ObservationWindow window_from_series(const SplicedSeries& series,
                                     Eigen::Index t, const NgrcConfig& config);

}  // namespace rcf
