#include "rcf/ngrc.hpp"

#include <stdexcept>

namespace rcf {

Eigen::VectorXd build_features(const ObservationWindow& window,
                               const NgrcConfig& config) {
  if (window.rows() != config.k || window.cols() != config.d)
    throw std::invalid_argument("build_features: window/config mismatch");

  const Eigen::Index dk = Eigen::Index(config.d) * config.k;
  Eigen::VectorXd features(config.feature_dim());
  features[0] = 1.0;

  // Linear block: row-major flatten, current observation first.
  Eigen::Index idx = 1;
  for (int j = 0; j < config.k; ++j)
    for (int i = 0; i < config.d; ++i) features[idx++] = window(j, i);

  const auto lin = features.segment(1, dk);
  for (Eigen::Index i = 0; i < dk; ++i)
    for (Eigen::Index j = i; j < dk; ++j) features[idx++] = lin[i] * lin[j];
  return features;
}

ObservationWindow window_from_series(const Eigen::MatrixXd& series,
                                     Eigen::Index t, const NgrcConfig& config) {
  return window_from_accessor(
      [&](Eigen::Index i) { return Eigen::VectorXd(series.row(i)); }, t,
      config);
}

ObservationWindow window_from_series(const SplicedSeries& series,
                                     Eigen::Index t, const NgrcConfig& config) {
  return window_from_accessor([&](Eigen::Index i) { return series.at(i); }, t,
                              config);
}

}  // namespace rcf
