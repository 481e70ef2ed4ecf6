#include "rcf/metrics.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace rcf {

double valid_prediction_time(const Trajectory& v, const Trajectory& u,
                             const VptConfig& cfg) {
  if (std::abs(v.dt - u.dt) > 1e-12 || v.n() > u.n())
    throw std::invalid_argument("valid_prediction_time: mismatched grids");
  if (!(cfg.kappa > 0.0) || !(cfg.lyapunov_time > 0.0))
    throw std::invalid_argument("valid_prediction_time: invalid config");

  const double mean_sq =
      u.samples.rowwise().squaredNorm().mean();
  const double denom = std::sqrt(mean_sq);
  if (!(denom > 0.0))
    throw std::invalid_argument("valid_prediction_time: degenerate truth");

  for (Eigen::Index i = 0; i < v.n(); ++i) {
    const double err = (v.samples.row(i) - u.samples.row(i)).norm() / denom;
    if (err > cfg.kappa) return double(i) * v.dt / cfg.lyapunov_time;
  }
  // Never exceeded: full (possibly truncated) window length.
  return double(v.n()) * v.dt / cfg.lyapunov_time;
}

double persistence_normalizer(const Trajectory& train) {
  if (train.n() < 2)
    throw std::invalid_argument("persistence_normalizer: need n >= 2");
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < train.n(); ++i)
    sum += (train.samples.row(i + 1) - train.samples.row(i)).norm();
  return sum / double(train.n() - 1);
}

std::vector<double> normalized_map_error(const Trajectory& v,
                                         const SystemSpec& spec,
                                         const MapErrorConfig& cfg,
                                         const NormalizationStats& stats) {
  if (spec.delay > 0.0)
    throw std::invalid_argument(
        "normalized_map_error: undefined for delay systems");
  if (!(cfg.persistence_norm > 0.0))
    throw std::invalid_argument("normalized_map_error: zero normalizer");

  const Eigen::Index n_steps = std::min(cfg.n_predict, v.n());
  std::vector<double> errors;
  if (n_steps < 2) return errors;
  errors.reserve(size_t(n_steps - 1));

  Integrator integ(spec, Eigen::VectorXd::Zero(spec.dimension), cfg.tau_int);
  const Eigen::VectorXd std_vec = stats.std;
  for (Eigen::Index t = 1; t < n_steps; ++t) {
    Eigen::VectorXd x =
        (v.samples.row(t - 1).transpose().array() * std_vec.array()).matrix() +
        stats.mean;
    integ.set_state(x);
    integ.advance(v.dt);
    const Eigen::VectorXd mapped =
        ((integ.state() - stats.mean).array() / std_vec.array()).matrix();
    const double err = (v.samples.row(t).transpose() - mapped).norm() /
                       cfg.persistence_norm;
    // Finite-prefix convention: reintegration from a far-off-attractor
    // predicted state can overflow (e.g. the double-scroll sinh); stop there.
    if (!std::isfinite(err)) break;
    errors.push_back(err);
  }
  return errors;
}

double mean_map_error(const std::vector<double>& per_step) {
  if (per_step.empty())
    throw std::invalid_argument("mean_map_error: empty sequence");
  return std::accumulate(per_step.begin(), per_step.end(), 0.0) /
         double(per_step.size());
}

namespace {

// In-place iterative radix-2 FFT; length must be a power of two.
void fft(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / double(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const auto u = a[i + j];
        const auto t = w * a[i + j + len / 2];
        a[i + j] = u + t;
        a[i + j + len / 2] = u - t;
        w *= wl;
      }
    }
  }
}

}  // namespace

PsdEstimate welch_psd(const std::vector<double>& series, double dt,
                      Eigen::Index segment_length) {
  const auto n = Eigen::Index(series.size());
  if (n < 8) throw std::invalid_argument("welch_psd: series shorter than one segment");
  Eigen::Index len = 1;
  while (len * 2 <= std::min(segment_length, n)) len *= 2;

  const double mean =
      std::accumulate(series.begin(), series.end(), 0.0) / double(n);

  std::vector<double> window(static_cast<size_t>(len));
  double window_power = 0.0;
  for (Eigen::Index j = 0; j < len; ++j) {
    window[size_t(j)] =
        0.5 * (1.0 - std::cos(2.0 * M_PI * double(j) / double(len - 1)));
    window_power += window[size_t(j)] * window[size_t(j)];
  }

  const Eigen::Index hop = len / 2;  // 50% overlap
  const Eigen::Index n_bins = len / 2 + 1;
  std::vector<double> accum(static_cast<size_t>(n_bins), 0.0);
  Eigen::Index n_segments = 0;
  std::vector<std::complex<double>> buf(static_cast<size_t>(len));
  for (Eigen::Index start = 0; start + len <= n; start += hop) {
    for (Eigen::Index j = 0; j < len; ++j)
      buf[size_t(j)] = (series[size_t(start + j)] - mean) * window[size_t(j)];
    fft(buf);
    for (Eigen::Index k = 0; k < n_bins; ++k)
      accum[size_t(k)] += std::norm(buf[size_t(k)]);
    ++n_segments;
  }

  PsdEstimate psd;
  psd.frequencies.resize(size_t(n_bins));
  psd.power.resize(size_t(n_bins));
  const double scale = dt / (window_power * double(n_segments));
  for (Eigen::Index k = 0; k < n_bins; ++k) {
    psd.frequencies[size_t(k)] = double(k) / (double(len) * dt);
    const double one_sided = (k == 0 || k == len / 2) ? 1.0 : 2.0;
    psd.power[size_t(k)] = one_sided * scale * accum[size_t(k)];
  }
  return psd;
}

double psd_distance(const PsdEstimate& a, const PsdEstimate& b) {
  if (a.power.size() != b.power.size())
    throw std::invalid_argument("psd_distance: mismatched grids");
  double num = 0.0, den = 0.0;
  for (size_t k = 0; k < a.power.size(); ++k) {
    const double diff = a.power[k] - b.power[k];
    num += diff * diff;
    den += b.power[k] * b.power[k];
  }
  if (!(den > 0.0)) throw std::invalid_argument("psd_distance: zero reference");
  return std::sqrt(num / den);
}

void write_psd_csv(const PsdEstimate& psd, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_psd_csv: cannot open " + path);
  out << "frequency,power\n";
  char buf[80];
  for (size_t k = 0; k < psd.frequencies.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", psd.frequencies[k],
                  psd.power[k]);
    out << buf;
  }
}

}  // namespace rcf
