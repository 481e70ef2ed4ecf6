#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rcf/systems.hpp"
#include "rcf/trajectory.hpp"

namespace rcf {

struct VptConfig {
  double kappa = 0.9;
  double lyapunov_time = 1.0;  // t_lyap
};

// First time (relative to prediction start, in units of t_lyap) at which
// ||v(t) - u(t)|| / sqrt(<||u||^2>) exceeds kappa; the average in the
// denominator is taken over the true test trajectory u. Returns the full
// window length when the threshold is never exceeded. A truncated
// (diverged) v caps the result at its final step.
double valid_prediction_time(const Trajectory& v, const Trajectory& u,
                             const VptConfig& cfg);

// Mean over training steps of ||u(t + tau) - u(t)||.
double persistence_normalizer(const Trajectory& train);

struct MapErrorConfig {
  double tau_int = 0.001;
  Eigen::Index n_predict = 2000;  // evaluation horizon in steps
  double persistence_norm = 1.0;  // E_map_bar, > 0
};

// Per-step normalized map error: denormalizes v(t - tau), integrates the
// true flow forward by tau with RK4 at tau_int, renormalizes, and returns
// ||v(t) - F(v(t - tau), tau)|| / E_map_bar. Errors for delay systems.
std::vector<double> normalized_map_error(const Trajectory& v,
                                         const SystemSpec& spec,
                                         const MapErrorConfig& cfg,
                                         const NormalizationStats& stats);

double mean_map_error(const std::vector<double>& per_step);

struct PsdEstimate {
  std::vector<double> frequencies;  // ascending, cycles per time unit
  std::vector<double> power;        // power per unit frequency
};

// Welch estimate: mean-removed series split into segments (default 4096
// samples, shortened to the largest power of two that fits), Hann taper,
// 50% overlap, one-sided scaling.
PsdEstimate welch_psd(const std::vector<double>& series, double dt,
                      Eigen::Index segment_length = 4096);

// Relative L2 distance between two estimates on the same frequency grid.
double psd_distance(const PsdEstimate& a, const PsdEstimate& b);

// Two-column CSV: frequency,power.
void write_psd_csv(const PsdEstimate& psd, const std::string& path);

}  // namespace rcf
