#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "rcf/metrics.hpp"
#include "rcf/systems.hpp"
#include "rcf/trajectory.hpp"

using namespace rcf;

namespace {

Trajectory make_traj(const Eigen::MatrixXd& samples, double dt) {
  Trajectory traj;
  traj.samples = samples;
  traj.dt = dt;
  return traj;
}

}  // namespace

TEST_CASE("vpt trivial identities") {
  const VptConfig cfg{0.9, 2.0};
  Trajectory u = make_traj(Eigen::MatrixXd::Random(100, 3), 0.06);
  u.samples.col(0).setConstant(1.0);  // ensure a nonzero norm

  // Identical prediction: full window, in Lyapunov times.
  CHECK(valid_prediction_time(u, u, cfg) ==
        doctest::Approx(100.0 * 0.06 / 2.0).epsilon(1e-12));

  // Offset of norm 10 on a normalized-scale truth: first step exceeds.
  Trajectory v = u;
  v.samples.col(0).array() += 10.0;
  CHECK(valid_prediction_time(v, u, cfg) == 0.0);
}

TEST_CASE("vpt finds the first threshold crossing") {
  Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(10, 1);
  truth.col(0).setOnes();  // <||u||^2> = 1
  Trajectory u = make_traj(truth, 0.5);
  Trajectory v = u;
  v.samples(7, 0) += 2.0;  // error 2 > kappa at index 7
  const VptConfig cfg{0.9, 1.0};
  CHECK(valid_prediction_time(v, u, cfg) == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("vpt handles truncated predictions") {
  Trajectory u = make_traj(Eigen::MatrixXd::Ones(100, 1), 0.1);
  Trajectory v = make_traj(Eigen::MatrixXd::Ones(30, 1), 0.1);
  const VptConfig cfg{0.9, 1.0};
  // Never exceeds: capped at the truncated length.
  CHECK(valid_prediction_time(v, u, cfg) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("vpt monotonicity and scale invariance") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd base(200, 2), err(200, 2);
  for (Eigen::Index i = 0; i < base.size(); ++i) base.data()[i] = gauss(rng);
  for (Eigen::Index i = 0; i < err.size(); ++i) err.data()[i] = gauss(rng);

  Trajectory u = make_traj(base, 0.06);
  Trajectory v1 = make_traj(base + err, 0.06);
  Trajectory v2 = make_traj(base + 0.5 * err, 0.06);
  const VptConfig cfg{0.9, 1.0};
  CHECK(valid_prediction_time(v2, u, cfg) >= valid_prediction_time(v1, u, cfg));

  Trajectory u3 = make_traj(3.0 * base, 0.06);
  Trajectory v3 = make_traj(3.0 * (base + err), 0.06);
  CHECK(valid_prediction_time(v3, u3, cfg) ==
        doctest::Approx(valid_prediction_time(v1, u, cfg)).epsilon(1e-12));
}

TEST_CASE("vpt rejects mismatched grids") {
  Trajectory u = make_traj(Eigen::MatrixXd::Ones(10, 1), 0.1);
  Trajectory v = make_traj(Eigen::MatrixXd::Ones(10, 1), 0.2);
  CHECK_THROWS(valid_prediction_time(v, u, VptConfig{}));
}

TEST_CASE("persistence normalizer") {
  Eigen::MatrixXd alternating(6, 1);
  alternating << 1, -1, 1, -1, 1, -1;
  CHECK(persistence_normalizer(make_traj(alternating, 1.0)) == 2.0);
  CHECK_THROWS(persistence_normalizer(make_traj(Eigen::MatrixXd::Ones(1, 1), 1.0)));
}

TEST_CASE("map error of the true trajectory is negligible") {
  std::mt19937_64 rng(72);
  const SystemSpec spec = SystemSpec::lorenz();
  Trajectory traj = integrate_and_sample(spec, 0.001, 0.06, 600, 20.0, rng);
  const NormalizationStats stats = compute_stats(traj, 500);
  const Trajectory norm = normalize(traj, stats);

  MapErrorConfig cfg;
  cfg.n_predict = 100;
  cfg.persistence_norm = persistence_normalizer(norm);
  const auto errors = normalized_map_error(norm, spec, cfg, stats);
  REQUIRE(errors.size() == 99);
  for (double e : errors) CHECK(e < 1e-8);
}

TEST_CASE("map error flags genuine one-step deviations") {
  std::mt19937_64 rng(73);
  const SystemSpec spec = SystemSpec::lorenz();
  Trajectory traj = integrate_and_sample(spec, 0.001, 0.06, 200, 20.0, rng);
  const NormalizationStats stats = compute_stats(traj, 200);
  Trajectory norm = normalize(traj, stats);
  norm.samples(50, 0) += 1.0;

  MapErrorConfig cfg;
  cfg.n_predict = 100;
  cfg.persistence_norm = persistence_normalizer(norm);
  const auto errors = normalized_map_error(norm, spec, cfg, stats);
  CHECK(errors[49] > 0.1);   // the corrupted sample itself
  CHECK(errors[51] < 1e-6);  // clean steps stay clean
}

TEST_CASE("map error is undefined for delay systems") {
  Trajectory v = make_traj(Eigen::MatrixXd::Ones(10, 1), 0.06);
  NormalizationStats stats;
  stats.mean = Eigen::VectorXd::Zero(1);
  stats.std = Eigen::VectorXd::Ones(1);
  CHECK_THROWS(
      normalized_map_error(v, SystemSpec::mackey_glass(), MapErrorConfig{}, stats));
}

TEST_CASE("mean map error") {
  CHECK(mean_map_error({1.0, 2.0, 3.0}) == 2.0);
  CHECK_THROWS(mean_map_error({}));
}

TEST_CASE("welch localizes a pure tone") {
  const double f = 0.05, dt = 1.0;
  std::vector<double> series(4096);
  for (size_t i = 0; i < series.size(); ++i)
    series[i] = std::sin(2.0 * M_PI * f * double(i));
  const PsdEstimate psd = welch_psd(series, dt);

  size_t peak = 0;
  for (size_t k = 1; k < psd.power.size(); ++k)
    if (psd.power[k] > psd.power[peak]) peak = k;
  const double bin_width = psd.frequencies[1] - psd.frequencies[0];
  CHECK(std::abs(psd.frequencies[peak] - f) <= bin_width);
  for (double p : psd.power) CHECK(p >= 0.0);
}

TEST_CASE("welch satisfies parseval on white noise") {
  std::mt19937_64 rng(74);
  std::normal_distribution<double> gauss;
  std::vector<double> series(1 << 15);
  for (auto& x : series) x = gauss(rng);
  const PsdEstimate psd = welch_psd(series, 1.0);
  const double df = psd.frequencies[1] - psd.frequencies[0];
  double integral = 0.0;
  for (double p : psd.power) integral += p * df;
  CHECK(integral == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("welch preserves the power ratio of two tones") {
  const double dt = 1.0;
  std::vector<double> series(1 << 14);
  for (size_t i = 0; i < series.size(); ++i)
    series[i] = std::sin(2.0 * M_PI * 0.05 * double(i)) +
                0.5 * std::sin(2.0 * M_PI * 0.15 * double(i));
  const PsdEstimate psd = welch_psd(series, dt);
  const double df = psd.frequencies[1] - psd.frequencies[0];
  auto band_power = [&](double f) {
    const auto center = size_t(std::llround(f / df));
    double sum = 0.0;
    for (size_t k = center - 3; k <= center + 3; ++k) sum += psd.power[k];
    return sum;
  };
  CHECK(band_power(0.05) / band_power(0.15) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("welch input validation") {
  CHECK_THROWS(welch_psd(std::vector<double>(4), 1.0));
}

TEST_CASE("psd distance") {
  PsdEstimate a, b;
  a.frequencies = b.frequencies = {0.0, 0.1, 0.2};
  b.power = {1.0, 2.0, 3.0};
  a.power = b.power;
  CHECK(psd_distance(a, b) == 0.0);
  for (auto& p : a.power) p *= 2.0;
  CHECK(psd_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));
  a.power.pop_back();
  CHECK_THROWS(psd_distance(a, b));
}

TEST_CASE("psd csv export") {
  PsdEstimate psd;
  psd.frequencies = {0.0, 0.5};
  psd.power = {1.25, 2.5};
  const std::string path = "/tmp/rcf_test_psd.csv";
  write_psd_csv(psd, path);
  std::FILE* fp = std::fopen(path.c_str(), "r");
  REQUIRE(fp != nullptr);
  char header[64];
  REQUIRE(std::fgets(header, sizeof(header), fp) != nullptr);
  CHECK(std::string(header) == "frequency,power\n");
  std::fclose(fp);
  std::remove(path.c_str());
}
