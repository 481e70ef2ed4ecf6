#include <doctest.h>

#include <cmath>
#include <random>

#include "rcf/systems.hpp"

using namespace rcf;

TEST_CASE("lorenz flow matches direct substitution") {
  const SystemSpec spec = SystemSpec::lorenz();
  Eigen::Vector3d u(1.0, 1.0, 1.0);
  const Eigen::VectorXd du = flow(spec, u);
  CHECK(du[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(du[1] == doctest::Approx(26.0).epsilon(1e-15));
  CHECK(du[2] == doctest::Approx(-5.0 / 3.0).epsilon(1e-15));

  const double w = std::sqrt(72.0);
  Eigen::Vector3d fp(w, w, 27.0);
  CHECK(flow(spec, fp).norm() < 1e-12);
}

TEST_CASE("rossler flow at the origin") {
  const Eigen::VectorXd du =
      flow(SystemSpec::rossler(), Eigen::Vector3d::Zero());
  CHECK(du[0] == 0.0);
  CHECK(du[1] == 0.0);
  CHECK(du[2] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("flow argument validation") {
  CHECK_THROWS(flow(SystemSpec::mackey_glass(), Eigen::VectorXd::Ones(1)));
  Eigen::VectorXd delayed = Eigen::VectorXd::Ones(1);
  CHECK_NOTHROW(
      flow(SystemSpec::mackey_glass(), Eigen::VectorXd::Ones(1), &delayed));
}

TEST_CASE("rk4 step identities") {
  const Eigen::VectorXd s = Eigen::Vector3d(1.0, -2.0, 3.0);
  auto zero = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(Eigen::VectorXd::Zero(x.size()));
  };
  CHECK((rk4_step(zero, s, 0.37) - s).norm() == 0.0);

  // x' = x, one step of h: RK4 polynomial 1 + h + h^2/2 + h^3/6 + h^4/24.
  auto identity = [](const Eigen::VectorXd& x) { return x; };
  Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  const double h = 0.1;
  const double expected = 1.0 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24;
  CHECK(rk4_step(identity, one, h)[0] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(rk4_step(identity, one, h)[0] == doctest::Approx(1.1051708333333334).epsilon(1e-12));
}

TEST_CASE("rk4 conserves harmonic oscillator energy") {
  auto f = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(Eigen::Vector2d(x[1], -x[0]));
  };
  Eigen::VectorXd x = Eigen::Vector2d(1.0, 0.0);
  for (int i = 0; i < 1000; ++i) x = rk4_step(f, x, 0.001);
  CHECK(std::abs(x.squaredNorm() - 1.0) < 1e-10);
}

TEST_CASE("rk4 is fourth order") {
  auto f = [](const Eigen::VectorXd& x) { return x; };
  // Global error over [0, 1] for x' = x shrinks ~16x when dt halves.
  auto global_error = [&](double dt) {
    Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    const auto n = Eigen::Index(std::llround(1.0 / dt));
    for (Eigen::Index i = 0; i < n; ++i) x = rk4_step(f, x, dt);
    return std::abs(x[0] - std::exp(1.0));
  };
  for (double dt : {1e-2, 5e-3}) {
    const double ratio = global_error(dt) / global_error(dt / 2);
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
  }
}

TEST_CASE("integrate_and_sample subsampling matches dense integration") {
  const SystemSpec spec = SystemSpec::lorenz();
  const Eigen::VectorXd init = Eigen::Vector3d(1.0, 2.0, 20.0);
  const Trajectory coarse =
      integrate_and_sample(spec, init, 0.001, 0.06, 5, 1.0);
  const Trajectory dense =
      integrate_and_sample(spec, init, 0.001, 0.001, 241, 1.0);
  // 60 internal steps per coarse sample.
  for (Eigen::Index i = 0; i < coarse.n(); ++i)
    CHECK((coarse.samples.row(i) - dense.samples.row(60 * i)).norm() == 0.0);
}

TEST_CASE("integrate_and_sample rejects off-grid tau") {
  CHECK_THROWS(integrate_and_sample(SystemSpec::lorenz(),
                                    Eigen::Vector3d(1, 1, 1), 0.001, 0.0605, 2,
                                    1.0));
}

TEST_CASE("lorenz samples stay in the attractor box after settling") {
  std::mt19937_64 rng(11);
  const SystemSpec spec = SystemSpec::lorenz();
  for (int trial = 0; trial < 3; ++trial) {
    const Trajectory traj = integrate_and_sample(spec, 0.001, 0.06, 200, 20.0, rng);
    for (Eigen::Index i = 0; i < traj.n(); ++i) {
      CHECK(traj.samples(i, 2) > 0.0);
      CHECK(traj.samples(i, 2) < 50.0);
    }
  }
}

TEST_CASE("trajectories are deterministic in the seed") {
  std::mt19937_64 rng1(99), rng2(99);
  const SystemSpec spec = SystemSpec::rossler();
  const Trajectory a = integrate_and_sample(spec, 0.001, 0.02, 50, 10.0, rng1);
  const Trajectory b = integrate_and_sample(spec, 0.001, 0.02, 50, 10.0, rng2);
  CHECK((a.samples - b.samples).norm() == 0.0);
}

TEST_CASE("mackey-glass holds its fixed point") {
  // a x/(1+x^c) = b x has the nontrivial root x = (a/b - 1)^(1/c).
  const SystemSpec spec = SystemSpec::mackey_glass();
  const double a = spec.parameters.at("a");
  const double b = spec.parameters.at("b");
  const double c = spec.parameters.at("c");
  const double xstar = std::pow(a / b - 1.0, 1.0 / c);
  const Trajectory traj = integrate_and_sample(
      spec, Eigen::VectorXd::Constant(1, xstar), 0.001, 0.001, 1000, 0.0);
  for (Eigen::Index i = 0; i < traj.n(); ++i)
    CHECK(std::abs(traj.samples(i, 0) - xstar) < 1e-8);
}

TEST_CASE("dde history interpolates linearly") {
  DdeHistory hist(1, 0.5, 2.0);
  hist.fill_constant(Eigen::VectorXd::Zero(1));
  for (double v : {1.0, 2.0, 3.0, 4.0}) hist.push(Eigen::VectorXd::Constant(1, v));
  CHECK(hist.current()[0] == 4.0);
  CHECK(hist.at_lag(0.5)[0] == 3.0);
  CHECK(hist.at_lag(0.25)[0] == doctest::Approx(3.5).epsilon(1e-15));
  CHECK_THROWS(hist.at_lag(-0.1));
}

TEST_CASE("lyapunov estimate of a linear flow") {
  // diag(0.5, -1): maximal exponent 0.5 exactly.
  auto f = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(Eigen::Vector2d(0.5 * x[0], -x[1]));
  };
  // Short horizon: the trajectory itself grows like e^{t/2}, and the 1e-8
  // probe gap must stay above the floating-point resolution at that scale.
  const double lam = estimate_max_lyapunov(f, Eigen::Vector2d(1.0, 1.0), 0.01,
                                           10.0, 0.1);
  CHECK(lam == doctest::Approx(0.5).epsilon(0.02));

  auto contraction = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(-x);
  };
  CHECK(estimate_max_lyapunov(contraction, Eigen::VectorXd::Ones(1), 0.01, 60.0,
                              0.5) <= 0.0);
}

TEST_CASE("lyapunov estimate rejects short durations") {
  auto f = [](const Eigen::VectorXd& x) { return x; };
  CHECK_THROWS(
      estimate_max_lyapunov(f, Eigen::VectorXd::Ones(1), 0.01, 10.0, 0.5));
}

TEST_CASE("lorenz lyapunov exponent near the literature value") {
  std::mt19937_64 rng(5);
  const double lam =
      estimate_max_lyapunov(SystemSpec::lorenz(), 200.0, 1.0, rng);
  CHECK(lam > 0.75);
  CHECK(lam < 1.05);
}

TEST_CASE("system name round trip") {
  for (auto name : {SystemName::Lorenz, SystemName::Rossler,
                    SystemName::DoubleScroll, SystemName::MackeyGlass})
    CHECK(system_from_string(to_string(name)) == name);
  CHECK_THROWS(system_from_string("henon"));
}
