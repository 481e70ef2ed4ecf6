#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>

#include "rcf/trajectory.hpp"

namespace rcf {

enum class SystemName { Lorenz, Rossler, DoubleScroll, MackeyGlass };

std::string to_string(SystemName name);
SystemName system_from_string(const std::string& s);

/// One of the four benchmark systems. `delay` is positive only for
/// Mackey-Glass; `parameters` holds the named constants of the governing
/// equations.
struct SystemSpec {
  SystemName name = SystemName::Lorenz;
  int dimension = 3;
  double delay = 0.0;
  std::map<std::string, double> parameters;

  static SystemSpec lorenz();
  static SystemSpec rossler();
  static SystemSpec double_scroll();
  static SystemSpec mackey_glass();

  // Default transient length (natural time units) discarded before sampling.
  double default_settle_time() const;
};

// Time derivative of `state` under the governing equations. `delayed_state`
// must be present iff spec.delay > 0.
Eigen::VectorXd flow(const SystemSpec& spec, const Eigen::VectorXd& state,
                     const Eigen::VectorXd* delayed_state = nullptr);

// Classical 4-stage Runge-Kutta update.
template <typename Flow>
Eigen::VectorXd rk4_step(Flow&& f, const Eigen::VectorXd& state, double dt) {
  const Eigen::VectorXd k1 = f(state);
  const Eigen::VectorXd k2 = f(state + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = f(state + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = f(state + dt * k3);
  return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Ring buffer of past states on the tau_int grid, spanning at least the
/// system delay. Supports linearly interpolated lookup at off-grid times
/// (needed for RK4 half-steps).
class DdeHistory {
 public:
  DdeHistory(Eigen::Index dim, double tau_int, double span);

  void fill_constant(const Eigen::VectorXd& value);
  void push(const Eigen::VectorXd& state);  // advances current time by tau_int
  // State at (current time - lag), 0 <= lag <= span.
  Eigen::VectorXd at_lag(double lag) const;
  const Eigen::VectorXd& current() const;
  // Entry j grid steps in the past (j = 0 is the current state).
  Eigen::VectorXd& entry_back(Eigen::Index j);
  const Eigen::VectorXd& entry_back(Eigen::Index j) const;
  Eigen::Index size() const { return Eigen::Index(buffer_.size()); }
  double tau_int() const { return tau_int_; }

 private:
  std::vector<Eigen::VectorXd> buffer_;  // ring, buffer_[head_] = most recent
  Eigen::Index head_ = 0;
  double tau_int_;
};

/// Stepper that integrates either an ODE (plain RK4) or a DDE (RK4 with
/// history lookups) with a fixed internal step tau_int.
class Integrator {
 public:
  Integrator(SystemSpec spec, const Eigen::VectorXd& initial, double tau_int);

  void step();
  void advance(double duration);
  const Eigen::VectorXd& state() const;
  void set_state(const Eigen::VectorXd& s);
  // Nudge the first state component by delta (current state only).
  void perturb(double delta);
  // Shrink the difference to `ref` by factor `scale`, across the whole
  // history for delay systems. Both integrators must be time-aligned.
  void rescale_towards(const Integrator& ref, double scale);
  const SystemSpec& spec() const { return spec_; }

 private:
  SystemSpec spec_;
  double tau_int_;
  Eigen::VectorXd state_;               // ODE path
  std::optional<DdeHistory> history_;   // DDE path
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> flow_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      dde_flow_;
};

// Uniform draw from a system-specific bounding box near the attractor. For
// Mackey-Glass the result is the constant history value.
Eigen::VectorXd random_initial(const SystemSpec& spec, std::mt19937_64& rng);

// Integrates from `initial` (constant history for delay systems), discards
// settle_time, then returns n samples spaced tau apart. tau must be an
// integer multiple of tau_int. settle_time < 0 selects the system default.
Trajectory integrate_and_sample(const SystemSpec& spec,
                                const Eigen::VectorXd& initial, double tau_int,
                                double tau, Eigen::Index n,
                                double settle_time = -1.0);

// Convenience: random initial condition drawn from rng.
Trajectory integrate_and_sample(const SystemSpec& spec, double tau_int,
                                double tau, Eigen::Index n, double settle_time,
                                std::mt19937_64& rng);

// Benettin two-trajectory estimate of the maximal Lyapunov exponent.
// duration must cover at least 100 renormalization intervals.
double estimate_max_lyapunov(const SystemSpec& spec, double duration,
                             double renorm_interval, std::mt19937_64& rng);

// Generic variant for arbitrary flows (used by tests and simple systems).
double estimate_max_lyapunov(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& initial, double dt, double duration,
    double renorm_interval);

}  // namespace rcf
