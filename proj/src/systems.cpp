#include "rcf/systems.hpp"

#include <cmath>
#include <stdexcept>

namespace rcf {

namespace {

double param(const SystemSpec& spec, const std::string& key) {
  auto it = spec.parameters.find(key);
  if (it == spec.parameters.end())
    throw std::invalid_argument("missing system parameter: " + key);
  return it->second;
}

using OdeFlow = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using DdeFlow =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

OdeFlow make_ode_flow(const SystemSpec& spec) {
  switch (spec.name) {
    case SystemName::Lorenz: {
      const double sigma = param(spec, "sigma");
      const double rho = param(spec, "rho");
      const double beta = param(spec, "beta");
      return [=](const Eigen::VectorXd& u) {
        Eigen::VectorXd du(3);
        du[0] = sigma * (u[1] - u[0]);
        du[1] = u[0] * (rho - u[2]) - u[1];
        du[2] = u[0] * u[1] - beta * u[2];
        return du;
      };
    }
    case SystemName::Rossler: {
      const double a = param(spec, "a");
      const double b = param(spec, "b");
      const double c = param(spec, "c");
      return [=](const Eigen::VectorXd& u) {
        Eigen::VectorXd du(3);
        du[0] = -u[1] - u[2];
        du[1] = u[0] + a * u[1];
        du[2] = b + u[2] * (u[0] - c);
        return du;
      };
    }
    case SystemName::DoubleScroll: {
      const double r1 = param(spec, "R1");
      const double r2 = param(spec, "R2");
      const double r4 = param(spec, "R4");
      const double ir = param(spec, "Ir");
      const double alpha = param(spec, "alpha");
      return [=](const Eigen::VectorXd& u) {
        const double dv = u[0] - u[1];
        const double g = 2.0 * ir * std::sinh(alpha * dv);
        Eigen::VectorXd du(3);
        du[0] = u[0] / r1 - dv / r2 - g;
        du[1] = dv / r2 + g - u[2];
        du[2] = u[1] - r4 * u[2];
        return du;
      };
    }
    case SystemName::MackeyGlass:
      throw std::invalid_argument("Mackey-Glass requires a delayed state");
  }
  throw std::logic_error("unreachable");
}

DdeFlow make_dde_flow(const SystemSpec& spec) {
  const double a = param(spec, "a");
  const double b = param(spec, "b");
  const double c = param(spec, "c");
  return [=](const Eigen::VectorXd& u, const Eigen::VectorXd& ud) {
    Eigen::VectorXd du(1);
    du[0] = a * ud[0] / (1.0 + std::pow(ud[0], c)) - b * u[0];
    return du;
  };
}

Eigen::Index steps_for(double duration, double dt, const char* what) {
  const double raw = duration / dt;
  const auto n = Eigen::Index(std::llround(raw));
  if (std::abs(double(n) * dt - duration) > 1e-9 * std::max(1.0, duration))
    throw std::invalid_argument(std::string(what) +
                                " must be an integer multiple of the step");
  return n;
}

}  // namespace

std::string to_string(SystemName name) {
  switch (name) {
    case SystemName::Lorenz: return "lorenz";
    case SystemName::Rossler: return "rossler";
    case SystemName::DoubleScroll: return "doublescroll";
    case SystemName::MackeyGlass: return "mackeyglass";
  }
  return "?";
}

SystemName system_from_string(const std::string& s) {
  if (s == "lorenz") return SystemName::Lorenz;
  if (s == "rossler") return SystemName::Rossler;
  if (s == "doublescroll") return SystemName::DoubleScroll;
  if (s == "mackeyglass") return SystemName::MackeyGlass;
  throw std::invalid_argument("unknown system: " + s);
}

SystemSpec SystemSpec::lorenz() {
  return {SystemName::Lorenz, 3, 0.0,
          {{"sigma", 10.0}, {"rho", 28.0}, {"beta", 8.0 / 3.0}}};
}

SystemSpec SystemSpec::rossler() {
  return {SystemName::Rossler, 3, 0.0, {{"a", 0.2}, {"b", 0.2}, {"c", 5.7}}};
}

SystemSpec SystemSpec::double_scroll() {
  return {SystemName::DoubleScroll,
          3,
          0.0,
          {{"R1", 1.2}, {"R2", 3.44}, {"R4", 0.193}, {"Ir", 2.25e-5},
           {"alpha", 11.6}}};
}

SystemSpec SystemSpec::mackey_glass() {
  return {SystemName::MackeyGlass, 1, 2.0,
          {{"a", 2.0}, {"b", 1.0}, {"c", 9.65}}};
}

double SystemSpec::default_settle_time() const {
  switch (name) {
    case SystemName::Lorenz: return 20.0;
    case SystemName::Rossler: return 100.0;
    case SystemName::DoubleScroll: return 100.0;
    case SystemName::MackeyGlass: return 100.0;
  }
  return 20.0;
}

Eigen::VectorXd flow(const SystemSpec& spec, const Eigen::VectorXd& state,
                     const Eigen::VectorXd* delayed_state) {
  if (spec.delay > 0.0) {
    if (delayed_state == nullptr)
      throw std::invalid_argument("flow: delay system needs a delayed state");
    return make_dde_flow(spec)(state, *delayed_state);
  }
  return make_ode_flow(spec)(state);
}

DdeHistory::DdeHistory(Eigen::Index dim, double tau_int, double span)
    : tau_int_(tau_int) {
  const auto slots = Eigen::Index(std::ceil(span / tau_int)) + 2;
  buffer_.assign(size_t(slots), Eigen::VectorXd::Zero(dim));
}

void DdeHistory::fill_constant(const Eigen::VectorXd& value) {
  for (auto& s : buffer_) s = value;
  head_ = 0;
}

void DdeHistory::push(const Eigen::VectorXd& state) {
  head_ = (head_ + 1) % Eigen::Index(buffer_.size());
  buffer_[size_t(head_)] = state;
}

Eigen::VectorXd DdeHistory::at_lag(double lag) const {
  const double offset = lag / tau_int_;
  const auto i0 = Eigen::Index(std::floor(offset));
  const double frac = offset - double(i0);
  const auto n = Eigen::Index(buffer_.size());
  if (i0 + 1 >= n || lag < 0.0)
    throw std::out_of_range("DdeHistory: lag outside buffer span");
  const auto back = [&](Eigen::Index j) -> const Eigen::VectorXd& {
    return buffer_[size_t(((head_ - j) % n + n) % n)];
  };
  if (frac == 0.0) return back(i0);
  return (1.0 - frac) * back(i0) + frac * back(i0 + 1);
}

const Eigen::VectorXd& DdeHistory::current() const {
  return buffer_[size_t(head_)];
}

Eigen::VectorXd& DdeHistory::entry_back(Eigen::Index j) {
  const auto n = Eigen::Index(buffer_.size());
  return buffer_[size_t(((head_ - j) % n + n) % n)];
}

const Eigen::VectorXd& DdeHistory::entry_back(Eigen::Index j) const {
  const auto n = Eigen::Index(buffer_.size());
  return buffer_[size_t(((head_ - j) % n + n) % n)];
}

Integrator::Integrator(SystemSpec spec, const Eigen::VectorXd& initial,
                       double tau_int)
    : spec_(std::move(spec)), tau_int_(tau_int) {
  if (!(tau_int > 0.0)) throw std::invalid_argument("tau_int must be positive");
  if (spec_.delay > 0.0) {
    history_.emplace(spec_.dimension, tau_int, spec_.delay);
    history_->fill_constant(initial);
  } else {
    state_ = initial;
  }
}

void Integrator::step() {
  const double h = tau_int_;
  if (history_) {
    if (!dde_flow_) dde_flow_ = make_dde_flow(spec_);
    const auto& f = dde_flow_;
    const Eigen::VectorXd& x = history_->current();
    const Eigen::VectorXd d0 = history_->at_lag(spec_.delay);
    const Eigen::VectorXd d1 = history_->at_lag(spec_.delay - 0.5 * h);
    const Eigen::VectorXd d2 = history_->at_lag(spec_.delay - h);
    const Eigen::VectorXd k1 = f(x, d0);
    const Eigen::VectorXd k2 = f(x + 0.5 * h * k1, d1);
    const Eigen::VectorXd k3 = f(x + 0.5 * h * k2, d1);
    const Eigen::VectorXd k4 = f(x + h * k3, d2);
    history_->push(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  } else {
    if (!flow_) flow_ = make_ode_flow(spec_);
    state_ = rk4_step(flow_, state_, h);
  }
}

void Integrator::advance(double duration) {
  const Eigen::Index n = steps_for(duration, tau_int_, "advance duration");
  for (Eigen::Index i = 0; i < n; ++i) step();
}

const Eigen::VectorXd& Integrator::state() const {
  return history_ ? history_->current() : state_;
}

void Integrator::set_state(const Eigen::VectorXd& s) {
  if (history_)
    history_->fill_constant(s);
  else
    state_ = s;
}

void Integrator::perturb(double delta) {
  if (history_)
    history_->entry_back(0)[0] += delta;
  else
    state_[0] += delta;
}

void Integrator::rescale_towards(const Integrator& ref, double scale) {
  if (history_) {
    for (Eigen::Index j = 0; j < history_->size(); ++j) {
      const Eigen::VectorXd& r = ref.history_->entry_back(j);
      Eigen::VectorXd& mine = history_->entry_back(j);
      mine = r + (mine - r) * scale;
    }
  } else {
    state_ = ref.state_ + (state_ - ref.state_) * scale;
  }
}

Eigen::VectorXd random_initial(const SystemSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd u(spec.dimension);
  for (int i = 0; i < spec.dimension; ++i) u[i] = unit(rng);
  switch (spec.name) {
    case SystemName::Lorenz:
      return Eigen::Vector3d(-15.0 + 30.0 * u[0], -15.0 + 30.0 * u[1],
                             15.0 + 20.0 * u[2]);
    case SystemName::Rossler:
      return Eigen::Vector3d(-8.0 + 16.0 * u[0], -8.0 + 16.0 * u[1], u[2]);
    case SystemName::DoubleScroll:
      return Eigen::Vector3d(0.1 + 0.4 * u[0], 0.1 + 0.4 * u[1],
                             -0.25 + 0.5 * u[2]);
    case SystemName::MackeyGlass:
      return Eigen::VectorXd::Constant(1, 0.5 + u[0]);
  }
  throw std::logic_error("unreachable");
}

Trajectory integrate_and_sample(const SystemSpec& spec,
                                const Eigen::VectorXd& initial, double tau_int,
                                double tau, Eigen::Index n,
                                double settle_time) {
  if (n < 1) throw std::invalid_argument("integrate_and_sample: n < 1");
  const Eigen::Index per_sample = steps_for(tau, tau_int, "tau");
  if (per_sample < 1)
    throw std::invalid_argument("integrate_and_sample: tau < tau_int");
  if (settle_time < 0.0) settle_time = spec.default_settle_time();

  Integrator integ(spec, initial, tau_int);
  const Eigen::Index settle_steps = Eigen::Index(std::llround(settle_time / tau_int));
  for (Eigen::Index i = 0; i < settle_steps; ++i) integ.step();

  Trajectory traj;
  traj.samples.resize(n, spec.dimension);
  traj.dt = tau;
  traj.t0 = double(settle_steps) * tau_int;
  traj.samples.row(0) = integ.state();
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < per_sample; ++j) integ.step();
    traj.samples.row(i) = integ.state();
    if (!traj.samples.row(i).allFinite())
      throw std::runtime_error("integrate_and_sample: trajectory diverged");
  }
  return traj;
}

Trajectory integrate_and_sample(const SystemSpec& spec, double tau_int,
                                double tau, Eigen::Index n, double settle_time,
                                std::mt19937_64& rng) {
  return integrate_and_sample(spec, random_initial(spec, rng), tau_int, tau, n,
                              settle_time);
}

double estimate_max_lyapunov(const SystemSpec& spec, double duration,
                             double renorm_interval, std::mt19937_64& rng) {
  if (duration < 100.0 * renorm_interval)
    throw std::invalid_argument(
        "estimate_max_lyapunov: duration must cover >= 100 intervals");
  const double tau_int = 0.001;
  const double d0 = 1e-8;

  Integrator a(spec, random_initial(spec, rng), tau_int);
  a.advance(spec.default_settle_time());
  Integrator b = a;
  b.perturb(d0);

  const auto n_intervals = Eigen::Index(std::llround(duration / renorm_interval));
  double log_sum = 0.0;
  for (Eigen::Index i = 0; i < n_intervals; ++i) {
    a.advance(renorm_interval);
    b.advance(renorm_interval);
    const double gap = (b.state() - a.state()).norm();
    if (!(gap > 0.0) || !std::isfinite(gap))
      throw std::runtime_error("estimate_max_lyapunov: degenerate gap");
    log_sum += std::log(gap / d0);
    // pull b back to distance d0 along the current separation direction
    b.rescale_towards(a, d0 / gap);
  }
  return log_sum / duration;
}

double estimate_max_lyapunov(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& initial, double dt, double duration,
    double renorm_interval) {
  if (duration < 100.0 * renorm_interval)
    throw std::invalid_argument(
        "estimate_max_lyapunov: duration must cover >= 100 intervals");
  const double d0 = 1e-8;
  Eigen::VectorXd x = initial;
  Eigen::VectorXd y = initial;
  y[0] += d0;
  const auto per_interval = Eigen::Index(std::llround(renorm_interval / dt));
  const auto n_intervals = Eigen::Index(std::llround(duration / renorm_interval));
  double log_sum = 0.0;
  for (Eigen::Index i = 0; i < n_intervals; ++i) {
    for (Eigen::Index j = 0; j < per_interval; ++j) {
      x = rk4_step(f, x, dt);
      y = rk4_step(f, y, dt);
    }
    const double gap = (y - x).norm();
    if (!(gap > 0.0) || !std::isfinite(gap)) return 0.0;
    log_sum += std::log(gap / d0);
    y = x + (y - x) * (d0 / gap);
  }
  return log_sum / duration;
}

}  // namespace rcf
