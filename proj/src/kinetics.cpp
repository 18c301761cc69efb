#include "entacc/kinetics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "entacc/csv.hpp"
#include "entacc/errors.hpp"

namespace entacc {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kBlowUpBound = 1.5;
constexpr double kMinStepFactor = 1e-14;

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

double reduced_rhs_unchecked(double f3, const EffectiveCouplings& c, double w) {
  const double w2 = w * w;
  return w2 * w * c.Vt - w2 * (c.Vt + c.Jt) * f3 + c.Jt * f3 * f3 * f3 - c.Kt * w2 * f3;
}

// Drives an N-dimensional autonomous system across the sample grid. The
// stepper never steps past a sample time, so samples are exact step ends.
// Component 0 (N == 1) or 3 (full state) is f3, which the blow-up guard watches.
template <std::size_t N, class Rhs, class Observe>
void drive(const Rhs& rhs, std::array<double, N> y, const IntegratorControls& controls,
           const std::vector<double>& grid, Observe observe, Trajectory& out) {
  using State = std::array<double, N>;
  const double max_dt = std::isfinite(controls.max_step) ? controls.max_step : 0.0;
  auto stepper = odeint::make_controlled(controls.abs_tol, controls.rel_tol, max_dt,
                                         odeint::runge_kutta_dopri5<State>());
  auto system = [&rhs](const State& x, State& dxdt, double /*t*/) { dxdt = rhs(x); };

  double t = 0.0;
  double dt_try = std::min({controls.sample_stride, grid.back() / 10.0,
                            max_dt > 0.0 ? max_dt : controls.sample_stride});
  observe(y, 0);

  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double target = grid[i];
    while (t < target) {
      const double remaining = target - t;
      const bool clipped = dt_try >= remaining;
      double h = clipped ? remaining : dt_try;
      double t_step = t;
      State trial = y;
      const auto result = stepper.try_step(system, trial, t_step, h);
      if (result == odeint::success) {
        ++out.accepted_steps;
        const double f3 = trial[N == 1 ? 0 : 3];
        if (!std::isfinite(f3) || std::abs(f3) > kBlowUpBound) {
          throw IntegrationError(IntegrationError::Kind::BlowUp, t, y[N == 1 ? 0 : 3],
                                 fmt::format("f3 left [-{0}, {0}] near t = {1} (f3 = {2})",
                                             kBlowUpBound, t_step, f3));
        }
        y = trial;
        t = clipped ? target : t_step;
        // A clipped step says nothing about the natural step size; only grow.
        dt_try = clipped ? std::max(dt_try, h) : h;
      } else {
        ++out.rejected_steps;
        dt_try = h;
        if (h < kMinStepFactor * std::max(1.0, std::abs(t))) {
          throw IntegrationError(IntegrationError::Kind::StepUnderflow, t, y[N == 1 ? 0 : 3],
                                 fmt::format("step size underflow at t = {} (h = {})", t, h));
        }
      }
    }
    observe(y, i);
  }
}

void finalize(Trajectory& traj, const IntegratorControls& controls) {
  const double window = controls.plateau_window.value_or(
      default_plateau_window(traj.couplings, traj.thermal));
  traj.plateau = detect_plateau(traj.times, traj.entropy, window, controls.plateau_tol);
}

}  // namespace

EffectiveCouplings make_couplings(double Jt, double Vt, double Kt) {
  if (!finite_non_negative(Jt) || !finite_non_negative(Vt) || !finite_non_negative(Kt)) {
    throw InvalidInput(fmt::format(
        "couplings must be finite and non-negative (Jt = {}, Vt = {}, Kt = {})", Jt, Vt, Kt));
  }
  if (Jt <= 0.0) throw InvalidInput("couplings: Jt must be positive");
  return {Jt, Vt, Kt};
}

EffectiveCouplings couplings_from_ratios(double r, double k, double Jt) {
  if (!finite_non_negative(r) || !finite_non_negative(k)) {
    throw InvalidInput(fmt::format("ratios must be finite and non-negative (r = {}, k = {})", r, k));
  }
  return make_couplings(Jt, r * Jt, k * Jt);
}

bool probe_limit_violated(const EffectiveCouplings& c) {
  const double scale = c.Vt > 0.0 ? std::min(c.Jt, c.Vt) : c.Jt;
  return c.Kt >= 0.1 * scale;
}

void validate(const IntegratorControls& c) {
  auto in_tol_range = [](double v) { return std::isfinite(v) && v > 0.0 && v <= 1e-2; };
  if (!in_tol_range(c.rel_tol)) throw InvalidInput("controls: rel_tol must lie in (0, 1e-2]");
  if (!in_tol_range(c.abs_tol)) throw InvalidInput("controls: abs_tol must lie in (0, 1e-2]");
  if (!(c.t_max > 0.0) || !std::isfinite(c.t_max)) {
    throw InvalidInput("controls: t_max must be positive and finite");
  }
  if (!(c.sample_stride > 0.0) || !std::isfinite(c.sample_stride)) {
    throw InvalidInput("controls: sample_stride must be positive and finite");
  }
  if (!(c.max_step > 0.0)) throw InvalidInput("controls: max_step must be positive");
  if (!(c.plateau_tol > 0.0)) throw InvalidInput("controls: plateau_tol must be positive");
  if (c.plateau_window && !(*c.plateau_window > 0.0)) {
    throw InvalidInput("controls: plateau_window must be positive");
  }
  if (c.t_max / c.sample_stride > 5e7) {
    throw InvalidInput("controls: sample grid too dense (more than 5e7 samples)");
  }
}

std::vector<double> sample_grid(const IntegratorControls& controls) {
  const auto n = static_cast<std::size_t>(
      std::ceil(controls.t_max / controls.sample_stride * (1.0 - 1e-12)));
  std::vector<double> grid;
  grid.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) grid.push_back(static_cast<double>(i) * controls.sample_stride);
  grid.push_back(controls.t_max);
  return grid;
}

double default_plateau_window(const EffectiveCouplings& c, const ThermalPoint& thermal) {
  return 20.0 / (thermal.n2b * (1.0 - thermal.n2b) * c.Jt);
}

double reduced_rhs(double f3, const EffectiveCouplings& c, const ThermalPoint& thermal) {
  if (!std::isfinite(f3)) throw InvalidInput("reduced_rhs: f3 must be finite");
  return reduced_rhs_unchecked(f3, c, thermal.w2b);
}

DistributionState::Components SlavedKineticModel::rhs(
    const DistributionState::Components& f) const {
  const double w = thermal_.w2b;
  const double n = thermal_.n2b;
  const double df3 = reduced_rhs_unchecked(f[3], couplings_, w);
  return {0.0, 0.0, 0.0, df3, n * df3 / w, (1.0 - n) * df3 / w};
}

Trajectory integrate(const EffectiveCouplings& c, const ThermalPoint& thermal,
                     const IntegratorControls& controls, std::optional<double> f3_init) {
  validate(controls);
  const double f0 = f3_init.value_or(thermal.w2b);
  if (!std::isfinite(f0) || std::abs(f0) > kBlowUpBound) {
    throw InvalidInput(fmt::format("integrate: f3_init = {} outside [-1.5, 1.5]", f0));
  }

  Trajectory traj;
  traj.couplings = c;
  traj.thermal = thermal;
  traj.f3_init = f0;
  traj.times = sample_grid(controls);
  traj.f3.resize(traj.times.size());
  traj.entropy.resize(traj.times.size());

  const double w = thermal.w2b;
  auto rhs = [&c, w](const std::array<double, 1>& y) {
    return std::array<double, 1>{reduced_rhs_unchecked(y[0], c, w)};
  };
  auto observe = [&traj, &thermal](const std::array<double, 1>& y, std::size_t i) {
    traj.f3[i] = y[0];
    traj.entropy[i] = renyi_delta(SlavedState{y[0], thermal});
  };
  drive<1>(rhs, {f0}, controls, traj.times, observe, traj);
  finalize(traj, controls);
  return traj;
}

Trajectory integrate_state(const KineticModel& model, const DistributionState& initial,
                           const EffectiveCouplings& c, const ThermalPoint& thermal,
                           const IntegratorControls& controls) {
  validate(controls);
  Trajectory traj;
  traj.couplings = c;
  traj.thermal = thermal;
  traj.f3_init = initial.f3();
  traj.times = sample_grid(controls);
  traj.f3.resize(traj.times.size());
  traj.entropy.resize(traj.times.size());

  auto rhs = [&model](const DistributionState::Components& y) { return model.rhs(y); };
  auto observe = [&traj](const DistributionState::Components& y, std::size_t i) {
    traj.f3[i] = y[3];
    traj.entropy[i] = renyi_delta(y);
  };
  drive<6>(rhs, initial.components(), controls, traj.times, observe, traj);
  finalize(traj, controls);
  return traj;
}

std::optional<Plateau> detect_plateau(const std::vector<double>& times,
                                      const std::vector<double>& entropy, double window,
                                      double tol) {
  if (times.size() < 2 || times.size() != entropy.size()) return std::nullopt;
  const double t0 = times.front();
  if (times.back() - t0 < window) return std::nullopt;

  // Linear interpolation of the sampled entropy at an interior time.
  auto at = [&](double t) {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        it - times.begin(), 1, static_cast<std::ptrdiff_t>(times.size()) - 1));
    const std::size_t lo = hi - 1;
    const double a = (t - times[lo]) / (times[hi] - times[lo]);
    return entropy[lo] + a * (entropy[hi] - entropy[lo]);
  };

  std::optional<std::size_t> onset;
  for (std::size_t i = times.size(); i-- > 0;) {
    if (times[i] - t0 < window) break;
    if (std::abs(entropy[i] - at(times[i] - window)) >= tol) break;
    onset = i;
  }
  if (!onset) return std::nullopt;
  return Plateau{entropy.back(), times[*onset] - window};
}

std::vector<std::pair<double, double>> entropy_curve(const Trajectory& trajectory) {
  std::vector<std::pair<double, double>> out;
  out.reserve(trajectory.times.size());
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    out.emplace_back(trajectory.times[i], trajectory.entropy[i]);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "time,f3,entropy\n";
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    os << format_data(trajectory.times[i]) << ',' << format_data(trajectory.f3[i]) << ','
       << format_data(trajectory.entropy[i]) << '\n';
  }
}

}  // namespace entacc
