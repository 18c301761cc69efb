#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "entacc/state.hpp"
#include "entacc/thermo.hpp"

namespace entacc {

/// Flat-band golden-rule rates (inverse time) of the system-system (Jt),
/// system-bath (Vt) and system-probe (Kt) scattering channels.
struct EffectiveCouplings {
  double Jt = 1.0;
  double Vt = 0.0;
  double Kt = 0.0;

  double r() const { return Vt / Jt; }
  double k() const { return Kt / Jt; }
};

/// Validating constructor: all rates finite and >= 0, Jt > 0.
EffectiveCouplings make_couplings(double Jt, double Vt, double Kt);

/// Couplings from the dimensionless ratios r = Vt/Jt, k = Kt/Jt.
EffectiveCouplings couplings_from_ratios(double r, double k, double Jt = 1.0);

/// True when Kt is not small against the nonzero intrinsic rates, i.e. the
/// closed-form results (derived for Kt -> 0) should not be trusted.
bool probe_limit_violated(const EffectiveCouplings& c);

struct IntegratorControls {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double t_max = 100.0;
  double sample_stride = 0.01;
  double plateau_tol = 1e-6;
  /// Plateau window; unset means 20 / (n2b (1 - n2b) Jt).
  std::optional<double> plateau_window;
};

/// Throws InvalidInput for out-of-range controls.
void validate(const IntegratorControls& controls);

/// Sample times 0, stride, 2 stride, ..., ending exactly at t_max.
std::vector<double> sample_grid(const IntegratorControls& controls);

double default_plateau_window(const EffectiveCouplings& c, const ThermalPoint& thermal);

struct Plateau {
  double value = 0.0;
  /// Onset: start of the final stretch over which the entropy stays flat.
  double time = 0.0;
};

struct Trajectory {
  EffectiveCouplings couplings;
  ThermalPoint thermal;
  double f3_init = 0.0;

  std::vector<double> times;
  std::vector<double> f3;
  std::vector<double> entropy;

  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::optional<Plateau> plateau;
};

/// Reduced flow for f3 on the slaved manifold:
///   w^3 Vt - w^2 (Vt + Jt) f3 + Jt f3^3 + Kt * drive(f3),  drive(f3) = -w^2 f3.
/// The drive is the probe channel's loss term; it has no replica-swapped
/// source, which is what pushes f3 off the Kt = 0 fixed point at f3 = w.
double reduced_rhs(double f3, const EffectiveCouplings& c, const ThermalPoint& thermal);

/// Right-hand side over the full six-component state. Implementations plug
/// alternative collision models into integrate_state().
class KineticModel {
public:
  virtual ~KineticModel() = default;
  virtual DistributionState::Components rhs(const DistributionState::Components& f) const = 0;
};

/// The reduced model lifted to six components: f0, f1, f2 frozen, f3 follows
/// reduced_rhs, f4 and f5 follow f3 through the slaving ratios.
class SlavedKineticModel final : public KineticModel {
public:
  SlavedKineticModel(const EffectiveCouplings& c, const ThermalPoint& thermal)
      : couplings_(c), thermal_(thermal) {}

  DistributionState::Components rhs(const DistributionState::Components& f) const override;

private:
  EffectiveCouplings couplings_;
  ThermalPoint thermal_;
};

/// Adaptive Dormand-Prince integration of the reduced flow on [0, t_max].
/// f3_init defaults to w2b. Throws IntegrationError on step-size underflow or
/// when |f3| exceeds 1.5.
Trajectory integrate(const EffectiveCouplings& c, const ThermalPoint& thermal,
                     const IntegratorControls& controls,
                     std::optional<double> f3_init = std::nullopt);

/// Integrates a six-component model from an arbitrary initial state. The
/// trajectory's f3 column is component 3 and its entropy is renyi_delta of the
/// full state.
Trajectory integrate_state(const KineticModel& model, const DistributionState& initial,
                           const EffectiveCouplings& c, const ThermalPoint& thermal,
                           const IntegratorControls& controls);

/// Latest onset after which |S(t) - S(t - window)| < tol holds through the
/// last sample. Empty if the final sample is not flat or the run is shorter
/// than the window.
std::optional<Plateau> detect_plateau(const std::vector<double>& times,
                                      const std::vector<double>& entropy, double window,
                                      double tol);

std::vector<std::pair<double, double>> entropy_curve(const Trajectory& trajectory);

/// CSV with header `time,f3,entropy`, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace entacc
