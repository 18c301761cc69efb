#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "entacc/kinetics.hpp"
#include "entacc/thermo.hpp"

namespace entacc {

enum class Stability { Stable, Unstable, Marginal };
enum class Phase { Scrambling, Dissipative, Critical };

std::string_view stability_name(Stability s);
std::string_view phase_name(Phase p);

/// Relative tolerance used when comparing r = Vt/Jt against the threshold 2.
inline constexpr double kThresholdRelTol = 1e-12;

struct FixedPoint {
  double c = 0.0;  ///< f3 / w2b
  Stability stability = Stability::Marginal;
  int multiplicity = 1;
  /// d(rhs)/d(f3) at the root for Kt = 0.
  double slope = 0.0;
};

/// Roots of c^3 - (r + 1) c + r = (c - 1)(c^2 + c - r), ascending in c.
struct FixedPointSet {
  double r = 0.0;
  std::vector<FixedPoint> roots;

  /// The root the flow settles on when released from c = 1 by a small
  /// probe drive: (sqrt(1 + 4r) - 1)/2 below threshold, c = 1 otherwise.
  const FixedPoint& attractor() const;
};

double lyapunov_exponent(const EffectiveCouplings& c, const ThermalPoint& thermal);
FixedPointSet fixed_points(const EffectiveCouplings& c, const ThermalPoint& thermal);
double saturation_entropy(const EffectiveCouplings& c, const ThermalPoint& thermal);
Phase phase_of(const EffectiveCouplings& c);

struct PhaseReport {
  double r = 0.0;
  double k = 0.0;
  double x = 0.0;
  Phase phase = Phase::Critical;
  double lyapunov = 0.0;
  double saturation = 0.0;
  FixedPointSet fixed_points;
};

PhaseReport classify(const EffectiveCouplings& c, const ThermalPoint& thermal);

/// Flat record `Vt_over_Jt,Kt_over_Jt,x,phase,lyapunov,saturation_analytic`.
void write_phase_report_csv(std::ostream& os, std::span<const PhaseReport> reports);

/// Least-squares growth rate of ln|f3 - w2b| inside the linear-instability
/// window. Throws InsufficientData when the window holds too few samples.
double fit_lyapunov(const Trajectory& trajectory);

/// First time the entropy reaches half of its detected plateau; empty if no
/// plateau was detected or the plateau is not positive.
std::optional<double> half_rise_time(const Trajectory& trajectory);

struct CollapseResult {
  std::vector<double> k;     ///< Kt/Jt per trajectory
  std::vector<double> grid;  ///< common log-spaced scaling variable
  std::vector<std::vector<double>> g;  ///< g[j][i]: trajectory j at grid[i]
  double score = 0.0;        ///< max over the grid of the spread across trajectories
  bool monotone = true;      ///< every g is non-increasing along its trajectory
};

/// Rescales saturated scrambling-phase trajectories that differ only in Kt
/// onto the variable (Kt/Jt) exp(lyapunov t). Throws PreconditionError when
/// the set is not admissible.
CollapseResult collapse(std::span<const Trajectory> trajectories, std::size_t grid_points = 200);

}  // namespace entacc
