#include "entacc/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "entacc/csv.hpp"
#include "entacc/errors.hpp"

namespace entacc {

namespace {

constexpr std::size_t kMinFitSamples = 8;
constexpr double kMonotoneSlack = 1e-9;

bool at_threshold(double r) { return std::abs(r - 2.0) <= kThresholdRelTol * 2.0; }

Stability stability_from_slope(double slope, double scale) {
  if (std::abs(slope) <= 1e-12 * scale) return Stability::Marginal;
  return slope < 0.0 ? Stability::Stable : Stability::Unstable;
}

}  // namespace

std::string_view stability_name(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Scrambling: return "scrambling";
    case Phase::Dissipative: return "dissipative";
    case Phase::Critical: return "critical";
  }
  return "?";
}

const FixedPoint& FixedPointSet::attractor() const {
  const double target = r < 2.0 && !at_threshold(r) ? 0.5 * (std::sqrt(1.0 + 4.0 * r) - 1.0) : 1.0;
  return *std::min_element(roots.begin(), roots.end(), [target](const auto& a, const auto& b) {
    return std::abs(a.c - target) < std::abs(b.c - target);
  });
}

double lyapunov_exponent(const EffectiveCouplings& c, const ThermalPoint& thermal) {
  return thermal.n2b * (1.0 - thermal.n2b) * (2.0 * c.Jt - c.Vt);
}

Phase phase_of(const EffectiveCouplings& c) {
  const double r = c.r();
  if (at_threshold(r)) return Phase::Critical;
  return r < 2.0 ? Phase::Scrambling : Phase::Dissipative;
}

FixedPointSet fixed_points(const EffectiveCouplings& c, const ThermalPoint& thermal) {
  FixedPointSet set;
  set.r = c.r();
  const double r = set.r;
  const double w2 = thermal.w2b * thermal.w2b;
  // d/df3 of the Kt = 0 flow, written in c = f3 / w.
  auto slope_at = [&](double root) { return w2 * c.Jt * (3.0 * root * root - (r + 1.0)); };
  const double scale = w2 * c.Jt * (r + 1.0);

  auto add = [&](double root, int multiplicity) {
    const double slope = slope_at(root);
    set.roots.push_back({root, stability_from_slope(slope, scale), multiplicity, slope});
  };

  const double disc = std::sqrt(1.0 + 4.0 * r);
  if (at_threshold(r)) {
    add(-2.0, 1);
    FixedPoint doubled{1.0, Stability::Marginal, 2, slope_at(1.0)};
    set.roots.push_back(doubled);
  } else {
    add(0.5 * (-1.0 - disc), 1);
    add(0.5 * (-1.0 + disc), 1);
    add(1.0, 1);
  }
  std::sort(set.roots.begin(), set.roots.end(),
            [](const auto& a, const auto& b) { return a.c < b.c; });
  return set;
}

double saturation_entropy(const EffectiveCouplings& c, const ThermalPoint& thermal) {
  // Heaviside step with theta(0) = 0; the second factor vanishes there anyway.
  if (phase_of(c) != Phase::Scrambling) return 0.0;
  const double n = thermal.n2b;
  return (1.0 - 2.0 * std::sqrt(n * (1.0 - n))) * (3.0 - std::sqrt(1.0 + 4.0 * c.r()));
}

PhaseReport classify(const EffectiveCouplings& c, const ThermalPoint& thermal) {
  PhaseReport report;
  report.r = c.r();
  report.k = c.k();
  report.x = thermal.x;
  report.phase = phase_of(c);
  report.lyapunov = report.phase == Phase::Critical ? 0.0 : lyapunov_exponent(c, thermal);
  report.saturation = saturation_entropy(c, thermal);
  report.fixed_points = fixed_points(c, thermal);
  return report;
}

void write_phase_report_csv(std::ostream& os, std::span<const PhaseReport> reports) {
  os << "Vt_over_Jt,Kt_over_Jt,x,phase,lyapunov,saturation_analytic\n";
  for (const auto& rep : reports) {
    os << format_data(rep.r) << ',' << format_data(rep.k) << ',' << format_data(rep.x) << ','
       << phase_name(rep.phase) << ',' << format_data(rep.lyapunov) << ','
       << format_data(rep.saturation) << '\n';
  }
}

double fit_lyapunov(const Trajectory& traj) {
  const auto& c = traj.couplings;
  const double w = traj.thermal.w2b;
  const double kappa = lyapunov_exponent(c, traj.thermal);
  const double f3_stable = w * fixed_points(c, traj.thermal).attractor().c;

  // Below: the linear solution seeded by the drive is
  //   f3 - w = -(Kt w^3 / kappa) (exp(kappa t) - 1),
  // so the window opens an order of magnitude above the seed amplitude.
  // Above: stay well short of the nonlinear approach to the attractor.
  double lower = 10.0 * c.k() * w;
  if (kappa != 0.0) lower = std::max(lower, 10.0 * c.Kt * w * w * w / std::abs(kappa));
  const double upper = 0.1 * std::abs(w - f3_stable);

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double d = std::abs(traj.f3[i] - w);
    if (d < lower || d > upper || d == 0.0) continue;
    const double t = traj.times[i];
    const double y = std::log(d);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  if (count < kMinFitSamples) {
    throw InsufficientData(fmt::format(
        "fit_lyapunov: {} samples in growth window [{}, {}] (need {})", count, lower, upper,
        kMinFitSamples));
  }
  const double n = static_cast<double>(count);
  const double denom = n * stt - st * st;
  if (!(denom > 0.0)) throw InsufficientData("fit_lyapunov: degenerate time window");
  return (n * sty - st * sy) / denom;
}

std::optional<double> half_rise_time(const Trajectory& traj) {
  if (!traj.plateau || !(traj.plateau->value > 0.0)) return std::nullopt;
  const double half = 0.5 * traj.plateau->value;
  const auto& s = traj.entropy;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] >= half) {
      const double a = (half - s[i - 1]) / (s[i] - s[i - 1]);
      return traj.times[i - 1] + a * (traj.times[i] - traj.times[i - 1]);
    }
  }
  return std::nullopt;
}

CollapseResult collapse(std::span<const Trajectory> trajectories, std::size_t grid_points) {
  if (trajectories.size() < 3) throw PreconditionError("collapse: need at least 3 trajectories");
  if (grid_points < 2) throw PreconditionError("collapse: need at least 2 grid points");

  const auto& ref = trajectories.front();
  const double kappa = lyapunov_exponent(ref.couplings, ref.thermal);
  double k_min = INFINITY, k_max = 0.0;
  for (const auto& tr : trajectories) {
    if (phase_of(tr.couplings) != Phase::Scrambling) {
      throw PreconditionError("collapse: trajectory outside the scrambling phase");
    }
    if (tr.couplings.r() != ref.couplings.r() || tr.thermal.x != ref.thermal.x ||
        tr.couplings.Jt != ref.couplings.Jt) {
      throw PreconditionError("collapse: trajectories must share r, Jt and x");
    }
    if (!(tr.couplings.Kt > 0.0)) throw PreconditionError("collapse: Kt must be positive");
    if (!tr.plateau) throw PreconditionError("collapse: unsaturated trajectory");
    k_min = std::min(k_min, tr.couplings.k());
    k_max = std::max(k_max, tr.couplings.k());
  }
  if (k_max / k_min < 100.0 * (1.0 - 1e-12)) {
    throw PreconditionError("collapse: Kt must span at least two decades");
  }

  CollapseResult out;
  // g = 1 - S(t)/S(end). On the slaved manifold S = 2 (1 - 2 w2b)(1 - f3/w2b),
  // so g = (f3 - f3_end) / (w2b - f3_end); this form stays defined at x = 0.
  std::vector<std::vector<double>> g_samples;
  double log_lo = -INFINITY, log_hi = INFINITY;
  for (const auto& tr : trajectories) {
    const double w = tr.thermal.w2b;
    const double f_end = tr.f3.back();
    if (!(std::abs(w - f_end) > 0.0)) throw PreconditionError("collapse: trajectory did not move");
    std::vector<double> g(tr.f3.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = (tr.f3[i] - f_end) / (w - f_end);
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (g[i] > g[i - 1] + kMonotoneSlack) out.monotone = false;
    }
    const double log_k = std::log(tr.couplings.k());
    log_lo = std::max(log_lo, log_k + kappa * tr.times.front());
    log_hi = std::min(log_hi, log_k + kappa * tr.times.back());
    out.k.push_back(tr.couplings.k());
    g_samples.push_back(std::move(g));
  }
  if (!(log_hi > log_lo)) throw PreconditionError("collapse: trajectories share no common range");

  out.grid.resize(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double a = static_cast<double>(i) / static_cast<double>(grid_points - 1);
    out.grid[i] = std::exp(log_lo + a * (log_hi - log_lo));
  }

  for (std::size_t j = 0; j < trajectories.size(); ++j) {
    const auto& tr = trajectories[j];
    const auto& g = g_samples[j];
    const double log_k = std::log(tr.couplings.k());
    std::vector<double> row(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
      const double t = std::clamp((std::log(out.grid[i]) - log_k) / kappa, tr.times.front(),
                                  tr.times.back());
      const auto it = std::upper_bound(tr.times.begin(), tr.times.end(), t);
      const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
          it - tr.times.begin(), 1, static_cast<std::ptrdiff_t>(tr.times.size()) - 1));
      const std::size_t lo = hi - 1;
      const double a = (t - tr.times[lo]) / (tr.times[hi] - tr.times[lo]);
      row[i] = g[lo] + a * (g[hi] - g[lo]);
    }
    out.g.push_back(std::move(row));
  }

  for (std::size_t i = 0; i < grid_points; ++i) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& row : out.g) {
      lo = std::min(lo, row[i]);
      hi = std::max(hi, row[i]);
    }
    out.score = std::max(out.score, hi - lo);
  }
  return out;
}

}  // namespace entacc
