#include "entacc/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "entacc/analytics.hpp"
#include "entacc/kinetics.hpp"
#include "entacc/state.hpp"
#include "entacc/sweep.hpp"
#include "entacc/thermo.hpp"

namespace entacc {

namespace {

bool close(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

CheckResult thermal_identity() {
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = thermal_point(dist(rng));
    worst = std::max(worst, std::abs(p.w2b * p.w2b - p.n2b * (1.0 - p.n2b)));
  }
  return {"thermal identity w^2 = n(1-n)", worst <= 1e-12, fmt::format("max residual {:.3e}", worst)};
}

CheckResult thermal_reference(const SelfCheckReferences& refs) {
  const auto p = thermal_point(refs.x_ref);
  const bool ok = close(p.n2b, refs.n2b_ref, 1e-14) && close(p.w2b, refs.w2b_ref, 1e-14);
  return {"thermal reference point", ok, fmt::format("n2b = {:.17g}, w2b = {:.17g}", p.n2b, p.w2b)};
}

CheckResult fixed_point_residuals() {
  double worst = 0.0;
  bool flip_ok = true;
  for (double r : {0.0, 0.5, 1.0, 2.0, 2.5, 6.0}) {
    const auto set = fixed_points(couplings_from_ratios(r, 0.0), thermal_point(0.3));
    for (const auto& fp : set.roots) {
      worst = std::max(worst, std::abs(fp.c * fp.c * fp.c - (r + 1.0) * fp.c + r));
    }
    const auto& unit = *std::find_if(set.roots.begin(), set.roots.end(),
                                     [](const auto& fp) { return fp.c == 1.0; });
    const Stability expected =
        r < 2.0 ? Stability::Unstable : (r == 2.0 ? Stability::Marginal : Stability::Stable);
    flip_ok = flip_ok && unit.stability == expected;
  }
  return {"fixed-point residuals and stability flip at r = 2", worst <= 1e-12 && flip_ok,
          fmt::format("max residual {:.3e}", worst)};
}

CheckResult lyapunov_checks(const SelfCheckReferences& refs) {
  const auto thermal = thermal_point(refs.x_ref);
  const auto c0 = couplings_from_ratios(0.0, 0.0);
  const double closed = lyapunov_exponent(c0, thermal);
  double worst = 0.0;
  for (double r : {0.0, 1.0, 1.9}) {
    const auto c = couplings_from_ratios(r, 0.0);
    const double h = 1e-6 * thermal.w2b;
    const double fd = (reduced_rhs(thermal.w2b + h, c, thermal) -
                       reduced_rhs(thermal.w2b - h, c, thermal)) / (2.0 * h);
    const double k = lyapunov_exponent(c, thermal);
    worst = std::max(worst, std::abs(fd - k) / std::abs(k));
  }
  const bool ok = close(closed, refs.lyapunov_ref, 1e-14) && worst <= 1e-6;
  return {"Lyapunov exponent vs reference and finite differences", ok,
          fmt::format("closed form {:.17g}, worst FD rel err {:.3e}", closed, worst)};
}

CheckResult saturation_checks(const SelfCheckReferences& refs) {
  const auto thermal = thermal_point(refs.x_ref);
  const double s0 = saturation_entropy(couplings_from_ratios(0.0, 0.0), thermal);
  double worst = 0.0;
  for (double r : {0.0, 0.5, 1.0, 1.5, 1.9}) {
    const auto c = couplings_from_ratios(r, 0.0);
    const double c_star = fixed_points(c, thermal).attractor().c;
    const double via_state = renyi_delta(SlavedState{c_star * thermal.w2b, thermal});
    worst = std::max(worst, std::abs(via_state - saturation_entropy(c, thermal)));
  }
  const bool ok = close(s0, refs.saturation_ref, 1e-14) && worst <= 1e-10;
  return {"saturation entropy vs reference and entropy functional", ok,
          fmt::format("S(r=0) = {:.17g}, worst functional mismatch {:.3e}", s0, worst)};
}

CheckResult plateau_spot_checks(const SelfCheckReferences& refs) {
  const double x = 0.5;
  const double k = 1e-6;
  const auto thermal = thermal_point(x);
  std::string detail;
  bool ok = true;
  for (double r : {0.0, 1.0}) {
    const auto c = couplings_from_ratios(r, k);
    IntegratorControls controls;
    controls.t_max = default_cell_t_max(r, k, thermal, 1.0);
    controls.sample_stride = controls.t_max / 20000.0;
    const auto traj = integrate(c, thermal, controls);
    const double analytic = saturation_entropy(c, thermal);
    const double numeric = traj.plateau ? traj.plateau->value : NAN;
    const bool cell_ok = traj.plateau && close(numeric, analytic, refs.plateau_rel_tol);
    ok = ok && cell_ok;
    detail += fmt::format("r={}: numeric {:.6g} analytic {:.6g}; ", r, numeric, analytic);
  }
  return {"numeric plateau vs analytic saturation", ok, detail};
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const SelfCheckReferences& refs) {
  std::vector<CheckResult> out;
  out.push_back(thermal_identity());
  out.push_back(thermal_reference(refs));
  out.push_back(fixed_point_residuals());
  out.push_back(lyapunov_checks(refs));
  out.push_back(saturation_checks(refs));
  out.push_back(plateau_spot_checks(refs));
  return out;
}

}  // namespace entacc
