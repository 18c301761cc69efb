#include "entacc/state.hpp"

#include <cmath>

#include <fmt/format.h>

#include "entacc/errors.hpp"

namespace entacc {

std::string_view branch_name(ContourBranch s) {
  switch (s) {
    case ContourBranch::D1: return "d1";
    case ContourBranch::U1: return "u1";
    case ContourBranch::D2: return "d2";
    case ContourBranch::U2: return "u2";
  }
  return "?";
}

bool is_physical(const DistributionState::Components& f) {
  for (double v : f) {
    if (!std::isfinite(v)) return false;
  }
  if (f[0] < 0.0 || f[0] > 1.0) return false;
  for (std::size_t z = 1; z < f.size(); ++z) {
    if (std::abs(f[z]) > 1.0) return false;
  }
  return true;
}

DistributionState::DistributionState(const Components& f) : f_(f) {
  if (!is_physical(f_)) {
    throw InvalidInput(fmt::format(
        "DistributionState outside physical window: f = ({}, {}, {}, {}, {}, {})",
        f[0], f[1], f[2], f[3], f[4], f[5]));
  }
}

DistributionState::DistributionState(double f0, double f1, double f2, double f3, double f4,
                                     double f5)
    : DistributionState(Components{f0, f1, f2, f3, f4, f5}) {}

DistributionState::Components SlavedState::components() const {
  const double w = thermal.w2b;
  const double n = thermal.n2b;
  return {n, w, w, f3, n * f3 / w, (1.0 - n) * f3 / w};
}

DistributionState SlavedState::expand() const { return DistributionState(components()); }

DistributionState init_thermal(const ThermalPoint& thermal) {
  const double w = thermal.w2b;
  const double n = thermal.n2b;
  return DistributionState(n, w, w, w, n, n);
}

Matrix4 distribution_matrix(const DistributionState& s, Ordering ordering) {
  Matrix4 m{{
      {-s.f0(), -s.f2(), -s.f3(), -s.f5()},
      {s.f1(), 1.0 - s.f0(), -s.f4(), -s.f3()},
      {s.f3(), s.f5(), -s.f0(), -s.f2()},
      {s.f4(), s.f3(), s.f1(), 1.0 - s.f0()},
  }};
  if (ordering == Ordering::Lesser) {
    for (ContourBranch b : kBranchOrder) {
      const auto i = static_cast<std::size_t>(b);
      m[i][i] -= branch_sign(b);
    }
  }
  return m;
}

double renyi_delta(const DistributionState::Components& f) {
  return 2.0 - 2.0 * (f[1] + f[2]) - 2.0 * (f[4] + f[5] - 2.0 * f[3]);
}

double renyi_delta(const DistributionState& state) { return renyi_delta(state.components()); }

double renyi_delta(const SlavedState& state) { return renyi_delta(state.components()); }

}  // namespace entacc
