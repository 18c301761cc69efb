#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "entacc/thermo.hpp"

namespace entacc {

/// Branches of the doubled Keldysh contour, in matrix index order.
enum class ContourBranch : std::size_t { D1 = 0, U1 = 1, D2 = 2, U2 = 3 };

inline constexpr std::array<ContourBranch, 4> kBranchOrder{
    ContourBranch::D1, ContourBranch::U1, ContourBranch::D2, ContourBranch::U2};

/// (-1)^s: -1 on backward (d) branches, +1 on forward (u) branches.
constexpr int branch_sign(ContourBranch s) {
  return (s == ContourBranch::D1 || s == ContourBranch::D2) ? -1 : +1;
}

std::string_view branch_name(ContourBranch s);

/// Six generalized distribution functions of a single flat-band mode.
///
/// f0 is the intra-replica occupation, f1 and f2 the intra-replica anomalous
/// weights, f3, f4, f5 the inter-replica weights. Construction enforces
/// finiteness, f0 in [0, 1] and |f1..f5| <= 1.
class DistributionState {
public:
  using Components = std::array<double, 6>;

  DistributionState(double f0, double f1, double f2, double f3, double f4, double f5);
  explicit DistributionState(const Components& f);

  double f0() const { return f_[0]; }
  double f1() const { return f_[1]; }
  double f2() const { return f_[2]; }
  double f3() const { return f_[3]; }
  double f4() const { return f_[4]; }
  double f5() const { return f_[5]; }
  double operator[](std::size_t z) const { return f_[z]; }
  const Components& components() const { return f_; }

  /// Field names in serialization order: "f0" ... "f5".
  static constexpr std::array<std::string_view, 6> field_names{"f0", "f1", "f2",
                                                               "f3", "f4", "f5"};

  friend bool operator==(const DistributionState&, const DistributionState&) = default;

private:
  Components f_;
};

/// True if the components would pass DistributionState validation.
bool is_physical(const DistributionState::Components& f);

/// Reduced state in which f0, f1, f2 sit at their thermal values and f4, f5
/// are slaved to f3:  f4 = n2b f3 / w2b,  f5 = (1 - n2b) f3 / w2b.
struct SlavedState {
  double f3 = 0.0;
  ThermalPoint thermal;

  /// Raw components of the expanded state; not checked for physicality.
  DistributionState::Components components() const;
  /// Expanded state; throws InvalidInput if it leaves the physical window.
  DistributionState expand() const;
};

/// Thermal initial condition: f1 = f2 = f3 = w2b, f0 = f4 = f5 = n2b.
DistributionState init_thermal(const ThermalPoint& thermal);

enum class Ordering { Greater, Lesser };

using Matrix4 = std::array<std::array<double, 4>, 4>;

/// 4x4 distribution matrix F^{ss'} with rows/cols in ContourBranch order.
/// Lesser ordering subtracts (-1)^s on the diagonal.
Matrix4 distribution_matrix(const DistributionState& state, Ordering ordering);

/// Impulse-induced second Renyi entropy increment
///   2 - 2 (f1 + f2) - 2 (f4 + f5 - 2 f3).
double renyi_delta(const DistributionState::Components& f);
double renyi_delta(const DistributionState& state);
double renyi_delta(const SlavedState& state);

}  // namespace entacc
