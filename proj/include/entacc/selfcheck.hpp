#pragma once

#include <string>
#include <vector>

namespace entacc {

/// Reference constants the embedded invariant suite compares against.
/// Tests mutate these to confirm the suite catches a corrupted value.
struct SelfCheckReferences {
  double x_ref = 0.54930614433405484;  ///< ln(3)/2
  double n2b_ref = 0.25;
  double w2b_ref = 0.43301270189221932;          ///< sqrt(3)/4
  double lyapunov_ref = 0.375;                   ///< r = 0, Jt = 1 at x_ref
  double saturation_ref = 0.26794919243112270;   ///< 2 - sqrt(3): r = 0 at x_ref
  double plateau_rel_tol = 0.01;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_selfcheck(const SelfCheckReferences& refs = {});

}  // namespace entacc
