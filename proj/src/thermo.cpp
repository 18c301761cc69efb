#include "entacc/thermo.hpp"

#include <cmath>

#include "entacc/errors.hpp"

namespace entacc {

ThermalPoint thermal_point(double x) {
  if (!std::isfinite(x)) {
    throw InvalidInput("thermal_point: detuning x must be finite");
  }
  ThermalPoint p;
  p.x = x;
  // cosh overflows past |x| ~ 710; the weight underflows to 0 there anyway.
  p.w2b = 0.5 / std::cosh(x);
  // Logistic form evaluated on the stable side to avoid exp overflow.
  if (x >= 0.0) {
    const double e = std::exp(-2.0 * x);
    p.n2b = e / (1.0 + e);
  } else {
    p.n2b = 1.0 / (std::exp(2.0 * x) + 1.0);
  }
  return p;
}

}  // namespace entacc
