#pragma once

namespace entacc {

/// Flat-band thermal data of the doubled (2 beta) state.
///
/// The model depends on temperature, band energy and chemical potential only
/// through the detuning x = beta * (eps - mu).
///   w2b = 1 / (2 cosh x)        in (0, 1/2]
///   n2b = 1 / (exp(2x) + 1)     in (0, 1)
/// and w2b^2 = n2b (1 - n2b).
struct ThermalPoint {
  double x = 0.0;
  double w2b = 0.5;
  double n2b = 0.5;
};

/// Throws InvalidInput when x is not finite.
ThermalPoint thermal_point(double x);

}  // namespace entacc
