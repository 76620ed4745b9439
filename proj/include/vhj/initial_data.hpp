#pragma once

#include <vhj/field.hpp>

namespace vhj {

enum class SignClass { nonnegative, nonpositive, general };

/// Initial datum families. All of them sample to discrete
/// L^1 cap W^{1,inf} data; the bump is C^2 across its support edge
/// (it is the standard mollifier profile, so in fact C-infinity).
struct InitialDatum {
  enum class Family { gaussian, smooth_bump, tabulated };

  Family family = Family::gaussian;
  Real amplitude = 1.0;       // A: peak value at the origin
  Real width = 1.0;           // sigma > 0 (gaussian): A exp(-(r/sigma)^2)
  Real support_radius = 1.0;  // R0 > 0 (smooth_bump): 0 for r >= R0
  VecX table;                 // tabulated family: one value per node
  SignClass sign = SignClass::general;
};

InitialDatum gaussian_datum(Real amplitude, Real width,
                            SignClass sign = SignClass::general);
InitialDatum bump_datum(Real amplitude, Real support_radius,
                        SignClass sign = SignClass::general);
InitialDatum tabulated_datum(VecX values, SignClass sign = SignClass::general);

/// Pointwise evaluation (gaussian and smooth_bump families only).
Real datum_value(const InitialDatum& d, Real r);

/// Sample onto a grid at time 0. Throws on non-finite parameters, on a bump
/// support that does not fit inside the grid, on a tabulated size mismatch,
/// and when the sampled values contradict the declared sign class.
Field sample_datum(const InitialDatum& d, const RadialGrid& grid);

}  // namespace vhj
