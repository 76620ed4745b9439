#include <vhj/initial_data.hpp>

#include <cmath>
#include <stdexcept>

namespace vhj {

InitialDatum gaussian_datum(Real amplitude, Real width, SignClass sign) {
  InitialDatum d;
  d.family = InitialDatum::Family::gaussian;
  d.amplitude = amplitude;
  d.width = width;
  d.sign = sign;
  return d;
}

InitialDatum bump_datum(Real amplitude, Real support_radius, SignClass sign) {
  InitialDatum d;
  d.family = InitialDatum::Family::smooth_bump;
  d.amplitude = amplitude;
  d.support_radius = support_radius;
  d.sign = sign;
  return d;
}

InitialDatum tabulated_datum(VecX values, SignClass sign) {
  InitialDatum d;
  d.family = InitialDatum::Family::tabulated;
  d.table = std::move(values);
  d.sign = sign;
  return d;
}

Real datum_value(const InitialDatum& d, Real r) {
  switch (d.family) {
    case InitialDatum::Family::gaussian: {
      const Real s = r / d.width;
      return d.amplitude * std::exp(-s * s);
    }
    case InitialDatum::Family::smooth_bump: {
      const Real s = r / d.support_radius;
      if (s >= 1.0) return 0.0;
      // Mollifier profile: all derivatives vanish at the support edge.
      return d.amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    default:
      throw std::invalid_argument("datum_value: tabulated data has no closed form");
  }
}

Field sample_datum(const InitialDatum& d, const RadialGrid& grid) {
  VecX u(grid.size());
  switch (d.family) {
    case InitialDatum::Family::gaussian:
      if (!std::isfinite(d.amplitude) || !(d.width > 0.0) ||
          !std::isfinite(d.width))
        throw std::invalid_argument("sample_datum: bad gaussian parameters");
      break;
    case InitialDatum::Family::smooth_bump:
      if (!std::isfinite(d.amplitude) || !(d.support_radius > 0.0) ||
          !std::isfinite(d.support_radius))
        throw std::invalid_argument("sample_datum: bad bump parameters");
      if (d.support_radius >= grid.radius())
        throw std::invalid_argument(
            "sample_datum: bump support exceeds grid radius");
      break;
    case InitialDatum::Family::tabulated:
      if (d.table.size() != grid.size())
        throw std::invalid_argument(
            "sample_datum: tabulated size does not match grid");
      if (!d.table.isFinite().all())
        throw std::invalid_argument("sample_datum: non-finite table values");
      break;
  }

  if (d.family == InitialDatum::Family::tabulated) {
    u = d.table;
  } else {
    for (Index j = 0; j < grid.size(); ++j) u[j] = datum_value(d, grid.node(j));
  }

  if (d.sign == SignClass::nonnegative && (u < 0.0).any())
    throw std::invalid_argument("sample_datum: negative samples in a datum tagged nonnegative");
  if (d.sign == SignClass::nonpositive && (u > 0.0).any())
    throw std::invalid_argument("sample_datum: positive samples in a datum tagged nonpositive");

  return Field(grid, std::move(u), 0.0);
}

}  // namespace vhj
