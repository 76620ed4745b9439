#pragma once

#include <utility>

#include <vhj/grid.hpp>

namespace vhj {

/// Grid-sampled radial snapshot u(r_j, time). Value semantics throughout;
/// a Field is immutable once handed to diagnostics.
struct Field {
  RadialGrid grid;
  VecX values;
  Real time = 0.0;

  Field() = default;
  Field(const RadialGrid& g, VecX v, Real t = 0.0);

  Real operator[](Index j) const { return values[j]; }
  Index size() const { return values.size(); }
};

/// L^p norm against the radial measure,
///   ||f||_p^p = omega_N int_0^R |f|^p r^{N-1} dr  (trapezoid),
/// p = infinity returns the max of |f| over nodes. Requires p >= 1.
Real lp_norm(const Field& f, Real p);

/// Signed integral of f over R^N (the mass I(t) when f is a solution).
Real integral(const Field& f);

/// omega_N int_from^R |f| r^{N-1} dr.
Real tail_integral(const Field& f, Real from_radius);

/// Linear interpolation of f at radius r; 0 beyond the grid.
Real interp_linear(const Field& f, Real r);

/// Centered second-order radial derivative. u_r(0) = 0 by symmetry,
/// one-sided second-order stencil at r = R. Requires M >= 3.
Field gradient_field(const Field& f);

/// Radial Laplacian u_rr + (N-1)/r u_r with the symmetric origin stencil
/// 2N (u_1 - u_0)/h^2 and one-sided stencils at r = R. Requires M >= 3.
Field laplacian_field(const Field& f);

/// Hessian eigenvalues of a radial function: u_rr (radial direction) and
/// u_r/r (tangential, multiplicity N-1). Both equal u_rr(0) at the origin,
/// and u_rr + (N-1) u_r/r reproduces laplacian_field exactly.
std::pair<Field, Field> hessian_radial_eigenvalues(const Field& f);

}  // namespace vhj
