#include <vhj/field.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vhj {

Field::Field(const RadialGrid& g, VecX v, Real t)
    : grid(g), values(std::move(v)), time(t) {
  if (values.size() != grid.size())
    throw std::invalid_argument("Field: value count does not match grid");
}

Real lp_norm(const Field& f, Real p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return f.values.abs().maxCoeff();
  const VecX w = quadrature_weights(f.grid);
  if (p == 1.0) return (w * f.values.abs()).sum();
  if (p == 2.0) return std::sqrt((w * f.values.square()).sum());
  return std::pow((w * f.values.abs().pow(p)).sum(), 1.0 / p);
}

Real integral(const Field& f) {
  return (quadrature_weights(f.grid) * f.values).sum();
}

Real tail_integral(const Field& f, Real from_radius) {
  const VecX w = quadrature_weights(f.grid);
  const VecX r = grid_nodes(f.grid);
  Real acc = 0.0;
  for (Index j = 0; j < f.size(); ++j)
    if (r[j] >= from_radius) acc += w[j] * std::abs(f.values[j]);
  return acc;
}

Real interp_linear(const Field& f, Real r) {
  if (r < 0.0) r = -r;
  const Real h = f.grid.spacing;
  if (r >= f.grid.radius()) return 0.0;
  const Index j = static_cast<Index>(std::floor(r / h));
  const Real s = r / h - static_cast<Real>(j);
  return (1.0 - s) * f.values[j] + s * f.values[j + 1];
}

namespace {

void require_stencil(const Field& f) {
  if (f.grid.node_count < 3)
    throw std::invalid_argument("derivative stencils need node_count >= 3");
}

// Centered radial derivative with the symmetry condition at the origin and
// a second-order one-sided stencil at r = R.
VecX radial_derivative(const Field& f) {
  const Index m = f.grid.node_count;
  const Real h = f.grid.spacing;
  const VecX& u = f.values;
  VecX du(m + 1);
  du[0] = 0.0;
  du.segment(1, m - 1) =
      (u.segment(2, m - 1) - u.segment(0, m - 1)) / (2.0 * h);
  du[m] = (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * h);
  return du;
}

// Pure second derivative: mirrored at the origin, one-sided at r = R.
VecX radial_second_derivative(const Field& f) {
  const Index m = f.grid.node_count;
  const Real h2 = f.grid.spacing * f.grid.spacing;
  const VecX& u = f.values;
  VecX d2(m + 1);
  d2[0] = 2.0 * (u[1] - u[0]) / h2;
  d2.segment(1, m - 1) = (u.segment(2, m - 1) - 2.0 * u.segment(1, m - 1) +
                          u.segment(0, m - 1)) /
                         h2;
  d2[m] = (2.0 * u[m] - 5.0 * u[m - 1] + 4.0 * u[m - 2] - u[m - 3]) / h2;
  return d2;
}

}  // namespace

Field gradient_field(const Field& f) {
  require_stencil(f);
  return Field(f.grid, radial_derivative(f), f.time);
}

Field laplacian_field(const Field& f) {
  require_stencil(f);
  const int n = f.grid.dimension;
  VecX lap = radial_second_derivative(f);
  if (n > 1) {
    const VecX du = radial_derivative(f);
    const VecX r = grid_nodes(f.grid);
    // (N-1)/r u_r -> (N-1) u_rr at the origin by symmetry, folded into the
    // 2N(u_1-u_0)/h^2 origin stencil below.
    lap.tail(f.grid.node_count) +=
        static_cast<Real>(n - 1) * du.tail(f.grid.node_count) /
        r.tail(f.grid.node_count);
    lap[0] *= static_cast<Real>(n);
  }
  return Field(f.grid, std::move(lap), f.time);
}

std::pair<Field, Field> hessian_radial_eigenvalues(const Field& f) {
  require_stencil(f);
  VecX radial = radial_second_derivative(f);
  VecX du = radial_derivative(f);
  const VecX r = grid_nodes(f.grid);
  VecX tangential(f.size());
  tangential[0] = radial[0];  // u_r/r -> u_rr(0)
  tangential.tail(f.grid.node_count) =
      du.tail(f.grid.node_count) / r.tail(f.grid.node_count);
  return {Field(f.grid, std::move(radial), f.time),
          Field(f.grid, std::move(tangential), f.time)};
}

}  // namespace vhj
