#include <vhj/grid.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vhj {

RadialGrid::RadialGrid(int n, Index m, Real h)
    : dimension(n), node_count(m), spacing(h) {
  if (n < 1 || n > 3) throw std::invalid_argument("RadialGrid: N must be 1, 2 or 3");
  if (m < 16) throw std::invalid_argument("RadialGrid: node_count must be >= 16");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("RadialGrid: spacing must be positive");
}

Real sphere_measure(int dimension) {
  switch (dimension) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw std::invalid_argument("sphere_measure: N must be 1, 2 or 3");
  }
}

VecX grid_nodes(const RadialGrid& grid) {
  return VecX::LinSpaced(grid.size(), 0.0, grid.radius());
}

VecX quadrature_weights(const RadialGrid& grid) {
  const Real omega = sphere_measure(grid.dimension);
  VecX w(grid.size());
  if (grid.dimension == 1) {
    w.setConstant(omega * grid.spacing);
  } else {
    w = omega * grid.spacing *
        grid_nodes(grid).pow(static_cast<Real>(grid.dimension - 1));
  }
  w[0] *= 0.5;
  w[grid.node_count] *= 0.5;
  return w;
}

}  // namespace vhj
