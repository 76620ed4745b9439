#pragma once

#include <vhj/types.hpp>

namespace vhj {

/// Uniform radial mesh on [0, R] for rotationally symmetric data in N
/// dimensions. Nodes are r_j = j*h for j = 0..M; node 0 sits at the origin
/// and carries the symmetry condition u_r(0) = 0.
struct RadialGrid {
  int dimension = 1;      // N in {1, 2, 3}
  Index node_count = 16;  // M, nodes run 0..M inclusive
  Real spacing = 1.0;     // h > 0

  RadialGrid() = default;
  RadialGrid(int n, Index m, Real h);

  Index size() const { return node_count + 1; }
  Real radius() const { return spacing * static_cast<Real>(node_count); }
  Real node(Index j) const { return spacing * static_cast<Real>(j); }

  bool operator==(const RadialGrid&) const = default;
};

/// Surface measure omega_N of the unit sphere: 2, 2*pi, 4*pi for N = 1, 2, 3.
Real sphere_measure(int dimension);

/// Node coordinates r_j, size M+1.
VecX grid_nodes(const RadialGrid& grid);

/// Trapezoid weights against the radial measure omega_N r^{N-1} dr, so that
/// integral over R^N of f ~ sum_j w_j f(r_j). The origin node has zero
/// weight for N >= 2.
VecX quadrature_weights(const RadialGrid& grid);

}  // namespace vhj
