#pragma once

#include <vhj/field.hpp>

namespace vhj {

/// Exponent bookkeeping for u_t - Lap u + |grad u|^q = 0.
/// a > N iff q < q_critical, with equality exactly at q = q_critical.
struct Exponents {
  Real q = 1.5;
  int dimension = 1;
  Real q_critical = 1.5;  // (N+2)/(N+1)
  Real decay_a = 1.0;     // (2-q)/(q-1), defined for q in (1,2)
  Real gamma_q = 4.0;     // (q-1)^{(q-2)/(q-1)} / (2-q), q in (1,2)
};

Exponents make_exponents(Real q, int dimension);

/// q_c = (N+2)/(N+1).
Real critical_exponent(int dimension);

/// a = (2-q)/(q-1) for q in (1,2).
Real decay_exponent_a(Real q);

/// gamma_q = (q-1)^{(q-2)/(q-1)} (2-q)^{-1} for q in (1,2).
Real gamma_q(Real q);

/// Heat kernel G(r,t) = (4 pi t)^{-N/2} exp(-r^2/(4t)), t > 0.
Real heat_kernel(Real r, Real t, int dimension);

/// |grad G|(r,t) = (r/(2t)) G(r,t).
Real heat_kernel_gradient_mag(Real r, Real t, int dimension);

/// Inviscid self-similar profile
///   Z_M(r,t) = -( M - (q-1) q^{-q/(q-1)} (r/t^{1/q})^{q/(q-1)} )^+,
/// nonpositive, vanishing outside r >= z_support_radius(t,M,q).
Real z_profile(Real r, Real t, Real m, Real q);

/// |d/dr Z_M| = (r/(q t))^{1/(q-1)} inside the support, 0 outside.
Real z_profile_gradient_mag(Real r, Real t, Real m, Real q);

/// Support edge r_edge(t) = t^{1/q} q (M/(q-1))^{(q-1)/q}.
Real z_support_radius(Real t, Real m, Real q);

/// Variational solution of z_t + |grad z|^q = 0 by discrete infimum over
/// the nodes of g:
///   inf_y { g(y) + (q-1) q^{-q/(q-1)} |x-y|^{q/(q-1)} t^{-1/(q-1)} }.
/// For radial g the infimum over R^N reduces to a scan over s = |y| >= 0
/// with |x-y| replaced by |x-s|; a point value carried at node 0 is covered
/// by the scan. Resolution error is O(h * Lip(g)).
Real hopf_lax_eval(const Field& g, Real x, Real t, Real q);

/// Source solution of w_t + (|w|^q)_y = 0 with datum M delta_0:
///   Sigma_M(y,t) = y^{1/(q-1)} (qt)^{-1/(q-1)} on [0, xi_M(t)], 0 elsewhere
/// for M >= 0, and the mirrored negative branch on [-eta_M(t), 0] for
/// M <= 0. Fronts xi_M(t) = eta_{-M}(t) = q (|M|/(q-1))^{(q-1)/q} t^{1/q}.
Real sigma_source(Real y, Real t, Real m, Real q);

/// Front position of Sigma_M (xi for M >= 0, eta for M <= 0).
Real sigma_front(Real t, Real m, Real q);

/// Barrier Gamma_q(r) = gamma_q r^{-a}, r > 0, q in (1,2).
Real gamma_barrier(Real r, Real q);

/// Smallest grid radius R such that r^a u0(r) <= gamma_q for all nodes
/// r >= R. satisfied_within_grid is false when the bound is still violated
/// at the boundary (radius then reports the grid radius).
struct TailRadius {
  Real radius = 0.0;
  bool satisfied_within_grid = true;
};
TailRadius barrier_radius(const Field& u0, Real q);

/// tau(u0) = ((N+2-q(N+1))/((N+1)q-N))^{1-q} R(u0)^2, q in (1, q_c).
Real barrier_time(const Field& u0, Real q, int dimension);

/// ||u0||_1 ||grad u0||_inf^{(N+1)q-(N+2)}, evaluated on [q_c, 2].
Real smallness_functional(const Field& u0, Real q, int dimension);

/// ||u0||_inf ||(Lap u0)^+||_inf^{1-2/q}, for q in (1,2]. When the discrete
/// Laplacian has no positive part the value is +infinity (1-2/q < 0) and
/// degenerate is set; the caller decides what to make of it.
struct LargenessValue {
  Real value = 0.0;
  bool degenerate = false;
};
LargenessValue largeness_functional(const Field& u0, Real q);

/// Gagliardo-Nirenberg chain ratio
///   (||u0||_inf ||D^2 u0||_inf^{1-2/q})^{q(N+1)/2}
///   / (||u0||_1 ||grad u0||_inf^{q(N+1)-(N+2)}),
/// bounded over admissible data for q in (q_c, 2). Throws on u0 == 0.
Real gn_chain_ratio(const Field& u0, Real q, int dimension);

}  // namespace vhj
