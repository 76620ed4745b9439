#include <vhj/closed_forms.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vhj {

namespace {

void require_q_open_12(Real q, const char* who) {
  if (!(q > 1.0 && q < 2.0))
    throw std::invalid_argument(std::string(who) + ": q must lie in (1,2)");
}

void require_time(Real t, const char* who) {
  if (!(t > 0.0)) throw std::invalid_argument(std::string(who) + ": t must be positive");
}

// (q-1) q^{-q/(q-1)}, the kinetic coefficient of the Hopf-Lax penalty.
Real hopf_lax_coefficient(Real q) {
  return (q - 1.0) * std::pow(q, -q / (q - 1.0));
}

}  // namespace

Real critical_exponent(int dimension) {
  if (dimension < 1) throw std::invalid_argument("critical_exponent: N >= 1");
  return static_cast<Real>(dimension + 2) / static_cast<Real>(dimension + 1);
}

Real decay_exponent_a(Real q) {
  require_q_open_12(q, "decay_exponent_a");
  return (2.0 - q) / (q - 1.0);
}

Real gamma_q(Real q) {
  require_q_open_12(q, "gamma_q");
  return std::pow(q - 1.0, (q - 2.0) / (q - 1.0)) / (2.0 - q);
}

Exponents make_exponents(Real q, int dimension) {
  Exponents e;
  e.q = q;
  e.dimension = dimension;
  e.q_critical = critical_exponent(dimension);
  e.decay_a = decay_exponent_a(q);
  e.gamma_q = gamma_q(q);
  return e;
}

Real heat_kernel(Real r, Real t, int dimension) {
  require_time(t, "heat_kernel");
  const Real pref =
      std::pow(4.0 * std::numbers::pi * t, -0.5 * static_cast<Real>(dimension));
  return pref * std::exp(-r * r / (4.0 * t));
}

Real heat_kernel_gradient_mag(Real r, Real t, int dimension) {
  return std::abs(r) / (2.0 * t) * heat_kernel(r, t, dimension);
}

Real z_profile(Real r, Real t, Real m, Real q) {
  require_q_open_12(q, "z_profile");
  require_time(t, "z_profile");
  if (m < 0.0) throw std::invalid_argument("z_profile: M must be >= 0");
  const Real s = std::abs(r) * std::pow(t, -1.0 / q);
  const Real inner = m - hopf_lax_coefficient(q) * std::pow(s, q / (q - 1.0));
  return -std::max(inner, 0.0);
}

Real z_profile_gradient_mag(Real r, Real t, Real m, Real q) {
  require_q_open_12(q, "z_profile_gradient_mag");
  require_time(t, "z_profile_gradient_mag");
  if (std::abs(r) >= z_support_radius(t, m, q)) return 0.0;
  return std::pow(std::abs(r) / (q * t), 1.0 / (q - 1.0));
}

Real z_support_radius(Real t, Real m, Real q) {
  require_q_open_12(q, "z_support_radius");
  require_time(t, "z_support_radius");
  return std::pow(t, 1.0 / q) * q * std::pow(m / (q - 1.0), (q - 1.0) / q);
}

Real hopf_lax_eval(const Field& g, Real x, Real t, Real q) {
  require_q_open_12(q, "hopf_lax_eval");
  require_time(t, "hopf_lax_eval");
  if (g.size() == 0) throw std::invalid_argument("hopf_lax_eval: empty grid");
  const Real mu = hopf_lax_coefficient(q) * std::pow(t, -1.0 / (q - 1.0));
  const Real ex = q / (q - 1.0);
  Real best = std::numeric_limits<Real>::infinity();
  for (Index j = 0; j < g.size(); ++j) {
    const Real d = std::abs(x - g.grid.node(j));
    best = std::min(best, g.values[j] + mu * std::pow(d, ex));
  }
  return best;
}

Real sigma_source(Real y, Real t, Real m, Real q) {
  require_q_open_12(q, "sigma_source");
  require_time(t, "sigma_source");
  const Real slope = std::pow(q * t, -1.0 / (q - 1.0));
  if (m >= 0.0) {
    if (y < 0.0 || y > sigma_front(t, m, q)) return 0.0;
    return std::pow(y, 1.0 / (q - 1.0)) * slope;
  }
  if (y > 0.0 || y < -sigma_front(t, m, q)) return 0.0;
  return -std::pow(-y, 1.0 / (q - 1.0)) * slope;
}

Real sigma_front(Real t, Real m, Real q) {
  require_q_open_12(q, "sigma_front");
  require_time(t, "sigma_front");
  return q * std::pow(std::abs(m) / (q - 1.0), (q - 1.0) / q) *
         std::pow(t, 1.0 / q);
}

Real gamma_barrier(Real r, Real q) {
  if (!(r > 0.0)) throw std::invalid_argument("gamma_barrier: r must be positive");
  return gamma_q(q) * std::pow(r, -decay_exponent_a(q));
}

TailRadius barrier_radius(const Field& u0, Real q) {
  const Real a = decay_exponent_a(q);
  const Real gq = gamma_q(q);
  const Index m = u0.grid.node_count;
  // Largest node violating r^a u0 > gamma_q; the tail bound holds from the
  // next node outward.
  Index last_violation = -1;
  for (Index j = 1; j <= m; ++j) {
    const Real r = u0.grid.node(j);
    if (std::pow(r, a) * u0.values[j] > gq) last_violation = j;
  }
  if (last_violation < 0) return {0.0, true};
  if (last_violation == m) return {u0.grid.radius(), false};
  return {u0.grid.node(last_violation + 1), true};
}

Real barrier_time(const Field& u0, Real q, int dimension) {
  const Real qc = critical_exponent(dimension);
  if (!(q > 1.0 && q < qc))
    throw std::invalid_argument("barrier_time: q must lie in (1, q_c)");
  const Real n = static_cast<Real>(dimension);
  const Real ratio = (n + 2.0 - q * (n + 1.0)) / ((n + 1.0) * q - n);
  const Real r = barrier_radius(u0, q).radius;
  return std::pow(ratio, 1.0 - q) * r * r;
}

Real smallness_functional(const Field& u0, Real q, int dimension) {
  const Real qc = critical_exponent(dimension);
  // evaluated on [q_c, 2] so threshold scans at the endpoints can report it
  if (!(q >= qc && q <= 2.0))
    throw std::invalid_argument("smallness_functional: q must lie in [q_c, 2]");
  const Real n = static_cast<Real>(dimension);
  const Real expo = (n + 1.0) * q - (n + 2.0);
  return lp_norm(u0, 1.0) *
         std::pow(lp_norm(gradient_field(u0), std::numeric_limits<Real>::infinity()),
                  expo);
}

LargenessValue largeness_functional(const Field& u0, Real q) {
  if (!(q > 1.0 && q <= 2.0))
    throw std::invalid_argument("largeness_functional: q must lie in (1, 2]");
  const Field lap = laplacian_field(u0);
  const Real pos_part = std::max(lap.values.maxCoeff(), 0.0);
  if (pos_part == 0.0)
    return {std::numeric_limits<Real>::infinity(), true};
  const Real linf = lp_norm(u0, std::numeric_limits<Real>::infinity());
  return {linf * std::pow(pos_part, 1.0 - 2.0 / q), false};
}

Real gn_chain_ratio(const Field& u0, Real q, int dimension) {
  const Real qc = critical_exponent(dimension);
  if (!(q > qc && q < 2.0))
    throw std::invalid_argument("gn_chain_ratio: q must lie in (q_c, 2)");
  const Real inf = std::numeric_limits<Real>::infinity();
  const Real l1 = lp_norm(u0, 1.0);
  if (l1 == 0.0) throw std::invalid_argument("gn_chain_ratio: u0 is identically zero");
  const auto [radial, tangential] = hessian_radial_eigenvalues(u0);
  const Real hess = std::max(radial.values.abs().maxCoeff(),
                             tangential.values.abs().maxCoeff());
  const Real linf = lp_norm(u0, inf);
  const Real grad = lp_norm(gradient_field(u0), inf);
  const Real n = static_cast<Real>(dimension);
  const Real lhs = std::pow(linf * std::pow(hess, 1.0 - 2.0 / q), q * (n + 1.0) / 2.0);
  const Real rhs = l1 * std::pow(grad, q * (n + 1.0) - (n + 2.0));
  return lhs / rhs;
}

}  // namespace vhj
