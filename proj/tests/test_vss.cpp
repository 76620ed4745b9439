#include <doctest.h>

#include <vhj/closed_forms.hpp>
#include <vhj/vss.hpp>

#include <cmath>
#include <limits>

using namespace vhj;

namespace {
constexpr Real kInf = std::numeric_limits<Real>::infinity();

Real profile_norm(const ProfileTable& p, Real t, Real lp, Real radius, Real h) {
  // quadrature of |W(.,t)|^p against the radial measure
  const Index m = static_cast<Index>(radius / h);
  Real acc = 0.0;
  const Real omega = sphere_measure(p.dimension);
  for (Index j = 0; j <= m; ++j) {
    const Real r = h * static_cast<Real>(j);
    const Real w = (j == 0 || j == m) ? 0.5 * h : h;
    acc += w * omega * std::pow(r, p.dimension - 1) *
           std::pow(std::abs(vss_eval(r, t, p)), lp);
  }
  return std::pow(acc, 1.0 / lp);
}
}  // namespace

TEST_CASE("profile ode right-hand side") {
  // exponent balance q(a+1) = a+2 behind the similarity reduction
  for (Real q : {1.05, 1.2, 1.3, 1.45}) {
    const Real a = decay_exponent_a(q);
    CHECK(q * (a + 1.0) == doctest::Approx(a + 2.0).epsilon(1e-12));
  }
  CHECK(vss_profile_rhs(0.7, 0.0, 0.0, 1.3, 1) == 0.0);
  // regularized origin value f''(0) = -(a/2) f(0) / N
  const Real a = decay_exponent_a(1.3);
  CHECK(vss_profile_rhs(0.0, 2.0, 0.0, 1.3, 3) ==
        doctest::Approx(-0.5 * a * 2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("single trajectories") {
  // small alpha: stays finite and defined past eta = 1
  const ProfileTable small = shoot_profile(0.01, 1.3, 1, 8.0);
  CHECK(small.valid_nodes > small.eta.size() / 8);

  // initial shape: f'(0) = 0, then decreasing
  const ProfileTable p = shoot_profile(1.0, 1.3, 1, 8.0);
  CHECK(p.f_prime[0] == 0.0);
  CHECK(p.f_prime[2] < 0.0);
  CHECK(p.f[0] == doctest::Approx(1.0));
}

TEST_CASE("probe ladder brackets the profile") {
  // adjacent ladder trajectories with different crossing behavior exist
  bool saw_crossing = false, saw_positive = false;
  for (Real alpha : {0.125, 0.5, 2.0, 8.0, 32.0, 128.0}) {
    const ProfileTable p = shoot_profile(alpha, 1.3, 1, 30.0);
    if (p.decay_class == DecayClass::sign_change) saw_crossing = true;
    else saw_positive = true;
  }
  CHECK(saw_crossing);
  CHECK(saw_positive);
}

TEST_CASE("very singular profile") {
  const ProfileTable p = find_vss(1.3, 1);
  CHECK(p.decay_class == DecayClass::fast);
  CHECK(p.alpha_star > 0.0);

  // positive and decreasing on its range
  for (Index j = 0; j < p.valid_nodes; ++j) CHECK(p.f[j] > 0.0);
  for (Index j = 2; j < p.valid_nodes; ++j) CHECK(p.f_prime[j] <= 1e-12);

  // fast-decay tail gate
  const VecX g = p.eta.head(p.valid_nodes).pow(p.decay_a) * p.f.head(p.valid_nodes);
  CHECK(g[p.valid_nodes - 1] < 1e-3 * g.maxCoeff());

  // evaluation identities
  CHECK(vss_eval(0.7, 1.0, p) ==
        doctest::Approx(p.f[static_cast<Index>(0.7 / (p.eta[1] - p.eta[0]))])
            .epsilon(1e-6));
  CHECK(vss_eval(0.0, 2.0, p) ==
        doctest::Approx(std::pow(2.0, -0.5 * p.decay_a) * p.alpha_star)
            .epsilon(1e-12));

  // sup-norm self-similarity ||W(4)||_inf / ||W(1)||_inf = 4^{-a/2}
  CHECK(vss_eval(0.0, 4.0, p) / vss_eval(0.0, 1.0, p) ==
        doctest::Approx(std::pow(4.0, -0.5 * p.decay_a)).epsilon(1e-12));

  // weighted L^p norms are constant along the orbit
  for (Real lp : {1.0, 2.0}) {
    const Real w = 0.5 * (1.0 - 1.0 / lp) + 0.5 * (p.decay_a - 1.0);
    const Real c1 = profile_norm(p, 1.0, lp, 40.0, 0.01) * std::pow(1.0, w);
    const Real c2 = profile_norm(p, 2.0, lp, 40.0, 0.01) * std::pow(2.0, w);
    const Real c4 = profile_norm(p, 4.0, lp, 40.0, 0.01) * std::pow(4.0, w);
    CHECK(c2 == doctest::Approx(c1).epsilon(1e-4));
    CHECK(c4 == doctest::Approx(c1).epsilon(1e-4));
  }

  // the recorded unit-time L^1 norm matches an independent quadrature
  CHECK(profile_norm(p, 1.0, 1.0, 40.0, 0.01) ==
        doctest::Approx(p.l1_at_unit_time).epsilon(1e-5));
}

TEST_CASE("profile pde residual vanishes under refinement") {
  const ProfileTable p = find_vss(1.3, 1);
  auto residual = [&p](Real delta) {
    Real worst = 0.0;
    for (Real r = 0.6; r <= 1.9; r += 0.3) {
      for (Real t = 0.6; t <= 1.9; t += 0.3) {
        const Real wt = (vss_eval(r, t + delta, p) - vss_eval(r, t - delta, p)) /
                        (2.0 * delta);
        const Real wr = (vss_eval(r + delta, t, p) - vss_eval(r - delta, t, p)) /
                        (2.0 * delta);
        const Real wrr =
            (vss_eval(r + delta, t, p) - 2.0 * vss_eval(r, t, p) +
             vss_eval(r - delta, t, p)) /
            (delta * delta);
        worst = std::max(worst,
                         std::abs(wt - wrr + std::pow(std::abs(wr), p.q)));
      }
    }
    return worst;
  };
  const Real coarse = residual(0.08);
  const Real fine = residual(0.04);
  CHECK(fine <= 0.5 * coarse);
  CHECK(fine < 0.05);
}

TEST_CASE("evaluation beyond the table and bad inputs") {
  const ProfileTable p = find_vss(1.3, 1);
  CHECK(vss_eval(100.0, 1.0, p) == 0.0);
  CHECK(vss_eval_gradient(100.0, 1.0, p) == 0.0);
  CHECK_THROWS(vss_eval(1.0, 0.0, p));
  CHECK_THROWS(shoot_profile(-1.0, 1.3, 1, 10.0));
  CHECK_THROWS(shoot_profile(1.0, 1.7, 1, 10.0));  // q >= q_c
  CHECK_THROWS(find_vss(1.3, 1, -1.0));
}
