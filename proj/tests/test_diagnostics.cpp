#include <doctest.h>

#include <vhj/diagnostics.hpp>

#include <cmath>
#include <limits>

using namespace vhj;

namespace {
constexpr Real kInf = std::numeric_limits<Real>::infinity();

SchemeConfig imex_cfg() {
  SchemeConfig cfg;
  cfg.integrator = TimeIntegrator::imex;
  cfg.cfl_safety = 0.3;
  cfg.dt_time_fraction = 0.01;
  return cfg;
}
}  // namespace

TEST_CASE("decay rate fit") {
  std::vector<Real> t, v, w;
  for (Real x = 0.1; x < 110.0; x *= 1.3337) {
    t.push_back(x);
    v.push_back(std::pow(x, -0.5));
    w.push_back(x > 1.0 ? 1.0 : -1.0);
  }
  const PowerFit f = decay_rate_fit(t, v, 1.0, 100.0);
  CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(f.halfwidth < 1e-9);
  CHECK_THROWS(decay_rate_fit(t, v, 1.0, 5.0));  // under one decade
  CHECK_THROWS(decay_rate_fit(t, w, 0.1, 100.0));  // nonpositive values
}

TEST_CASE("decade trend mechanics") {
  std::vector<Real> t, falling, flat;
  for (Real x = 0.1; x < 110.0; x *= 1.3337) {
    t.push_back(x);
    falling.push_back(std::pow(x, -0.4));
    flat.push_back(2.0);
  }
  const DecadeTrend a = decade_trend(t, falling);
  CHECK(a.valid);
  CHECK(a.ratio == doctest::Approx(std::pow(10.0, -0.4)).epsilon(0.05));
  CHECK(a.certified(0.7));
  const DecadeTrend b = decade_trend(t, flat);
  CHECK(b.valid);
  CHECK_FALSE(b.certified(0.7));
}

TEST_CASE("norm series and the mass identity") {
  RadialGrid g(1, 300, 0.1);
  ProblemSpec spec;
  spec.q = 1.8;
  spec.grid = g;
  spec.horizon = 20.0;
  spec.datum = gaussian_datum(1.0, 1.0, SignClass::nonnegative);
  const Trajectory traj =
      solve(spec, imex_cfg(), geometric_times(0.1, 1.5, 20.0));
  const NormSeries s = build_norm_series(traj);
  REQUIRE(s.rows() == static_cast<Index>(traj.snapshots.size()));
  // the trapezoid dissipation bookkeeping differs from the scheme's
  // left-endpoint balance at O(dt), so the identity holds to scheme tolerance
  for (Index i = 0; i < s.rows(); ++i) {
    CHECK(std::abs(s.mass[i] + s.dissipation[i] - s.mass[0]) <=
          1e-2 * std::abs(s.mass[0]));
    if (i > 0) CHECK(s.dissipation[i] >= s.dissipation[i - 1] - 1e-14);
  }
}

TEST_CASE("i_infty estimate: conservation when the q-term is off") {
  RadialGrid g(1, 600, 0.1);  // R = 60 keeps the tail inside over the horizon
  const Field u0 = sample_datum(gaussian_datum(1.0, 1.0), g);
  Forcing none = [](const Field& u, Real) { return VecX::Zero(u.size()).eval(); };
  SchemeConfig cfg;
  cfg.integrator = TimeIntegrator::explicit_euler;
  const Trajectory traj = solve_forced_linear(
      u0, 1, none, cfg, geometric_times(0.1, std::pow(10.0, 0.25), 50.0));
  const LimitEstimate e = i_infty_estimate(build_norm_series(traj));
  CHECK(e.converged);
  CHECK(e.value == doctest::Approx(integral(u0)).epsilon(1e-6));
  CHECK(e.residual < 1e-8);
}

TEST_CASE("m_infty estimate") {
  RadialGrid g(1, 400, 0.1);
  ProblemSpec spec;
  spec.q = 2.0;
  spec.grid = g;
  spec.horizon = 50.0;
  spec.datum = gaussian_datum(-0.5, 1.0, SignClass::nonpositive);
  const Trajectory traj =
      solve(spec, imex_cfg(), geometric_times(0.05, std::pow(10.0, 0.125), 50.0));
  const NormSeries s = build_norm_series(traj);
  const LimitEstimate m = m_infty_estimate(s);
  // small datum at q = 2 diffuses: the sup norm keeps falling, no plateau
  CHECK_FALSE(m.converged);
  CHECK(m.value < 0.25);

  // zero datum: estimate is exactly zero
  ProblemSpec zspec = spec;
  zspec.datum = tabulated_datum(VecX::Zero(g.size()));
  const Trajectory zt = solve(zspec, imex_cfg(), {1.0, 10.0, 50.0});
  CHECK(m_infty_estimate(build_norm_series(zt)).value == 0.0);
}

TEST_CASE("rescaled heat error on an exact kernel orbit") {
  RadialGrid g(1, 400, 0.1);
  VecX g1(g.size());
  for (Index j = 0; j < g.size(); ++j) g1[j] = heat_kernel(g.node(j), 1.0, 1);
  Forcing none = [](const Field& u, Real) { return VecX::Zero(u.size()).eval(); };
  SchemeConfig cfg;
  cfg.integrator = TimeIntegrator::explicit_euler;
  const Trajectory traj = solve_forced_linear(
      Field(g, g1), 1, none, cfg, geometric_times(0.5, std::pow(10.0, 0.25), 30.0));
  // compare against G(., 1 + t): the orbit tracks the kernel exactly, so the
  // weighted error stays at scheme-error level at all times
  const ErrorSeries e = rescaled_heat_error(traj, kInf, 1.0, 1.0);
  for (Real v : e.value) CHECK(v < 5e-3);
  for (Real v : e.gradient) CHECK(v < 5e-3);

  // sup-norm decay exponent of the orbit, fitted in kernel time
  const NormSeries s = build_norm_series(traj);
  std::vector<Real> shifted = s.t;
  for (Real& x : shifted) x += 1.0;
  const PowerFit fit = decay_rate_fit(shifted, s.linf, 3.0, 31.0);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(0.01));
}

TEST_CASE("z error against the hopf-lax semigroup oracle") {
  const Real q = 1.5, m = 1.0;
  RadialGrid g(1, 512, 1.0 / 64.0);
  VecX z1(g.size());
  for (Index j = 0; j < g.size(); ++j) z1[j] = z_profile(g.node(j), 1.0, m, q);
  const Field start(g, z1, 0.0);

  Trajectory traj;
  traj.snapshots.push_back(start);
  traj.dissipation.push_back(0.0);
  for (Real s : {0.5, 1.0}) {
    VecX v(g.size());
    for (Index j = 0; j < g.size(); ++j)
      v[j] = hopf_lax_eval(start, g.node(j), s, q);
    traj.snapshots.push_back(Field(g, std::move(v), s));
    traj.dissipation.push_back(0.0);
  }
  const ErrorSeries e = z_error(traj, m, q, 1.0);  // compare at t = 1 + s
  const Real lip = z_profile_gradient_mag(
      0.99999 * z_support_radius(2.0, m, q), 2.0, m, q);
  for (Real v : e.value) CHECK(v <= 2.0 * g.spacing * lip + 1e-12);
  CHECK_THROWS(gradient_z_error(traj, m, kInf, q));
}

TEST_CASE("tail mass and rescaling") {
  RadialGrid g(1, 600, 0.1);
  const Field bump = sample_datum(bump_datum(1.0, 2.0), g);
  CHECK(tail_mass(bump, 3.0) == 0.0);
  CHECK_THROWS(tail_mass(bump, 100.0));

  // identity at factor 1
  const RescaledField id = rescale_field(bump, RescaleMode::parabolic, 1.0, 2.0);
  CHECK((id.field.values - bump.values).abs().maxCoeff() < 1e-12);

  // parabolic invariance of the heat kernel orbit with exponent a := N
  VecX gk(g.size());
  for (Index j = 0; j < g.size(); ++j) gk[j] = heat_kernel(g.node(j), 1.0, 1);
  const Field G1(g, gk, 1.0);
  const RescaledField rs = rescale_field(G1, RescaleMode::parabolic, 2.0, 1.0);
  CHECK(rs.field.time == doctest::Approx(0.25));
  for (Index j = 0; j < g.size(); ++j)
    CHECK(rs.field.values[j] ==
          doctest::Approx(heat_kernel(g.node(j), 0.25, 1)).epsilon(5e-4));

  // hj-mode invariance of the inviscid profile orbit
  const Real q = 1.5;
  VecX zv(g.size());
  for (Index j = 0; j < g.size(); ++j) zv[j] = z_profile(g.node(j), 2.0, 1.0, q);
  const Field Z2(g, zv, 2.0);
  const RescaledField zs = rescale_field(Z2, RescaleMode::hj, 2.0, q);
  CHECK(zs.field.time == doctest::Approx(2.0 / std::pow(2.0, q)));
  for (Index j = 0; j < g.size(); ++j) {
    const Real want = z_profile(g.node(j), zs.field.time, 1.0, q);
    CHECK(std::abs(zs.field.values[j] - want) < 2e-2 * g.spacing + 1e-12);
  }
}

TEST_CASE("rescaled tail masses shrink uniformly in the family") {
  RadialGrid g(1, 600, 0.1);
  ProblemSpec spec;
  spec.q = 1.3;
  spec.grid = g;
  spec.horizon = 16.0;
  spec.datum = bump_datum(2.0, 1.0, SignClass::nonnegative);
  const Trajectory traj = solve(spec, imex_cfg(), {1.0, 4.0, 16.0});
  const Real a = decay_exponent_a(1.3);
  // u_k at unit time needs the snapshot at t = k^2
  std::vector<Field> family;
  family.push_back(traj.snapshots[1]);
  family.push_back(rescale_field(traj.snapshots[2], RescaleMode::parabolic,
                                 2.0, a).field);
  family.push_back(rescale_field(traj.snapshots[3], RescaleMode::parabolic,
                                 4.0, a).field);
  for (Real radius : {4.0, 8.0, 16.0}) {
    for (const Field& u : family) {
      CHECK(tail_mass(u, radius) <= tail_mass(u, radius / 2.0) + 1e-15);
    }
  }
}

TEST_CASE("monitors on a diffusive nonpositive run") {
  RadialGrid g(1, 400, 0.1);
  ProblemSpec spec;
  spec.q = 2.0;
  spec.grid = g;
  spec.horizon = 50.0;
  spec.datum = bump_datum(-1.0, 1.0, SignClass::nonpositive);
  const Trajectory traj =
      solve(spec, imex_cfg(), geometric_times(0.05, std::pow(10.0, 0.125), 50.0));
  const NormSeries s = build_norm_series(traj);
  const MonitorReport rep = estimate_monitors(spec, traj, s);
  for (const char* name : {"grad_decay", "suplap_vs_grad0", "suplap_vs_amp", "suplap_monotone", "hess_monotone"}) {
    const MonitorResult* m = rep.find(name);
    REQUIRE(m != nullptr);
    CHECK(m->pass);
  }
  // short window is reported as an error
  Trajectory shortt;
  shortt.snapshots = {traj.snapshots[0], traj.snapshots[1]};
  shortt.dissipation = {0.0, 0.0};
  CHECK_THROWS(estimate_monitors(spec, shortt, build_norm_series(shortt)));
}

TEST_CASE("fat-tailed datum is a negative control for the balance verdict") {
  // a tail decaying slower than r^{-a} violates the balance hypothesis;
  // the weighted profile distance must not certify a decrease
  const ProfileTable p = find_vss(1.3, 1);
  RadialGrid g(1, 1200, 0.1);
  VecX v(g.size());
  for (Index j = 0; j < g.size(); ++j) {
    const Real r = g.node(j);
    v[j] = 0.5 * std::pow(1.0 + r, -1.5);
  }
  const Field bump = sample_datum(bump_datum(2.0, 1.0), g);
  v += bump.values;
  ProblemSpec spec;
  spec.q = 1.3;
  spec.dimension = 1;
  spec.grid = g;
  spec.horizon = 100.0;
  spec.datum = tabulated_datum(v, SignClass::nonnegative);
  const Trajectory traj =
      solve(spec, imex_cfg(), geometric_times(0.1, std::pow(10.0, 0.125), 100.0));
  const ErrorSeries w = rescaled_vss_error(traj, 1.0, p);
  const DecadeTrend trend = decade_trend(w.t, w.value);
  CHECK_FALSE(trend.certified(0.7));
  ClassifyOptions opt;
  opt.run_monitors = false;
  opt.vss = &p;
  CHECK(regime_classify(spec, traj, opt).verdict != Verdict::VSS_BALANCE);
}

TEST_CASE("classifier verdict is stable under grid refinement") {
  for (Real h : {0.1, 0.05}) {
    RadialGrid g(1, static_cast<Index>(std::lround(40.0 / h)), h);
    ProblemSpec spec;
    spec.q = 2.0;
    spec.grid = g;
    spec.horizon = 50.0;
    spec.datum = gaussian_datum(-0.3, 1.0, SignClass::nonpositive);
    const Trajectory traj =
        solve(spec, imex_cfg(), geometric_times(0.05, std::pow(10.0, 0.125), 50.0));
    ClassifyOptions opt;
    opt.run_monitors = false;
    CHECK(regime_classify(spec, traj, opt).verdict == Verdict::DIFFUSION);
  }
}

TEST_CASE("classifier: diffusion verdict and undecided fallback") {
  RadialGrid g(1, 400, 0.1);
  ProblemSpec spec;
  spec.q = 2.0;
  spec.grid = g;
  spec.horizon = 50.0;
  spec.datum = gaussian_datum(-0.3, 1.0, SignClass::nonpositive);
  const Trajectory traj =
      solve(spec, imex_cfg(), geometric_times(0.05, std::pow(10.0, 0.125), 50.0));
  ClassifyOptions opt;
  const RegimeReport rep = regime_classify(spec, traj, opt);
  CHECK(rep.verdict == Verdict::DIFFUSION);
  CHECK(rep.i_infty.value < 0.0);
  CHECK(rep.monitors.all_pass);

  // a two-snapshot run cannot certify anything
  ProblemSpec short_spec = spec;
  short_spec.horizon = 0.2;
  const Trajectory st = solve(short_spec, imex_cfg(), {0.1, 0.2});
  const RegimeReport srep = regime_classify(short_spec, st, opt);
  CHECK(srep.verdict == Verdict::UNDECIDED);
}
