#include <vhj/solver.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vhj {

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

// Forward differences d[j] = (u[j+1]-u[j])/h, j = 0..M-1.
VecX forward_differences(const VecX& u, Real h) {
  const Index m = u.size() - 1;
  return (u.tail(m) - u.head(m)) / h;
}

Real godunov(Real a, Real b, Real q) {
  const Real up = std::max(a, 0.0);
  const Real dn = std::max(-b, 0.0);
  return std::pow(std::max(up, dn), q);
}

// Hamiltonian values per node from the one-sided differences; the origin
// uses the mirrored backward difference, the far node is only meaningful
// in the Neumann closure (Dirichlet pins it).
VecX hamiltonian_values(const VecX& u, const RadialGrid& g, Real q,
                        FarFieldBC bc) {
  const Index m = g.node_count;
  const VecX d = forward_differences(u, g.spacing);
  VecX ham(m + 1);
  ham[0] = godunov(-d[0], d[0], q);
  for (Index j = 1; j < m; ++j) ham[j] = godunov(d[j - 1], d[j], q);
  ham[m] = bc == FarFieldBC::neumann_zero ? godunov(d[m - 1], -d[m - 1], q)
                                          : 0.0;
  return ham;
}

// Scheme Laplacian; matches laplacian_field in the interior and at the
// origin, far node per boundary closure.
VecX scheme_laplacian(const VecX& u, const RadialGrid& g, FarFieldBC bc) {
  const Index m = g.node_count;
  const Real h = g.spacing;
  const Real h2 = h * h;
  const int n = g.dimension;
  VecX lap(m + 1);
  lap[0] = 2.0 * static_cast<Real>(n) * (u[1] - u[0]) / h2;
  for (Index j = 1; j < m; ++j) {
    const Real r = g.node(j);
    lap[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / h2 +
             static_cast<Real>(n - 1) * (u[j + 1] - u[j - 1]) / (2.0 * h * r);
  }
  lap[m] = bc == FarFieldBC::neumann_zero ? 2.0 * (u[m - 1] - u[m]) / h2 : 0.0;
  return lap;
}

// Solve (I - dt L) x = rhs with the radial Laplacian (Thomas algorithm;
// the matrix is a strictly diagonally dominant M-matrix).
VecX implicit_diffusion(const VecX& rhs, const RadialGrid& g, Real dt,
                        FarFieldBC bc) {
  const Index m = g.node_count;
  const Real h = g.spacing;
  const Real mu = dt / (h * h);
  const int n = g.dimension;
  VecX lower(m + 1), diag(m + 1), upper(m + 1);
  diag[0] = 1.0 + 2.0 * n * mu;
  upper[0] = -2.0 * n * mu;
  lower[0] = 0.0;
  for (Index j = 1; j < m; ++j) {
    const Real skew = static_cast<Real>(n - 1) * h / (2.0 * g.node(j));
    lower[j] = -mu * (1.0 - skew);
    diag[j] = 1.0 + 2.0 * mu;
    upper[j] = -mu * (1.0 + skew);
  }
  if (bc == FarFieldBC::neumann_zero) {
    lower[m] = -2.0 * mu;
    diag[m] = 1.0 + 2.0 * mu;
  } else {
    lower[m] = 0.0;
    diag[m] = 1.0;
  }
  upper[m] = 0.0;

  VecX c(m + 1), d(m + 1);
  c[0] = upper[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (Index j = 1; j <= m; ++j) {
    const Real denom = diag[j] - lower[j] * c[j - 1];
    c[j] = upper[j] / denom;
    d[j] = (rhs[j] - lower[j] * d[j - 1]) / denom;
  }
  VecX x(m + 1);
  x[m] = bc == FarFieldBC::neumann_zero ? d[m] : rhs[m];
  for (Index j = m - 1; j >= 0; --j) x[j] = d[j] - c[j] * x[j + 1];
  return x;
}

Real hamiltonian_cfl_bound(const VecX& u, const RadialGrid& g, Real q,
                           const SchemeConfig& cfg) {
  const Real p =
      forward_differences(u, g.spacing).abs().maxCoeff() + cfg.hamiltonian_floor;
  if (p <= 0.0) return kInf;
  return g.spacing / (q * std::pow(p, q - 1.0));
}

Real diffusion_cfl_bound(const RadialGrid& g) {
  return g.spacing * g.spacing / (2.0 * static_cast<Real>(g.dimension));
}

void check_cfl(const Field& u, Real dt, Real q, const SchemeConfig& cfg) {
  Real bound = hamiltonian_cfl_bound(u.values, u.grid, q, cfg);
  if (cfg.integrator == TimeIntegrator::explicit_euler)
    bound = std::min(bound, diffusion_cfl_bound(u.grid));
  if (dt > cfg.cfl_safety * bound * (1.0 + 1e-9))
    throw std::runtime_error("step: dt violates the CFL contract");
}

// One update with an arbitrary right-hand-side source (source = -H for the
// nonlinear equation, +f for the forced-linear mode).
VecX advance(const VecX& u, const VecX& source, const RadialGrid& g, Real dt,
             const SchemeConfig& cfg) {
  if (cfg.integrator == TimeIntegrator::explicit_euler) {
    VecX out = u + dt * (scheme_laplacian(u, g, cfg.boundary) + source);
    if (cfg.boundary == FarFieldBC::dirichlet_zero) out[g.node_count] = 0.0;
    return out;
  }
  VecX star = u + dt * source;
  if (cfg.boundary == FarFieldBC::dirichlet_zero) star[g.node_count] = 0.0;
  return implicit_diffusion(star, g, dt, cfg.boundary);
}

struct Stepper {
  RadialGrid grid;
  Real q = 0.0;  // <= 0 means forced-linear mode
  const Forcing* forcing = nullptr;
  SchemeConfig cfg;

  // Source term and its signed quadrature mass rate as dissipated/injected.
  // Dissipation accumulates +int H (nonlinear) or -int f (forced).
  VecX source(const Field& u, Real& rate) const {
    if (q > 0.0) {
      VecX ham = hamiltonian_values(u.values, grid, q, cfg.boundary);
      rate = (quadrature_weights(grid) * ham).sum();
      return -ham;
    }
    VecX f = (*forcing)(u, u.time);
    if (f.size() != grid.size())
      throw std::invalid_argument("forcing: wrong sample count");
    rate = -(quadrature_weights(grid) * f).sum();
    return f;
  }

  Real stable_dt(const Field& u) const {
    if (q <= 0.0)
      return cfg.integrator == TimeIntegrator::explicit_euler
                 ? cfg.cfl_safety * diffusion_cfl_bound(grid)
                 : kInf;
    Real bound = hamiltonian_cfl_bound(u.values, grid, q, cfg);
    if (cfg.integrator == TimeIntegrator::explicit_euler)
      bound = std::min(bound, diffusion_cfl_bound(grid));
    return cfg.cfl_safety * bound;
  }
};

Trajectory run(const Stepper& st, Field u,
               const std::vector<Real>& output_times) {
  for (size_t i = 0; i < output_times.size(); ++i) {
    if (!(output_times[i] > (i == 0 ? 0.0 : output_times[i - 1])))
      throw std::invalid_argument("solve: output times must be positive and increasing");
  }
  const Real t_ref = output_times.empty() ? 1.0 : output_times.front();

  Trajectory traj;
  traj.snapshots.push_back(u);
  traj.dissipation.push_back(0.0);

  Real dissipated = 0.0;
  Real rate_prev = 0.0;
  VecX src = st.source(u, rate_prev);

  const Index edge = st.grid.node_count - 1;
  auto audit = [&](const Field& f) {
    const Real amp = f.values.abs().maxCoeff();
    if (amp <= 0.0) return;
    const Real tail = std::abs(f.values[edge]);
    if (tail > st.cfg.tail_violation_tol * amp && !traj.boundary_violated) {
      traj.boundary_violated = true;
      traj.first_violation_time = f.time;
    }
    if (tail > st.cfg.tail_warn_tol * amp && !traj.boundary_warned) {
      traj.boundary_warned = true;
      traj.first_warn_time = f.time;
    }
  };
  audit(u);

  for (Real target : output_times) {
    while (u.time < target * (1.0 - 1e-12)) {
      Real dt;
      if (st.cfg.fixed_dt > 0.0) {
        dt = st.cfg.fixed_dt;
        if (st.q > 0.0 && dt > st.stable_dt(u) * (1.0 + 1e-9))
          throw std::runtime_error("solve: fixed dt violates the CFL contract");
      } else {
        dt = std::min(st.stable_dt(u),
                      st.cfg.dt_time_fraction * (u.time + t_ref));
      }
      dt = std::min(dt, target - u.time);
      if (!(dt > 0.0)) throw std::runtime_error("solve: timestep underflow");

      VecX next = advance(u.values, src, st.grid, dt, st.cfg);
      if (!next.isFinite().all())
        throw std::runtime_error("solve: non-finite state (blow-up of the discretization)");
      u = Field(u.grid, std::move(next), u.time + dt);

      Real rate = 0.0;
      src = st.source(u, rate);
      dissipated += 0.5 * dt * (rate_prev + rate);
      rate_prev = rate;
      ++traj.steps;
    }
    u.time = target;
    traj.snapshots.push_back(u);
    traj.dissipation.push_back(dissipated);
    audit(u);
  }
  return traj;
}

}  // namespace

Real godunov_hamiltonian(Real p_minus, Real p_plus, Real q) {
  if (!(q > 1.0)) throw std::invalid_argument("godunov_hamiltonian: q must exceed 1");
  return godunov(p_minus, p_plus, q);
}

Real cfl_timestep(const Field& u, Real q, const SchemeConfig& cfg) {
  Real bound = hamiltonian_cfl_bound(u.values, u.grid, q, cfg);
  if (cfg.integrator == TimeIntegrator::explicit_euler)
    bound = std::min(bound, diffusion_cfl_bound(u.grid));
  return cfg.cfl_safety * bound;
}

Field step(const Field& u, Real dt, const ProblemSpec& spec,
           const SchemeConfig& cfg) {
  if (!(spec.q > 1.0)) throw std::invalid_argument("step: q must exceed 1");
  check_cfl(u, dt, spec.q, cfg);
  VecX ham = hamiltonian_values(u.values, u.grid, spec.q, cfg.boundary);
  VecX next = advance(u.values, (-ham).eval(), u.grid, dt, cfg);
  if (!next.isFinite().all())
    throw std::runtime_error("step: non-finite state (blow-up of the discretization)");
  return Field(u.grid, std::move(next), u.time + dt);
}

Trajectory solve(const ProblemSpec& spec, const SchemeConfig& cfg,
                 const std::vector<Real>& output_times) {
  if (!(spec.q > 1.0)) throw std::invalid_argument("solve: q must exceed 1");
  Stepper st{spec.grid, spec.q, nullptr, cfg};
  return run(st, sample_datum(spec.datum, spec.grid), output_times);
}

Trajectory solve_forced_linear(const Field& u0, int dimension,
                               const Forcing& forcing,
                               const SchemeConfig& cfg,
                               const std::vector<Real>& output_times) {
  RadialGrid grid = u0.grid;
  grid.dimension = dimension;
  Stepper st{grid, 0.0, &forcing, cfg};
  return run(st, Field(grid, u0.values, 0.0), output_times);
}

Field hopf_cole_exact(const Field& u0, Real t) {
  if (u0.grid.dimension != 1)
    throw std::invalid_argument("hopf_cole_exact: N must be 1");
  if ((u0.values > 0.0).any())
    throw std::invalid_argument("hopf_cole_exact: datum must be nonpositive");
  if (!(t > 0.0)) throw std::invalid_argument("hopf_cole_exact: t must be positive");

  const Index m = u0.grid.node_count;
  const Real h = u0.grid.spacing;
  // Free-space convolution on the even extension y_k = (k - m) h.
  VecX h0(2 * m + 1), y(2 * m + 1);
  for (Index k = 0; k <= 2 * m; ++k) {
    const Index j = std::abs(k - m);
    y[k] = static_cast<Real>(k - m) * h;
    h0[k] = std::expm1(-u0.values[j]);
  }
  const Real pref = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
  VecX out(m + 1);
  for (Index j = 0; j <= m; ++j) {
    const Real x = u0.grid.node(j);
    Real acc = 0.0;
    for (Index k = 0; k <= 2 * m; ++k) {
      const Real d = x - y[k];
      Real w = (k == 0 || k == 2 * m) ? 0.5 * h : h;
      acc += w * pref * std::exp(-d * d / (4.0 * t)) * h0[k];
    }
    out[j] = -std::log1p(acc);
  }
  return Field(u0.grid, std::move(out), t);
}

std::vector<Real> geometric_times(Real t0, Real ratio, Real horizon) {
  if (!(t0 > 0.0) || !(ratio > 1.0) || !(horizon >= t0))
    throw std::invalid_argument("geometric_times: need 0 < t0 <= horizon, ratio > 1");
  std::vector<Real> times;
  for (Real t = t0; t < horizon * (1.0 - 1e-12); t *= ratio)
    times.push_back(t);
  times.push_back(horizon);
  return times;
}

}  // namespace vhj
