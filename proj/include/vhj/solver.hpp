#pragma once

#include <functional>
#include <vector>

#include <vhj/initial_data.hpp>

namespace vhj {

/// One evolution problem: u_t - Lap u + |grad u|^q = 0 on the radial grid,
/// homogeneous Dirichlet at r = R, up to the given horizon.
struct ProblemSpec {
  Real q = 1.5;
  int dimension = 1;
  InitialDatum datum;
  RadialGrid grid;
  Real horizon = 1.0;
};

enum class TimeIntegrator { explicit_euler, imex };

/// Far-field closure. Dirichlet is the production boundary; the Neumann
/// mirror exists so constants are exact solutions in tests.
enum class FarFieldBC { dirichlet_zero, neumann_zero };

struct SchemeConfig {
  Real cfl_safety = 0.3;
  TimeIntegrator integrator = TimeIntegrator::explicit_euler;
  FarFieldBC boundary = FarFieldBC::dirichlet_zero;
  Real hamiltonian_floor = 0.0;  // added to ||grad u||_inf in the CFL bound
  Real fixed_dt = 0.0;           // > 0 forces this step (CFL still checked)
  Real dt_time_fraction = 0.05;  // accuracy cap dt <= frac * (t + t_ref)
  Real tail_warn_tol = 1e-8;     // |u(R-h)| > tol*||u||_inf: flag a warning
  Real tail_violation_tol = 1e-3;  // ... hard contamination: claims invalid
};

/// Snapshots at the requested output times (plus t = 0) with the cumulative
/// dissipation D(t) = int_0^t int |grad u|^q accumulated per step, so that
/// I(t) + D(t) = I(0) up to boundary flux. In forced-linear runs D instead
/// accumulates -int int f, preserving the same identity.
struct Trajectory {
  std::vector<Field> snapshots;
  std::vector<Real> dissipation;
  long steps = 0;
  bool boundary_warned = false;
  bool boundary_violated = false;
  Real first_warn_time = -1.0;
  Real first_violation_time = -1.0;
};

/// Godunov flux for H(p) = |p|^q on the backward/forward differences:
///   H_G(a, b) = max( (max(a,0))^q, (max(-b,0))^q ).
/// Consistent (H_G(p,p) = |p|^q), nondecreasing in a, nonincreasing in b.
Real godunov_hamiltonian(Real p_minus, Real p_plus, Real q);

/// Largest stable step for the current state under cfg's contract:
///   explicit: cfl * min( h^2/(2N), h/(q (P + floor)^{q-1}) ),
///   imex:     cfl * h/(q (P + floor)^{q-1}),
/// with P the max one-sided difference magnitude. Infinite bounds are
/// returned as such; solve() caps them against the output schedule.
Real cfl_timestep(const Field& u, Real q, const SchemeConfig& cfg);

/// One update of the monotone scheme. Throws on CFL violation (explicit
/// diffusion part) and on non-finite state.
Field step(const Field& u, Real dt, const ProblemSpec& spec,
           const SchemeConfig& cfg);

/// Evolve the sampled datum, recording snapshots at output_times.
Trajectory solve(const ProblemSpec& spec, const SchemeConfig& cfg,
                 const std::vector<Real>& output_times);

/// State-aware forcing for the linear mode; a pure f(x,t) ignores state.
using Forcing = std::function<VecX(const Field& state, Real t)>;

/// Same stencil with the Hamiltonian replaced by +f: u_t = Lap u + f.
Trajectory solve_forced_linear(const Field& u0, int dimension,
                               const Forcing& forcing,
                               const SchemeConfig& cfg,
                               const std::vector<Real>& output_times);

/// Exact solution at q = 2, N = 1 for nonpositive integrable data via the
/// logarithmic substitution that linearizes the equation:
///   u(t) = -ln(1 + G(t) * (exp(-u0) - 1)),
/// evaluated by trapezoid kernel quadrature on the symmetric extension of
/// the radial grid. Independent of the finite-difference path.
Field hopf_cole_exact(const Field& u0, Real t);

/// Geometric output schedule t0, t0*ratio, ... capped at horizon (horizon
/// itself is always included).
std::vector<Real> geometric_times(Real t0, Real ratio, Real horizon);

}  // namespace vhj
