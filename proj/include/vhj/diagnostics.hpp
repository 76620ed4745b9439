#pragma once

#include <optional>
#include <string>
#include <vector>

#include <vhj/closed_forms.hpp>
#include <vhj/solver.hpp>
#include <vhj/vss.hpp>

namespace vhj {

/// Everything measured per snapshot. dissipation is copied from the solver
/// accumulator so that mass(t) + dissipation(t) = mass(0) holds to scheme
/// tolerance at every row.
struct NormSeries {
  std::vector<Real> t;
  std::vector<Real> l1, l2, linf;
  std::vector<Real> grad_l1, grad_linf;
  std::vector<Real> mass;
  std::vector<Real> sup_lap;    // sup_x Lap u (signed)
  std::vector<Real> max_hess;   // largest Hessian eigenvalue (signed)
  std::vector<Real> dissipation;

  Index rows() const { return static_cast<Index>(t.size()); }
};

NormSeries build_norm_series(const Trajectory& traj);

/// Limit estimate read off the end of a series, with the conservation
/// residual |I(0) - D(T) - I(T)| and a convergence flag (relative motion
/// over the last time decade below decade_tol).
struct LimitEstimate {
  Real value = 0.0;
  Real residual = 0.0;
  bool converged = false;
  Real last_decade_change = 0.0;
};

LimitEstimate i_infty_estimate(const NormSeries& s, Real decade_tol = 0.2);

/// Plateau of ||u(t)||_inf for nonpositive runs; converged when the
/// relative decrease over the last decade is below plateau_tol.
LimitEstimate m_infty_estimate(const NormSeries& s, Real plateau_tol = 0.02);

/// Weighted error series (value and gradient variants share the time axis).
struct ErrorSeries {
  std::vector<Real> t;
  std::vector<Real> value;
  std::vector<Real> gradient;
};

/// t^{(N/2)(1-1/p)} ||u(t) - I G(t)||_p and the gradient version with the
/// extra t^{1/2}. time_offset shifts the comparison time for orbit runs
/// whose snapshots start at a positive physical time.
ErrorSeries rescaled_heat_error(const Trajectory& traj, Real p, Real i_inf,
                                Real time_offset = 0.0);

/// t^{(N/2)(1-1/p)+(a-N)/2} ||u(t) - W(t)||_p and gradient version with the
/// extra t^{1/2}.
ErrorSeries rescaled_vss_error(const Trajectory& traj, Real p,
                               const ProfileTable& profile,
                               Real time_offset = 0.0);

/// ||u(t) - Z_M(t)||_inf per snapshot (value slot; gradient slot unused).
ErrorSeries z_error(const Trajectory& traj, Real m_inf, Real q,
                    Real time_offset = 0.0);

/// t^{(1-1/p)/q} ||u_x(t) - Z_{M,x}(t)||_p, N = 1, p in [1, inf).
ErrorSeries gradient_z_error(const Trajectory& traj, Real m_inf, Real p,
                             Real q, Real time_offset = 0.0);

/// Last-decade trend: ratio = s(T)/s(T/10) (snapshots nearest in log time)
/// and the largest relative uptick between consecutive snapshots within the
/// decade. A "limit is 0" claim is certified by ratio <= gate with at most
/// mild upticks, never by absolute smallness.
struct DecadeTrend {
  Real ratio = 1.0;
  Real max_uptick = 0.0;
  bool valid = false;
  bool certified(Real gate) const {
    return valid && ratio <= gate && max_uptick <= 0.05;
  }
};

DecadeTrend decade_trend(const std::vector<Real>& t,
                         const std::vector<Real>& v);

/// One a-priori bound monitor: for f(t) <= C t^{-beta} the empirical
/// constant is the running sup of f(t) t^beta; PASS means it is finite and
/// its growth over the last decade stays within a factor 2 (bounds of
/// lower type use the running inf and must stay positive).
struct MonitorResult {
  std::string name;
  Real c_hat = 0.0;
  Real decade_ratio = 1.0;
  bool pass = false;
  std::string detail;
};

struct MonitorReport {
  std::vector<MonitorResult> checks;
  bool all_pass = true;
  const MonitorResult* find(const std::string& name) const;
};

/// Evaluate the a-priori estimate monitors appropriate to the run: the
/// gradient decay bound, the one-sided Laplacian bounds (three forms), the
/// Hessian comparison with its initial value, and, for nonnegative
/// subcritical runs, the self-similar envelope bounds, the pointwise
/// barrier beyond the tail radius, and the weighted gradient norms. For
/// runs with a positive sup-norm plateau the L^1 growth lower bound is
/// monitored as well. Unilateral checks get only an O(h) slack.
MonitorReport estimate_monitors(const ProblemSpec& spec,
                                const Trajectory& traj,
                                const NormSeries& series);

/// omega_N int_R^{gridR} |f| r^{N-1} dr.
Real tail_mass(const Field& f, Real radius);

/// Self-similar resampling on the same grid:
///   parabolic: v(r) = k^a u(k r),    snapshot time t -> t / k^2   (exponent = a)
///   hj:        v(r) = u(lambda r),   snapshot time t -> t / lambda^q (exponent = q)
/// Values beyond the shrunken window read 0.
enum class RescaleMode { parabolic, hj };
struct RescaledField {
  Field field;
  bool window_truncated = false;
};
RescaledField rescale_field(const Field& f, RescaleMode mode, Real factor,
                            Real exponent);

/// Log-log least-squares slope over [t_lo, t_hi] with the standard-error
/// halfwidth. Throws on nonpositive values inside the window or a window
/// under one decade.
struct PowerFit {
  Real slope = 0.0;
  Real halfwidth = 0.0;
  Index points = 0;
};
PowerFit decay_rate_fit(const std::vector<Real>& t,
                        const std::vector<Real>& v, Real t_lo, Real t_hi);

enum class Verdict { DIFFUSION, VSS_BALANCE, HJ_DOMINATED, UNDECIDED };
std::string to_string(Verdict v);

/// Decision-table evidence and verdict for one completed run. The
/// smallness/largeness functionals are reported for comparison with the
/// sufficient conditions but never consulted for the verdict.
struct RegimeReport {
  Verdict verdict = Verdict::UNDECIDED;
  LimitEstimate i_infty;
  LimitEstimate m_infty;       // nonpositive runs
  DecadeTrend heat_trend;      // p = inf value series
  DecadeTrend heat_grad_trend;
  DecadeTrend vss_trend;       // p = 1 (subcritical nonnegative runs)
  DecadeTrend z_trend;         // sup norm (nonpositive runs)
  PowerFit linf_fit;           // fitted decay exponents, last decade
  PowerFit l1_fit;
  Real smallness = 0.0;        // reported alongside, not consulted
  Real largeness = 0.0;
  bool largeness_degenerate = false;
  MonitorReport monitors;
  bool boundary_warned = false;
  bool boundary_violated = false;
  Real valid_until = 0.0;      // horizon or first hard contamination time
  std::string evidence;        // human-readable decision trace
};

struct ClassifyOptions {
  Real trend_gate = 0.7;       // last-decade ratio gate for "limit is 0"
  Real i_decade_tol = 0.2;
  Real m_plateau_tol = 0.02;
  const ProfileTable* vss = nullptr;  // reused if already computed
  bool run_monitors = true;
};

RegimeReport regime_classify(const ProblemSpec& spec, const Trajectory& traj,
                             const ClassifyOptions& opt = {});

/// Amplitude scan for the empirical smallness/largeness thresholds. Runs
/// the nonpositive bump family over a geometric amplitude ladder, classifies
/// each run, and bisects between the largest diffusion-classified and the
/// smallest escape-classified amplitudes. No bracket (found = false) is a
/// legitimate outcome and is reported, not guessed.
struct ScanPoint {
  Real amplitude = 0.0;
  Verdict verdict = Verdict::UNDECIDED;
  Real smallness = 0.0;
  Real largeness = 0.0;
};

struct ThresholdScanResult {
  bool found = false;
  Real amplitude_lo = 0.0;  // largest DIFFUSION amplitude of the bracket
  Real amplitude_hi = 0.0;  // smallest HJ_DOMINATED amplitude
  Real smallness_lo = 0.0, smallness_hi = 0.0;
  Real largeness_lo = 0.0, largeness_hi = 0.0;
  std::vector<ScanPoint> points;
};

struct ThresholdScanConfig {
  Real q = 1.5;
  int dimension = 1;
  Real support_radius = 1.0;
  Real amplitude_min = 0.1;
  Real amplitude_max = 20.0;
  int ladder_size = 8;
  int bisect_iters = 6;
  Real horizon = 200.0;
  Real grid_radius = 200.0;
  Real spacing = 0.125;
  SchemeConfig scheme{.cfl_safety = 0.3,
                      .integrator = TimeIntegrator::imex};
  ClassifyOptions classify{};
  int threads = 1;
};

ThresholdScanResult threshold_scan(const ThresholdScanConfig& cfg);

}  // namespace vhj
