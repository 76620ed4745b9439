#include <vhj/diagnostics.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vhj {

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

// Index of the snapshot nearest t_target in log time (t > 0 entries only).
Index nearest_log_index(const std::vector<Real>& t, Real t_target) {
  Index best = -1;
  Real best_d = kInf;
  for (size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0)) continue;
    const Real d = std::abs(std::log(t[i] / t_target));
    if (d < best_d) {
      best_d = d;
      best = static_cast<Index>(i);
    }
  }
  return best;
}

}  // namespace

NormSeries build_norm_series(const Trajectory& traj) {
  NormSeries s;
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    const Field& u = traj.snapshots[i];
    const Field du = gradient_field(u);
    const Field lap = laplacian_field(u);
    const auto [radial, tangential] = hessian_radial_eigenvalues(u);
    s.t.push_back(u.time);
    s.l1.push_back(lp_norm(u, 1.0));
    s.l2.push_back(lp_norm(u, 2.0));
    s.linf.push_back(lp_norm(u, kInf));
    s.grad_l1.push_back(lp_norm(du, 1.0));
    s.grad_linf.push_back(lp_norm(du, kInf));
    s.mass.push_back(integral(u));
    s.sup_lap.push_back(lap.values.maxCoeff());
    s.max_hess.push_back(
        std::max(radial.values.maxCoeff(), tangential.values.maxCoeff()));
    s.dissipation.push_back(traj.dissipation[i]);
  }
  return s;
}

LimitEstimate i_infty_estimate(const NormSeries& s, Real decade_tol) {
  if (s.rows() < 2) throw std::invalid_argument("i_infty_estimate: empty series");
  LimitEstimate e;
  const Real t_end = s.t.back();
  e.value = s.mass.back();
  e.residual = std::abs(s.mass.front() - s.dissipation.back() - s.mass.back());
  const Index mid = nearest_log_index(s.t, t_end / 10.0);
  if (mid >= 0 && s.t[mid] < t_end) {
    const Real floor = 1e-12 + 1e-6 * std::abs(s.mass.front());
    e.last_decade_change = std::abs(s.mass.back() - s.mass[mid]) /
                           std::max(std::abs(s.mass.back()), floor);
    e.converged = e.last_decade_change <= decade_tol;
  }
  return e;
}

LimitEstimate m_infty_estimate(const NormSeries& s, Real plateau_tol) {
  if (s.rows() < 2) throw std::invalid_argument("m_infty_estimate: empty series");
  LimitEstimate e;
  const Real t_end = s.t.back();
  e.value = s.linf.back();
  const Index mid = nearest_log_index(s.t, t_end / 10.0);
  if (mid >= 0 && s.t[mid] < t_end && e.value > 0.0) {
    e.last_decade_change = (s.linf[mid] - s.linf.back()) / e.value;
    e.converged = std::abs(e.last_decade_change) <= plateau_tol;
  }
  return e;
}

namespace {

// Weighted norm of (u - ref) and (grad u - grad ref) on the snapshot grid.
struct Comparison {
  // reference value and signed radial derivative at (r, t)
  std::function<Real(Real r, Real t)> value;
  std::function<Real(Real r, Real t)> slope;
};

ErrorSeries weighted_error(const Trajectory& traj, Real p, Real weight_value,
                           Real weight_grad, const Comparison& cmp,
                           Real time_offset) {
  ErrorSeries out;
  for (const Field& u : traj.snapshots) {
    const Real t = u.time + time_offset;
    if (!(t > 0.0)) continue;
    VecX ref(u.size()), dref(u.size());
    for (Index j = 0; j < u.size(); ++j) {
      const Real r = u.grid.node(j);
      ref[j] = cmp.value(r, t);
      dref[j] = cmp.slope(r, t);
    }
    const Field diff(u.grid, u.values - ref, u.time);
    const Field ddiff(u.grid, gradient_field(u).values - dref, u.time);
    out.t.push_back(t);
    out.value.push_back(std::pow(t, weight_value) * lp_norm(diff, p));
    out.gradient.push_back(std::pow(t, weight_grad) * lp_norm(ddiff, p));
  }
  return out;
}

}  // namespace

ErrorSeries rescaled_heat_error(const Trajectory& traj, Real p, Real i_inf,
                                Real time_offset) {
  const int n = traj.snapshots.front().grid.dimension;
  const Real w = 0.5 * n * (1.0 - (std::isinf(p) ? 0.0 : 1.0 / p));
  Comparison cmp{
      [i_inf, n](Real r, Real t) { return i_inf * heat_kernel(r, t, n); },
      [i_inf, n](Real r, Real t) {
        return -i_inf * r / (2.0 * t) * heat_kernel(r, t, n);
      }};
  return weighted_error(traj, p, w, w + 0.5, cmp, time_offset);
}

ErrorSeries rescaled_vss_error(const Trajectory& traj, Real p,
                               const ProfileTable& profile, Real time_offset) {
  const int n = traj.snapshots.front().grid.dimension;
  const Real w = 0.5 * n * (1.0 - (std::isinf(p) ? 0.0 : 1.0 / p)) +
                 0.5 * (profile.decay_a - n);
  Comparison cmp{
      [&profile](Real r, Real t) { return vss_eval(r, t, profile); },
      [&profile](Real r, Real t) { return vss_eval_gradient(r, t, profile); }};
  return weighted_error(traj, p, w, w + 0.5, cmp, time_offset);
}

ErrorSeries z_error(const Trajectory& traj, Real m_inf, Real q,
                    Real time_offset) {
  Comparison cmp{
      [m_inf, q](Real r, Real t) { return z_profile(r, t, m_inf, q); },
      [m_inf, q](Real r, Real t) {
        return z_profile_gradient_mag(r, t, m_inf, q);
      }};
  return weighted_error(traj, kInf, 0.0, 0.0, cmp, time_offset);
}

ErrorSeries gradient_z_error(const Trajectory& traj, Real m_inf, Real p,
                             Real q, Real time_offset) {
  if (traj.snapshots.front().grid.dimension != 1)
    throw std::invalid_argument("gradient_z_error: N must be 1");
  if (std::isinf(p))
    throw std::invalid_argument("gradient_z_error: p must be finite");
  const Real w = (1.0 - 1.0 / p) / q;
  Comparison cmp{
      [m_inf, q](Real r, Real t) { return z_profile(r, t, m_inf, q); },
      [m_inf, q](Real r, Real t) {
        return z_profile_gradient_mag(r, t, m_inf, q);
      }};
  // gradient slot carries the weighted distance; the value slot keeps the
  // unweighted profile distance for reference
  return weighted_error(traj, p, 0.0, w, cmp, time_offset);
}

DecadeTrend decade_trend(const std::vector<Real>& t,
                         const std::vector<Real>& v) {
  DecadeTrend out;
  if (t.size() != v.size() || t.size() < 3) return out;
  const Real t_end = t.back();
  const Index mid = nearest_log_index(t, t_end / 10.0);
  if (mid < 0 || !(t[mid] < t_end)) return out;
  if (!(v[mid] > 0.0) || !std::isfinite(v.back())) return out;
  out.ratio = v.back() / v[mid];
  out.max_uptick = 0.0;
  for (size_t i = static_cast<size_t>(mid); i + 1 < v.size(); ++i) {
    if (v[i] > 0.0)
      out.max_uptick = std::max(out.max_uptick, v[i + 1] / v[i] - 1.0);
  }
  out.valid = true;
  return out;
}

const MonitorResult* MonitorReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

// Running-sup stability of c(t) <= C over the monitored window: the
// empirical constant must be finite and must not grow by more than x2 over
// the last decade of the run.
MonitorResult sup_stability(const std::string& name,
                            const std::vector<Real>& t,
                            const std::vector<Real>& c, Real t_start,
                            const std::string& detail = "") {
  MonitorResult r;
  r.name = name;
  r.detail = detail;
  const Real t_end = t.back();
  Real sup_mid = -kInf, sup_end = -kInf;
  Index used = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || t[i] < t_start) continue;
    ++used;
    sup_end = std::max(sup_end, c[i]);
    if (t[i] <= t_end / 10.0 * (1.0 + 1e-9)) sup_mid = std::max(sup_mid, c[i]);
  }
  if (used < 3 || !(sup_mid > -kInf)) {
    r.pass = false;
    r.detail = "window too short";
    return r;
  }
  r.c_hat = sup_end;
  if (sup_end <= 0.0) {  // bound satisfied with room to spare
    r.decade_ratio = 1.0;
    r.pass = true;
    return r;
  }
  if (sup_mid <= 0.0) {
    r.decade_ratio = kInf;
    r.pass = false;
    r.detail = "constant emerged in the last decade";
    return r;
  }
  r.decade_ratio = sup_end / sup_mid;
  r.pass = std::isfinite(sup_end) && r.decade_ratio <= 2.0;
  return r;
}

// Lower-bound monitor: c(t) >= C > 0; running inf over the last two decades
// must stay positive and within a factor 2.
MonitorResult inf_stability(const std::string& name,
                            const std::vector<Real>& t,
                            const std::vector<Real>& c,
                            const std::string& detail = "") {
  MonitorResult r;
  r.name = name;
  r.detail = detail;
  const Real t_end = t.back();
  Real inf_prev = kInf, inf_last = kInf;
  for (size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0)) continue;
    if (t[i] > t_end / 100.0 && t[i] <= t_end / 10.0 * (1.0 + 1e-9))
      inf_prev = std::min(inf_prev, c[i]);
    else if (t[i] > t_end / 10.0)
      inf_last = std::min(inf_last, c[i]);
  }
  if (!(inf_prev < kInf) || !(inf_last < kInf)) {
    r.pass = false;
    r.detail = "window too short";
    return r;
  }
  r.c_hat = inf_last;
  r.decade_ratio = inf_last / inf_prev;
  r.pass = inf_last > 0.0 && inf_prev > 0.0 && r.decade_ratio >= 0.5 &&
           r.decade_ratio <= 2.0;
  return r;
}

// One-sided comparison with the initial value plus O(h) slack.
MonitorResult unilateral(const std::string& name, Real worst, Real reference,
                         Real slack) {
  MonitorResult r;
  r.name = name;
  r.c_hat = worst - reference;
  r.decade_ratio = 1.0;
  r.pass = worst <= reference + slack;
  std::ostringstream os;
  os << "max excess " << r.c_hat << " vs slack " << slack;
  r.detail = os.str();
  return r;
}

}  // namespace

MonitorReport estimate_monitors(const ProblemSpec& spec,
                                const Trajectory& traj,
                                const NormSeries& s) {
  MonitorReport rep;
  const Field& u0 = traj.snapshots.front();
  const Real q = spec.q;
  const int n = spec.dimension;
  const Real h = u0.grid.spacing;
  const Real linf0 = lp_norm(u0, kInf);
  const Real grad0 = lp_norm(gradient_field(u0), kInf);
  const bool nonneg = (u0.values >= 0.0).all();
  const bool nonpos = (u0.values <= 0.0).all();

  const Real t_end = s.t.back();
  Real t_first = kInf;
  for (Real ti : s.t)
    if (ti > 0.0) t_first = std::min(t_first, ti);
  if (!(t_end >= 100.0 * t_first))
    throw std::invalid_argument("estimate_monitors: window too short (< 2 decades)");

  auto push = [&rep](MonitorResult r) { rep.checks.push_back(std::move(r)); };

  const Index rows = s.rows();
  std::vector<Real> c(rows);

  // ||grad u|| <= C ||u0||_inf^{1/q} t^{-1/q}
  if (linf0 > 0.0) {
    for (Index i = 0; i < rows; ++i)
      c[i] = std::pow(s.t[i], 1.0 / q) * s.grad_linf[i] /
             std::pow(linf0, 1.0 / q);
    push(sup_stability("grad_decay", s.t, c, 0.0));
  }

  if (q <= 2.0) {
    // sup Lap u <= C ||grad u0||^{2-q} / t
    if (grad0 > 0.0) {
      for (Index i = 0; i < rows; ++i)
        c[i] = s.t[i] * s.sup_lap[i] / std::pow(grad0, 2.0 - q);
      push(sup_stability("suplap_vs_grad0", s.t, c, 0.0));
    }
    // sup Lap u <= C ||u0||_inf^{(2-q)/q} / t^{2/q}
    if (linf0 > 0.0) {
      for (Index i = 0; i < rows; ++i)
        c[i] = std::pow(s.t[i], 2.0 / q) * s.sup_lap[i] /
               std::pow(linf0, (2.0 - q) / q);
      push(sup_stability("suplap_vs_amp", s.t, c, 0.0));
    }
    // same weights on the largest Hessian eigenvalue
    if (grad0 > 0.0) {
      for (Index i = 0; i < rows; ++i)
        c[i] = q * (q - 1.0) * s.t[i] * s.max_hess[i] /
               std::pow(grad0, 2.0 - q);
      push(sup_stability("hess_vs_grad0", s.t, c, 0.0));
    }
    if (linf0 > 0.0) {
      for (Index i = 0; i < rows; ++i)
        c[i] = std::pow(s.t[i], 2.0 / q) * s.max_hess[i] /
               std::pow(linf0, (2.0 - q) / q);
      push(sup_stability("hess_vs_amp", s.t, c, 0.0));
    }
  }

  // one-sided quantities never exceed their initial values.
  {
    Real worst_lap = -kInf, worst_hess = -kInf;
    for (Index i = 1; i < rows; ++i) {
      worst_lap = std::max(worst_lap, s.sup_lap[i]);
      worst_hess = std::max(worst_hess, s.max_hess[i]);
    }
    const auto [rad0, tan0] = hessian_radial_eigenvalues(u0);
    const Real hess_norm0 = std::max(rad0.values.abs().maxCoeff(),
                                     tan0.values.abs().maxCoeff());
    const Real slack_lap = h * (1.0 + std::abs(s.sup_lap[0]));
    const Real slack_hess = h * (1.0 + hess_norm0);
    push(unilateral("suplap_monotone", worst_lap, s.sup_lap[0], slack_lap));
    push(unilateral("hess_monotone", worst_hess, hess_norm0, slack_hess));
  }

  // Subcritical nonnegative runs: self-similar envelope, barrier, weighted
  // gradient norms, all for t > tau(u0).
  if (nonneg && q > 1.0 && q < critical_exponent(n)) {
    const Real a = decay_exponent_a(q);
    const TailRadius rr = barrier_radius(u0, q);
    const Real tau = barrier_time(u0, q, n);
    for (Index i = 0; i < rows; ++i)
      c[i] = std::pow(s.t[i], 0.5 * (a - n)) * s.l1[i] +
             std::pow(s.t[i], 0.5 * a) * s.linf[i] +
             std::pow(s.t[i], 0.5 * (a + 1.0)) * s.grad_linf[i];
    push(sup_stability("ss_envelope", s.t, c, tau));

    for (Index i = 0; i < rows; ++i)
      c[i] = std::pow(s.t[i], 0.5 * (a + 1.0 - n)) * s.grad_l1[i];
    push(sup_stability("weighted_grad_l1", s.t, c, tau));
    for (Index i = 0; i < rows; ++i)
      c[i] = std::pow(s.t[i], 0.5 * (a + 1.0)) * s.grad_linf[i];
    push(sup_stability("weighted_grad_linf", s.t, c, tau));

    if (rr.satisfied_within_grid) {
      Real worst = -kInf;
      for (const Field& u : traj.snapshots) {
        for (Index j = 0; j < u.size(); ++j) {
          const Real r = u.grid.node(j) - rr.radius;
          if (r <= h) continue;
          worst = std::max(worst, u.values[j] - gamma_barrier(r, q));
        }
      }
      push(unilateral("barrier", worst, 0.0, h * (1.0 + grad0)));
    }
  }

  // Nonpositive runs: lambda-family envelope at lambda = 1 and, when the
  // sup norm has a positive plateau, the L^1 growth lower bound.
  if (nonpos && q < 2.0) {
    for (Index i = 0; i < rows; ++i)
      c[i] = s.linf[i] + std::pow(s.t[i], 1.0 / q) * s.grad_linf[i];
    push(sup_stability("hj_envelope", s.t, c, 0.0));

    const LimitEstimate m = m_infty_estimate(s);
    if (m.converged && m.value > 0.0) {
      for (Index i = 0; i < rows; ++i)
        c[i] = s.l1[i] * std::pow(s.t[i], -static_cast<Real>(n) / q);
      push(inf_stability("l1_growth", s.t, c));
    }
  }

  rep.all_pass = true;
  for (const auto& r : rep.checks) rep.all_pass = rep.all_pass && r.pass;
  return rep;
}

Real tail_mass(const Field& f, Real radius) {
  if (!(radius < f.grid.radius()))
    throw std::invalid_argument("tail_mass: radius beyond the grid");
  return tail_integral(f, radius);
}

RescaledField rescale_field(const Field& f, RescaleMode mode, Real factor,
                            Real exponent) {
  if (!(factor >= 1.0))
    throw std::invalid_argument("rescale_field: factor must be >= 1");
  RescaledField out;
  VecX v(f.size());
  const Real amp =
      mode == RescaleMode::parabolic ? std::pow(factor, exponent) : 1.0;
  for (Index j = 0; j < f.size(); ++j)
    v[j] = amp * interp_linear(f, factor * f.grid.node(j));
  const Real tscale = mode == RescaleMode::parabolic
                          ? factor * factor
                          : std::pow(factor, exponent);
  out.field = Field(f.grid, std::move(v), f.time / tscale);
  out.window_truncated = factor > 1.0;
  return out;
}

PowerFit decay_rate_fit(const std::vector<Real>& t, const std::vector<Real>& v,
                        Real t_lo, Real t_hi) {
  if (!(t_hi >= 10.0 * t_lo * (1.0 - 1e-9)))
    throw std::invalid_argument("decay_rate_fit: window must span a decade");
  std::vector<Real> x, y;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo * (1.0 - 1e-12) || t[i] > t_hi * (1.0 + 1e-12)) continue;
    if (!(v[i] > 0.0))
      throw std::invalid_argument("decay_rate_fit: nonpositive value in window");
    x.push_back(std::log(t[i]));
    y.push_back(std::log(v[i]));
  }
  const size_t m = x.size();
  if (m < 3) throw std::invalid_argument("decay_rate_fit: too few points");
  Real xm = 0, ym = 0;
  for (size_t i = 0; i < m; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= static_cast<Real>(m);
  ym /= static_cast<Real>(m);
  Real sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  PowerFit fit;
  fit.slope = sxy / sxx;
  fit.points = static_cast<Index>(m);
  Real ss = 0;
  for (size_t i = 0; i < m; ++i) {
    const Real r = y[i] - ym - fit.slope * (x[i] - xm);
    ss += r * r;
  }
  fit.halfwidth = m > 2 ? std::sqrt(ss / static_cast<Real>(m - 2) / sxx) : 0.0;
  return fit;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::DIFFUSION: return "DIFFUSION";
    case Verdict::VSS_BALANCE: return "VSS_BALANCE";
    case Verdict::HJ_DOMINATED: return "HJ_DOMINATED";
    default: return "UNDECIDED";
  }
}

RegimeReport regime_classify(const ProblemSpec& spec, const Trajectory& traj,
                             const ClassifyOptions& opt) {
  RegimeReport rep;
  const NormSeries s = build_norm_series(traj);
  const Field& u0 = traj.snapshots.front();
  const bool nonneg = (u0.values >= 0.0).all();
  const bool nonpos = (u0.values <= 0.0).all();
  const Real qc = critical_exponent(spec.dimension);
  std::ostringstream ev;

  rep.i_infty = i_infty_estimate(s, opt.i_decade_tol);
  {
    const ErrorSeries heat = rescaled_heat_error(traj, kInf, rep.i_infty.value);
    rep.heat_trend = decade_trend(heat.t, heat.value);
    rep.heat_grad_trend = decade_trend(heat.t, heat.gradient);
  }

  ProfileTable local_vss;
  const ProfileTable* vss = opt.vss;
  if (nonneg && spec.q < qc && vss == nullptr) {
    try {
      local_vss = find_vss(spec.q, spec.dimension);
      vss = &local_vss;
    } catch (const std::exception& e) {
      ev << "vss profile unavailable: " << e.what() << "; ";
    }
  }
  if (nonneg && spec.q < qc && vss != nullptr) {
    const ErrorSeries w = rescaled_vss_error(traj, 1.0, *vss);
    rep.vss_trend = decade_trend(w.t, w.value);
  }

  if (nonpos) {
    rep.m_infty = m_infty_estimate(s, opt.m_plateau_tol);
    if (rep.m_infty.converged && rep.m_infty.value > 0.0 && spec.q < 2.0) {
      const ErrorSeries z = z_error(traj, rep.m_infty.value, spec.q);
      rep.z_trend = decade_trend(z.t, z.value);
    }
  }

  // Decision table. Only trajectory evidence is consulted.
  const Real mass_floor = 1e-9 + 1e-6 * std::abs(s.mass.front());
  const bool i_sign_ok =
      nonneg ? rep.i_infty.value > mass_floor
             : (nonpos ? rep.i_infty.value < -mass_floor
                       : std::abs(rep.i_infty.value) > mass_floor);
  if (rep.i_infty.converged && i_sign_ok &&
      rep.heat_trend.certified(opt.trend_gate)) {
    rep.verdict = Verdict::DIFFUSION;
    ev << "I converged to " << rep.i_infty.value << ", heat ratio "
       << rep.heat_trend.ratio;
  } else if (nonneg && spec.q < qc && rep.vss_trend.certified(opt.trend_gate)) {
    rep.verdict = Verdict::VSS_BALANCE;
    ev << "subcritical nonnegative, vss ratio " << rep.vss_trend.ratio;
  } else if (nonpos && rep.m_infty.converged && rep.m_infty.value > 0.0 &&
             rep.z_trend.certified(opt.trend_gate)) {
    rep.verdict = Verdict::HJ_DOMINATED;
    ev << "plateau " << rep.m_infty.value << ", z ratio "
       << rep.z_trend.ratio;
  } else {
    rep.verdict = Verdict::UNDECIDED;
    ev << "no decision: I(conv=" << rep.i_infty.converged << ", "
       << rep.i_infty.value << "), heat ratio " << rep.heat_trend.ratio
       << ", m(conv=" << rep.m_infty.converged << ", " << rep.m_infty.value
       << ")";
  }
  rep.evidence = ev.str();

  const Real t_end = s.t.back();
  try {
    rep.linf_fit = decay_rate_fit(s.t, s.linf, t_end / 10.0, t_end);
  } catch (const std::exception&) {
  }
  try {
    rep.l1_fit = decay_rate_fit(s.t, s.l1, t_end / 10.0, t_end);
  } catch (const std::exception&) {
  }

  try {
    rep.smallness = smallness_functional(u0, spec.q, spec.dimension);
  } catch (const std::exception&) {
  }
  try {
    const LargenessValue lv = largeness_functional(u0, spec.q);
    rep.largeness = lv.value;
    rep.largeness_degenerate = lv.degenerate;
  } catch (const std::exception&) {
  }

  if (opt.run_monitors) {
    try {
      rep.monitors = estimate_monitors(spec, traj, s);
    } catch (const std::exception& e) {
      rep.monitors.all_pass = false;
      MonitorResult r;
      r.name = "monitors";
      r.pass = false;
      r.detail = e.what();
      rep.monitors.checks.push_back(r);
    }
  }

  rep.boundary_warned = traj.boundary_warned;
  rep.boundary_violated = traj.boundary_violated;
  rep.valid_until =
      traj.boundary_violated ? traj.first_violation_time : spec.horizon;
  return rep;
}

namespace {

void parallel_for(int threads, int n, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const int workers = std::min(threads, n);
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ThresholdScanResult threshold_scan(const ThresholdScanConfig& cfg) {
  auto run_amplitude = [&cfg](Real amplitude) -> ScanPoint {
    ScanPoint pt;
    pt.amplitude = amplitude;
    ProblemSpec spec;
    spec.q = cfg.q;
    spec.dimension = cfg.dimension;
    spec.horizon = cfg.horizon;
    const Index m = static_cast<Index>(std::lround(cfg.grid_radius / cfg.spacing));
    spec.grid = RadialGrid(cfg.dimension, m, cfg.spacing);
    spec.datum =
        bump_datum(-amplitude, cfg.support_radius, SignClass::nonpositive);
    const Field u0 = sample_datum(spec.datum, spec.grid);
    // the smallness functional only exists from the critical exponent up
    if (cfg.q >= critical_exponent(cfg.dimension))
      pt.smallness = smallness_functional(u0, cfg.q, cfg.dimension);
    pt.largeness = largeness_functional(u0, cfg.q).value;
    ClassifyOptions copt = cfg.classify;
    copt.run_monitors = false;
    const Trajectory traj =
        solve(spec, cfg.scheme, geometric_times(0.1, std::pow(10.0, 0.125),
                                                cfg.horizon));
    pt.verdict = regime_classify(spec, traj, copt).verdict;
    return pt;
  };

  ThresholdScanResult out;
  std::vector<Real> ladder;
  for (int i = 0; i < cfg.ladder_size; ++i) {
    const Real f = static_cast<Real>(i) / static_cast<Real>(cfg.ladder_size - 1);
    ladder.push_back(cfg.amplitude_min *
                     std::pow(cfg.amplitude_max / cfg.amplitude_min, f));
  }
  out.points.resize(ladder.size());
  parallel_for(cfg.threads, static_cast<int>(ladder.size()),
               [&](int i) { out.points[i] = run_amplitude(ladder[i]); });

  // Bracket between the largest diffusion amplitude and the smallest
  // escape amplitude above it.
  Real lo = -1.0, hi = -1.0;
  for (const ScanPoint& p : out.points) {
    if (p.verdict == Verdict::DIFFUSION) lo = std::max(lo, p.amplitude);
  }
  for (const ScanPoint& p : out.points) {
    if (p.verdict == Verdict::HJ_DOMINATED && p.amplitude > lo && lo > 0.0)
      hi = hi < 0.0 ? p.amplitude : std::min(hi, p.amplitude);
  }
  if (lo < 0.0 || hi < 0.0) {
    out.found = false;
    return out;
  }

  for (int it = 0; it < cfg.bisect_iters; ++it) {
    const Real mid = std::sqrt(lo * hi);
    ScanPoint p = run_amplitude(mid);
    out.points.push_back(p);
    if (p.verdict == Verdict::DIFFUSION)
      lo = mid;
    else if (p.verdict == Verdict::HJ_DOMINATED)
      hi = mid;
    else
      break;  // undecided probe: stop refining, report the current bracket
  }

  out.found = true;
  out.amplitude_lo = lo;
  out.amplitude_hi = hi;
  for (const ScanPoint& p : out.points) {
    if (p.amplitude == lo) {
      out.smallness_lo = p.smallness;
      out.largeness_lo = p.largeness;
    }
    if (p.amplitude == hi) {
      out.smallness_hi = p.smallness;
      out.largeness_hi = p.largeness;
    }
  }
  return out;
}

}  // namespace vhj
