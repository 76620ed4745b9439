#include <vhj/vss.hpp>

#include <vhj/closed_forms.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace vhj {

namespace {

constexpr Real kOverflow = 1e12;
constexpr Index kTableNodes = 4001;  // uniform eta resolution of the table

struct State {
  Real f;
  Real fp;
};

State rhs(Real eta, const State& y, Real q, int n) {
  return {y.fp, vss_profile_rhs(eta, y.f, y.fp, q, n)};
}

// Dormand-Prince 5(4) step; returns the embedded error estimate.
State dopri_step(Real eta, const State& y, Real h, Real q, int n,
                 Real& err_out) {
  const State k1 = rhs(eta, y, q, n);
  const State k2 = rhs(eta + h / 5.0,
                       {y.f + h * (k1.f / 5.0), y.fp + h * (k1.fp / 5.0)}, q, n);
  const State k3 =
      rhs(eta + 3.0 * h / 10.0,
          {y.f + h * (3.0 / 40.0 * k1.f + 9.0 / 40.0 * k2.f),
           y.fp + h * (3.0 / 40.0 * k1.fp + 9.0 / 40.0 * k2.fp)},
          q, n);
  const State k4 =
      rhs(eta + 4.0 * h / 5.0,
          {y.f + h * (44.0 / 45.0 * k1.f - 56.0 / 15.0 * k2.f + 32.0 / 9.0 * k3.f),
           y.fp + h * (44.0 / 45.0 * k1.fp - 56.0 / 15.0 * k2.fp +
                       32.0 / 9.0 * k3.fp)},
          q, n);
  const State k5 = rhs(
      eta + 8.0 * h / 9.0,
      {y.f + h * (19372.0 / 6561.0 * k1.f - 25360.0 / 2187.0 * k2.f +
                  64448.0 / 6561.0 * k3.f - 212.0 / 729.0 * k4.f),
       y.fp + h * (19372.0 / 6561.0 * k1.fp - 25360.0 / 2187.0 * k2.fp +
                   64448.0 / 6561.0 * k3.fp - 212.0 / 729.0 * k4.fp)},
      q, n);
  const State k6 = rhs(
      eta + h,
      {y.f + h * (9017.0 / 3168.0 * k1.f - 355.0 / 33.0 * k2.f +
                  46732.0 / 5247.0 * k3.f + 49.0 / 176.0 * k4.f -
                  5103.0 / 18656.0 * k5.f),
       y.fp + h * (9017.0 / 3168.0 * k1.fp - 355.0 / 33.0 * k2.fp +
                   46732.0 / 5247.0 * k3.fp + 49.0 / 176.0 * k4.fp -
                   5103.0 / 18656.0 * k5.fp)},
      q, n);
  const State y5{
      y.f + h * (35.0 / 384.0 * k1.f + 500.0 / 1113.0 * k3.f +
                 125.0 / 192.0 * k4.f - 2187.0 / 6784.0 * k5.f +
                 11.0 / 84.0 * k6.f),
      y.fp + h * (35.0 / 384.0 * k1.fp + 500.0 / 1113.0 * k3.fp +
                  125.0 / 192.0 * k4.fp - 2187.0 / 6784.0 * k5.fp +
                  11.0 / 84.0 * k6.fp)};
  const State k7 = rhs(eta + h, y5, q, n);
  const Real e_f =
      h * (71.0 / 57600.0 * k1.f - 71.0 / 16695.0 * k3.f +
           71.0 / 1920.0 * k4.f - 17253.0 / 339200.0 * k5.f +
           22.0 / 525.0 * k6.f - 1.0 / 40.0 * k7.f);
  const Real e_fp =
      h * (71.0 / 57600.0 * k1.fp - 71.0 / 16695.0 * k3.fp +
           71.0 / 1920.0 * k4.fp - 17253.0 / 339200.0 * k5.fp +
           22.0 / 525.0 * k6.fp - 1.0 / 40.0 * k7.fp);
  err_out = std::max(std::abs(e_f), std::abs(e_fp));
  return y5;
}

// Integrate from eta_from to eta_to with adaptive steps. Returns false if a
// stop event fired (sign change or overflow) before reaching eta_to.
struct StopEvent {
  bool stopped = false;
  bool overflow = false;
  Real crossing_eta = -1.0;
};

bool integrate_to(Real& eta, State& y, Real eta_to, Real q, int n,
                  StopEvent& ev) {
  const Real rtol = 1e-10, atol = 1e-14;
  Real h = std::min(1e-3, eta_to - eta);
  while (eta < eta_to * (1.0 - 1e-15)) {
    h = std::min(h, eta_to - eta);
    Real err = 0.0;
    const State trial = dopri_step(eta, y, h, q, n, err);
    const Real scale =
        atol + rtol * std::max({std::abs(y.f), std::abs(y.fp),
                                std::abs(trial.f), std::abs(trial.fp)});
    if (err <= scale) {
      const Real eta_new = eta + h;
      if (trial.f <= 0.0) {
        // Linear estimate of the crossing inside the step.
        const Real frac = y.f / std::max(y.f - trial.f, 1e-300);
        ev.stopped = true;
        ev.crossing_eta = eta + frac * h;
        eta = eta_new;
        y = trial;
        return false;
      }
      if (std::abs(trial.f) > kOverflow || std::abs(trial.fp) > kOverflow) {
        ev.stopped = true;
        ev.overflow = true;
        eta = eta_new;
        y = trial;
        return false;
      }
      eta = eta_new;
      y = trial;
    }
    const Real factor =
        0.9 * std::pow(scale / std::max(err, 1e-300), 0.2);
    h *= std::clamp(factor, 0.2, 5.0);
    if (!(h > 1e-14)) throw std::runtime_error("shoot_profile: step underflow");
  }
  return true;
}

// Tail classification on g(eta) = eta^a f(eta) over the last two dyadic
// windows; the absolute gate is relative to the overall sup of g.
DecayClass classify_tail(const ProfileTable& p) {
  const Index nv = p.valid_nodes;
  if (nv < 16) return DecayClass::indeterminate;
  const VecX g = p.eta.head(nv).pow(p.decay_a) * p.f.head(nv);
  const Real g_sup = g.maxCoeff();
  if (!(g_sup > 0.0)) return DecayClass::fast;
  const Real eta_end = p.eta[nv - 1];
  Real g1 = 0.0, g2 = 0.0;
  for (Index j = 0; j < nv; ++j) {
    if (p.eta[j] >= 0.25 * eta_end && p.eta[j] < 0.5 * eta_end)
      g1 = std::max(g1, g[j]);
    else if (p.eta[j] >= 0.5 * eta_end)
      g2 = std::max(g2, g[j]);
  }
  if (g2 < 1e-3 * g_sup) return DecayClass::fast;
  if (g1 <= 0.0) return DecayClass::indeterminate;
  const Real ratio = g2 / g1;
  if (ratio < 0.5) return DecayClass::fast;
  if (ratio > 0.9) return DecayClass::slow;
  return DecayClass::indeterminate;
}

void fill_norms(ProfileTable& p) {
  const Index nv = p.valid_nodes;
  const Real omega = sphere_measure(p.dimension);
  const Real de = p.eta[1] - p.eta[0];
  Real m1 = 0.0, m2 = 0.0;
  for (Index j = 0; j + 1 < nv; ++j) {
    const Real w0 = std::pow(p.eta[j], p.dimension - 1);
    const Real w1 = std::pow(p.eta[j + 1], p.dimension - 1);
    m1 += 0.5 * de * (w0 * p.f[j] + w1 * p.f[j + 1]);
    m2 += 0.5 * de * (w0 * p.f[j] * p.f[j] + w1 * p.f[j + 1] * p.f[j + 1]);
  }
  p.l1_at_unit_time = omega * m1;
  p.l2_at_unit_time = std::sqrt(omega * m2);
}

}  // namespace

Real vss_profile_rhs(Real eta, Real f, Real fp, Real q, int dimension) {
  const Real a = decay_exponent_a(q);
  if (eta <= 0.0) return -0.5 * a * f / static_cast<Real>(dimension);
  return std::pow(std::abs(fp), q) - 0.5 * a * f -
         (static_cast<Real>(dimension - 1) / eta + 0.5 * eta) * fp;
}

ProfileTable shoot_profile(Real alpha, Real q, int dimension, Real eta_max) {
  if (!(alpha > 0.0)) throw std::invalid_argument("shoot_profile: alpha must be positive");
  const Real qc = critical_exponent(dimension);
  if (!(q > 1.0 && q < qc))
    throw std::invalid_argument("shoot_profile: q must lie in (1, q_c)");
  ProfileTable p;
  p.q = q;
  p.dimension = dimension;
  p.decay_a = decay_exponent_a(q);
  p.alpha_star = alpha;
  p.eta = VecX::LinSpaced(kTableNodes, 0.0, eta_max);
  p.f = VecX::Zero(kTableNodes);
  p.f_prime = VecX::Zero(kTableNodes);

  // Series start just off the origin: f = alpha + f''(0) eta^2/2.
  const Real fpp0 = -0.5 * p.decay_a * alpha / static_cast<Real>(dimension);
  Real eta = 1e-8;
  State y{alpha + 0.5 * fpp0 * eta * eta, fpp0 * eta};
  p.f[0] = alpha;
  p.f_prime[0] = 0.0;
  p.valid_nodes = 1;

  StopEvent ev;
  for (Index j = 1; j < kTableNodes; ++j) {
    if (!integrate_to(eta, y, p.eta[j], q, dimension, ev)) {
      p.crossing_eta = ev.crossing_eta;
      p.decay_class = ev.overflow ? DecayClass::slow : DecayClass::sign_change;
      fill_norms(p);
      return p;
    }
    p.f[j] = y.f;
    p.f_prime[j] = y.fp;
    p.valid_nodes = j + 1;
  }
  p.decay_class = classify_tail(p);
  fill_norms(p);
  return p;
}

ProfileTable find_vss(Real q, int dimension, Real tol, Real eta_max) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_vss: tol must be positive");
  auto is_crossing = [](const ProfileTable& p) {
    return p.decay_class == DecayClass::sign_change;
  };

  // Probe ladder: orientation of the two branches is detected, not assumed.
  std::vector<Real> ladder;
  for (Real alpha = 1.0 / 16.0; alpha <= 1024.0; alpha *= 2.0)
    ladder.push_back(alpha);
  Real lo = -1.0, hi = -1.0;
  bool lo_crossing = false;
  bool have_prev = false;
  Real prev_alpha = 0.0;
  bool prev_crossing = false;
  for (Real alpha : ladder) {
    const bool crossing = is_crossing(shoot_profile(alpha, q, dimension, eta_max));
    if (have_prev && crossing != prev_crossing) {
      lo = prev_alpha;
      hi = alpha;
      lo_crossing = prev_crossing;
      break;
    }
    have_prev = true;
    prev_alpha = alpha;
    prev_crossing = crossing;
  }
  if (lo < 0.0)
    throw std::runtime_error(
        "find_vss: no sign-change/positive bracket on the probe ladder");

  for (int it = 0; it < 400 && (hi - lo) > tol * hi; ++it) {
    const Real mid = 0.5 * (lo + hi);
    if (is_crossing(shoot_profile(mid, q, dimension, eta_max)) == lo_crossing)
      lo = mid;
    else
      hi = mid;
  }

  // Return the positive branch endpoint; refine eta_max once if the tail
  // classification stays ambiguous.
  const Real alpha_pos = lo_crossing ? hi : lo;
  ProfileTable best = shoot_profile(alpha_pos, q, dimension, eta_max);
  if (best.decay_class == DecayClass::indeterminate)
    best = shoot_profile(alpha_pos, q, dimension, 2.0 * eta_max);
  return best;
}

namespace {

// Cubic Hermite on the uniform table.
Real hermite_eval(const ProfileTable& p, Real eta, bool derivative) {
  const Index nv = p.valid_nodes;
  if (nv < 2) return 0.0;
  const Real de = p.eta[1] - p.eta[0];
  const Real eta_end = p.eta[nv - 1];
  if (eta >= eta_end) return 0.0;
  const Index j = std::min<Index>(static_cast<Index>(eta / de), nv - 2);
  const Real s = eta / de - static_cast<Real>(j);
  const Real f0 = p.f[j], f1 = p.f[j + 1];
  const Real d0 = p.f_prime[j] * de, d1 = p.f_prime[j + 1] * de;
  if (!derivative) {
    const Real h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const Real h10 = s * (1.0 - s) * (1.0 - s);
    const Real h01 = s * s * (3.0 - 2.0 * s);
    const Real h11 = s * s * (s - 1.0);
    return h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1;
  }
  const Real g00 = 6.0 * s * (s - 1.0);
  const Real g10 = 3.0 * s * s - 4.0 * s + 1.0;
  const Real g01 = -6.0 * s * (s - 1.0);
  const Real g11 = 3.0 * s * s - 2.0 * s;
  return (g00 * f0 + g10 * d0 + g01 * f1 + g11 * d1) / de;
}

}  // namespace

Real vss_eval(Real r, Real t, const ProfileTable& p) {
  if (!(t > 0.0)) throw std::invalid_argument("vss_eval: t must be positive");
  const Real eta = std::abs(r) / std::sqrt(t);
  return std::pow(t, -0.5 * p.decay_a) * hermite_eval(p, eta, false);
}

Real vss_eval_gradient(Real r, Real t, const ProfileTable& p) {
  if (!(t > 0.0)) throw std::invalid_argument("vss_eval_gradient: t must be positive");
  const Real eta = std::abs(r) / std::sqrt(t);
  return std::pow(t, -0.5 * (p.decay_a + 1.0)) * hermite_eval(p, eta, true);
}

}  // namespace vhj
