#pragma once

#include <vhj/field.hpp>

namespace vhj {

/// Tail behavior of a shot profile trajectory, monitored through
/// g(eta) = eta^a f(eta): fast means g decays below tolerance (the very
/// singular profile), slow means g plateaus at a positive level,
/// sign_change means f crossed zero. indeterminate asks for a longer
/// eta range.
enum class DecayClass { fast, slow, sign_change, indeterminate };

/// Tabulated self-similar profile f(eta) with W(x,t) = t^{-a/2} f(|x| t^{-1/2}).
struct ProfileTable {
  Real q = 1.3;
  int dimension = 1;
  Real decay_a = 0.0;     // a = (2-q)/(q-1)
  Real alpha_star = 0.0;  // f(0) of this trajectory
  VecX eta;               // uniform nodes on [0, eta_max]
  VecX f;
  VecX f_prime;
  DecayClass decay_class = DecayClass::indeterminate;
  Real crossing_eta = -1.0;    // where f crossed zero (sign_change only)
  Index valid_nodes = 0;       // table entries filled before any stop event
  Real l1_at_unit_time = 0.0;  // ||W(1)||_1 = omega_N int f eta^{N-1}
  Real l2_at_unit_time = 0.0;
};

/// Profile equation right-hand side: substituting the self-similar form
/// into the PDE forces q(a+1) = a+2, i.e. a = (2-q)/(q-1), and leaves
///   f'' = |f'|^q - (a/2) f - ((N-1)/eta + eta/2) f'.
/// At eta = 0 the symmetric regularization gives f''(0) = -(a/2) f(0)/N.
Real vss_profile_rhs(Real eta, Real f, Real fp, Real q, int dimension);

/// Integrate one trajectory from f(0) = alpha, f'(0) = 0 with an adaptive
/// Dormand-Prince pair, stopping at eta_max, a sign change, or overflow.
ProfileTable shoot_profile(Real alpha, Real q, int dimension, Real eta_max);

/// Locate the very singular profile by a probe ladder over alpha followed
/// by bisection between the sign-change branch and the positive branch
/// (orientation detected, not assumed). Throws if no bracket exists on the
/// ladder. tol is the relative bracket width on alpha.
ProfileTable find_vss(Real q, int dimension, Real tol = 1e-11,
                      Real eta_max = 40.0);

/// W(r,t) = t^{-a/2} f(r t^{-1/2}) by cubic Hermite interpolation on the
/// table; 0 beyond eta_max.
Real vss_eval(Real r, Real t, const ProfileTable& p);

/// Signed radial derivative dW/dr = t^{-(a+1)/2} f'(r t^{-1/2}).
Real vss_eval_gradient(Real r, Real t, const ProfileTable& p);

}  // namespace vhj
