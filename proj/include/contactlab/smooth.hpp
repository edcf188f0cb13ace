#pragma once

#include "contactlab/dual.hpp"

namespace contactlab {

// exp(-1/s) for s > 0, identically 0 for s <= 0.  All derivatives vanish at
// the junction, so the branch is smooth.
template <class T>
T bump_exp(const T& s) {
  if (scalar_value(s) <= 0.0) return T(0.0);
  return exp(T(-1.0) / s);
}

// C-infinity step: 0 for u <= 0, 1 for u >= 1.  The transition is the
// rational-exponential sigmoid (1 + tanh(k (1/(1-u) - 1/u))) / 2.  With the
// default k the peak slope stays below 4, which the monodromy-prescription
// cutoff relies on.
inline constexpr double kStepSharpness = 0.3;

template <class T>
T smooth_step(const T& u, double k = kStepSharpness) {
  double uv = scalar_value(u);
  if (uv <= 0.0) return T(0.0);
  if (uv >= 1.0) return T(1.0);
  return (1.0 + tanh(k * (1.0 / (1.0 - u) - 1.0 / u))) * 0.5;
}

// Cubic smoothstep with exact branches; C^1 only, used where a polynomial
// reparametrization is wanted.
template <class T>
T smoothstep_cubic(const T& u) {
  double uv = scalar_value(u);
  if (uv <= 0.0) return T(0.0);
  if (uv >= 1.0) return T(1.0);
  return u * u * (3.0 - 2.0 * u);
}

// Cutoff in the angle variable: 1 on |t| <= pi/8, 0 on |t| >= pi/4.
// Peak slope measured at 3.7974, within the <= 4 budget.
template <class T>
T angle_cutoff(const T& t) {
  T at = abs(t);
  double pi = 3.14159265358979323846;
  T u = (pi / 4.0 - at) / (pi / 8.0);
  return smooth_step(u);
}

// Smoothed min(x, cap): exactly x for x <= 0.25 cap, exactly cap for
// x >= 1.25 cap, monotone blend between.
template <class T>
T smooth_min_cap(const T& x, double cap) {
  double xv = scalar_value(x);
  if (xv <= 0.25 * cap) return x;
  if (xv >= 1.25 * cap) return T(cap);
  T u = (x - 0.25 * cap) / cap;  // in (0, 1)
  T s = smooth_step(u);
  return x * (1.0 - s) + cap * s;
}

// Monotone reparametrization of [0,1] that is constant near both endpoints
// (flat on [0, beta] and [1-beta, 1]).  Built on smooth_step so every
// derivative vanishes at the plateau edges.
template <class T>
T flat_ends_reparam(const T& s, double beta = 0.1) {
  T u = (s - beta) / (1.0 - 2.0 * beta);
  return smooth_step(u);
}

// Derivative of flat_ends_reparam in closed form; identically 0 outside
// (beta, 1-beta).
template <class T>
T flat_ends_reparam_deriv(const T& s, double beta = 0.1) {
  double span = 1.0 - 2.0 * beta;
  T u = (s - beta) / span;
  double uv = scalar_value(u);
  if (uv <= 0.0 || uv >= 1.0) return T(0.0);
  T a = 1.0 / (1.0 - u) - 1.0 / u;
  T th = tanh(kStepSharpness * a);
  T da = 1.0 / sq(1.0 - u) + 1.0 / sq(u);
  return (1.0 - th * th) * (0.5 * kStepSharpness) * da / span;
}

}  // namespace contactlab
