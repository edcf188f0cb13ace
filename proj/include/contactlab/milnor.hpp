#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "contactlab/chart.hpp"
#include "contactlab/smooth_fn.hpp"

namespace contactlab {

// Complex scalar over any dual-capable number type.  std::complex is only
// specified for the builtin floating point types, so we carry our own.
template <class T>
struct Cx {
  T re{0.0};
  T im{0.0};

  Cx() = default;
  Cx(T r) : re(std::move(r)) {}
  Cx(T r, T i) : re(std::move(r)), im(std::move(i)) {}
};

template <class T>
Cx<T> operator+(const Cx<T>& a, const Cx<T>& b) {
  return {a.re + b.re, a.im + b.im};
}

template <class T>
Cx<T> operator-(const Cx<T>& a, const Cx<T>& b) {
  return {a.re - b.re, a.im - b.im};
}

template <class T>
Cx<T> operator*(const Cx<T>& a, const Cx<T>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

template <class T>
Cx<T> conj(const Cx<T>& a) {
  return {a.re, -a.im};
}

template <class T>
T abs2(const Cx<T>& a) {
  return a.re * a.re + a.im * a.im;
}

template <class T>
using CxTriple = std::array<Cx<T>, 3>;

template <class T>
CxTriple<T> cx_pack(std::span<const T> x) {
  return {Cx<T>(x[0], x[1]), Cx<T>(x[2], x[3]), Cx<T>(x[4], x[5])};
}

// The mirror (z1, z2, z3) -> (z1, conj z2, z3).  An involutive isometry.
template <class T>
CxTriple<T> milnor_mirror(const CxTriple<T>& z) {
  return {z[0], conj(z[1]), z[2]};
}

// Three-variable polynomial with one anti-holomorphic slot.
template <class T>
Cx<T> milnor_g(const CxTriple<T>& w) {
  return w[0] * conj(w[1]) + w[0] * w[2] + conj(w[1]) * w[2];
}

// Two-variable germ the polynomial restricts to on the plane w3 = 0.
template <class T>
Cx<T> milnor_f2(const Cx<T>& z1, const Cx<T>& z2) {
  return z1 * conj(z2);
}

ChartPtr chart_c3(double bound = 10.0);

// Evaluators as plain real maps: g and the composition g(mirror(.)) take the
// six chart coordinates to (re, im); mirror acts on the coordinates.
SmoothMap milnor_g_map();
SmoothMap milnor_mirror_map();
SmoothMap milnor_ge_map();
SmoothMap milnor_f2_map();

struct MilnorData {
  SmoothMap f2;      // germ on the plane, R^4 -> R^2
  SmoothMap g;       // R^6 -> R^2
  SmoothMap mirror;  // R^6 -> R^6
  SmoothMap ge;      // composition, R^6 -> R^2
  double eps_m = 1.0;       // sphere radius
  double delta_m = 0.05;    // tube radius
  double link_margin = 1e-3;  // |g| floor for off-link sampling, times eps^2
};

MilnorData make_milnor_data(double eps_m = 1.0, double delta_m = 0.05);

struct MilnorReport {
  bool pass = false;
  int sample_count = 0;
  int excluded_near_link = 0;
  int tube_point_count = 0;
  double max_dbar = 0.0;  // composition residual, should vanish
  double dbar_g_control = 0.0;  // residual of g itself, must stay far from zero
  std::array<double, 2> hessian_det = {0.0, 0.0};
  bool hessian_nondegenerate = false;
  double min_phase_rank = 0.0;   // tangential gradient norm of the angle map
  double min_tube_angle = 0.0;   // sin of tube-vs-sphere normal angle
  double restriction_residual = 0.0;  // exact zero expected
};

// Sphere-sampled verification of the open book data.  Thresholds are fixed
// inside; the report carries the measured extremes.
MilnorReport milnor_checks(const MilnorData& md, int samples = 1000,
                           uint64_t seed = 2026);

// Complex Hessian of the composition at the origin, row major.
std::array<std::array<std::array<double, 2>, 3>, 3> milnor_hessian_origin();

}  // namespace contactlab
