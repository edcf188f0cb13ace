#pragma once

#include <cassert>
#include <functional>
#include <span>
#include <type_traits>
#include <vector>

#include "contactlab/dual.hpp"

namespace contactlab {

struct DiffBackend {
  enum class Mode { dual, central };
  Mode mode = Mode::dual;
  double step = 1e-5;

  static DiffBackend duals() { return {Mode::dual, 1e-5}; }
  static DiffBackend central(double h = 1e-5) { return {Mode::central, h}; }
  bool prefers_dual() const { return mode == Mode::dual; }
};

// Scalar coefficient function with up to three evaluation channels.  f1/f2
// may be empty (black-box input); the eval helpers below fall back to
// central differences in that case, and always when the backend says so.
struct SmoothFn {
  std::function<double(std::span<const double>)> f0;
  std::function<D1(std::span<const D1>)> f1;
  std::function<D2(std::span<const D2>)> f2;

  bool valid() const { return static_cast<bool>(f0); }
  double operator()(std::span<const double> x) const { return f0(x); }
};

// Vector-valued counterpart (chart maps, immersions, vector fields).
struct SmoothMap {
  int out_dim = 0;
  std::function<std::vector<double>(std::span<const double>)> m0;
  std::function<std::vector<D1>(std::span<const D1>)> m1;
  std::function<std::vector<D2>(std::span<const D2>)> m2;

  bool valid() const { return static_cast<bool>(m0); }
};

template <class F>
SmoothFn make_smooth(F f) {
  SmoothFn s;
  s.f0 = [f](std::span<const double> x) -> double { return f(x); };
  if constexpr (std::is_invocable_v<const F&, std::span<const D1>>)
    s.f1 = [f](std::span<const D1> x) -> D1 { return f(x); };
  if constexpr (std::is_invocable_v<const F&, std::span<const D2>>)
    s.f2 = [f](std::span<const D2> x) -> D2 { return f(x); };
  return s;
}

inline SmoothFn constant_fn(double c) {
  SmoothFn s;
  s.f0 = [c](std::span<const double>) { return c; };
  s.f1 = [c](std::span<const D1>) { return D1(c); };
  s.f2 = [c](std::span<const D2>) { return D2(c); };
  return s;
}

template <class F>
SmoothMap make_smooth_map(int out_dim, F f) {
  SmoothMap m;
  m.out_dim = out_dim;
  m.m0 = [f](std::span<const double> x) -> std::vector<double> { return f(x); };
  if constexpr (std::is_invocable_v<const F&, std::span<const D1>>)
    m.m1 = [f](std::span<const D1> x) -> std::vector<D1> { return f(x); };
  if constexpr (std::is_invocable_v<const F&, std::span<const D2>>)
    m.m2 = [f](std::span<const D2> x) -> std::vector<D2> { return f(x); };
  return m;
}

namespace detail {

inline double fd_h(const DiffBackend& be, double xscale, double dirscale) {
  return be.step * (1.0 + xscale) / (dirscale > 1.0 ? dirscale : 1.0);
}

template <class T>
double max_abs_value(std::span<const T> xs) {
  double m = 0.0;
  for (const auto& x : xs) m = std::max(m, std::fabs(scalar_value(x)));
  return m;
}

}  // namespace detail

inline double fn_value(const SmoothFn& f, std::span<const double> x) { return f.f0(x); }

// Evaluate with first-order dual propagation.  Uses the dual channel when
// present and the backend allows; otherwise one central difference along the
// seeded direction.
inline D1 fn_d1(const SmoothFn& f, std::span<const D1> x, const DiffBackend& be) {
  if (f.f1 && be.prefers_dual()) return f.f1(x);
  int n = static_cast<int>(x.size());
  std::vector<double> base(static_cast<size_t>(n)), dir(static_cast<size_t>(n));
  double xscale = 0.0, dirscale = 0.0;
  for (int i = 0; i < n; ++i) {
    base[static_cast<size_t>(i)] = x[static_cast<size_t>(i)].v;
    dir[static_cast<size_t>(i)] = x[static_cast<size_t>(i)].d;
    xscale = std::max(xscale, std::fabs(base[static_cast<size_t>(i)]));
    dirscale = std::max(dirscale, std::fabs(dir[static_cast<size_t>(i)]));
  }
  double v = f.f0(base);
  if (dirscale == 0.0) return {v, 0.0};
  double h = detail::fd_h(be, xscale, dirscale);
  std::vector<double> xp(base), xm(base);
  for (int i = 0; i < n; ++i) {
    xp[static_cast<size_t>(i)] += h * dir[static_cast<size_t>(i)];
    xm[static_cast<size_t>(i)] -= h * dir[static_cast<size_t>(i)];
  }
  return {v, (f.f0(xp) - f.f0(xm)) / (2.0 * h)};
}

// Second-order analogue; falls back to a central difference of fn_d1.
inline D2 fn_d2(const SmoothFn& f, std::span<const D2> x, const DiffBackend& be) {
  if (f.f2 && be.prefers_dual()) return f.f2(x);
  int n = static_cast<int>(x.size());
  std::vector<D1> base(static_cast<size_t>(n));
  std::vector<D1> dir(static_cast<size_t>(n));
  double xscale = 0.0, dirscale = 0.0;
  for (int i = 0; i < n; ++i) {
    base[static_cast<size_t>(i)] = x[static_cast<size_t>(i)].v;
    dir[static_cast<size_t>(i)] = x[static_cast<size_t>(i)].d;
    xscale = std::max(xscale, std::fabs(scalar_value(base[static_cast<size_t>(i)])));
    dirscale = std::max(dirscale, std::fabs(scalar_value(dir[static_cast<size_t>(i)])));
  }
  D1 v = fn_d1(f, base, be);
  bool zero_dir = true;
  for (int i = 0; i < n; ++i)
    if (scalar_value(dir[static_cast<size_t>(i)]) != 0.0 ||
        scalar_deriv(dir[static_cast<size_t>(i)]) != 0.0)
      zero_dir = false;
  if (zero_dir) return {v, D1(0.0)};
  double h = detail::fd_h(be, xscale, dirscale > 0.0 ? dirscale : 1.0);
  std::vector<D1> xp(base), xm(base);
  for (int i = 0; i < n; ++i) {
    xp[static_cast<size_t>(i)] += h * dir[static_cast<size_t>(i)];
    xm[static_cast<size_t>(i)] -= h * dir[static_cast<size_t>(i)];
  }
  D1 slope = (fn_d1(f, xp, be) - fn_d1(f, xm, be)) / (2.0 * h);
  return {v, slope};
}

inline double fn_partial(const SmoothFn& f, std::span<const double> x, int j,
                         const DiffBackend& be) {
  int n = static_cast<int>(x.size());
  if (f.f1 && be.prefers_dual()) {
    std::vector<D1> xd(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      xd[static_cast<size_t>(i)] = {x[static_cast<size_t>(i)], i == j ? 1.0 : 0.0};
    return f.f1(xd).d;
  }
  double h = be.step * (1.0 + std::fabs(x[static_cast<size_t>(j)]));
  std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  xp[static_cast<size_t>(j)] += h;
  xm[static_cast<size_t>(j)] -= h;
  return (f.f0(xp) - f.f0(xm)) / (2.0 * h);
}

// d(partial_j f) carried at a first-order dual point; exact when the f2
// channel exists, otherwise a central difference of fn_d1 along e_j.
inline D1 fn_partial_d1(const SmoothFn& f, std::span<const D1> x, int j,
                        const DiffBackend& be) {
  int n = static_cast<int>(x.size());
  if (f.f2 && be.prefers_dual()) {
    std::vector<D2> xd(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      xd[static_cast<size_t>(i)] = {x[static_cast<size_t>(i)],
                                    D1(i == j ? 1.0 : 0.0)};
    return f.f2(xd).d;
  }
  double h = be.step * (1.0 + std::fabs(scalar_value(x[static_cast<size_t>(j)])));
  std::vector<D1> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  xp[static_cast<size_t>(j)] += h;
  xm[static_cast<size_t>(j)] -= h;
  return (fn_d1(f, xp, be) - fn_d1(f, xm, be)) / (2.0 * h);
}

// Same one level up; there is no third channel, so this is always a central
// difference of fn_d2.
inline D2 fn_partial_d2(const SmoothFn& f, std::span<const D2> x, int j,
                        const DiffBackend& be) {
  double h = be.step * (1.0 + std::fabs(scalar_value(x[static_cast<size_t>(j)])));
  std::vector<D2> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  xp[static_cast<size_t>(j)] += h;
  xm[static_cast<size_t>(j)] -= h;
  return (fn_d2(f, xp, be) - fn_d2(f, xm, be)) / (2.0 * h);
}

inline double fn_directional(const SmoothFn& f, std::span<const double> x,
                             std::span<const double> u, const DiffBackend& be) {
  int n = static_cast<int>(x.size());
  std::vector<D1> xd(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    xd[static_cast<size_t>(i)] = {x[static_cast<size_t>(i)], u[static_cast<size_t>(i)]};
  return fn_d1(f, xd, be).d;
}

inline std::vector<double> map_value(const SmoothMap& m, std::span<const double> x) {
  return m.m0(x);
}

inline std::vector<D1> map_d1(const SmoothMap& m, std::span<const D1> x,
                              const DiffBackend& be) {
  if (m.m1 && be.prefers_dual()) return m.m1(x);
  int n = static_cast<int>(x.size());
  std::vector<double> base(static_cast<size_t>(n)), dir(static_cast<size_t>(n));
  double xscale = 0.0, dirscale = 0.0;
  for (int i = 0; i < n; ++i) {
    base[static_cast<size_t>(i)] = x[static_cast<size_t>(i)].v;
    dir[static_cast<size_t>(i)] = x[static_cast<size_t>(i)].d;
    xscale = std::max(xscale, std::fabs(base[static_cast<size_t>(i)]));
    dirscale = std::max(dirscale, std::fabs(dir[static_cast<size_t>(i)]));
  }
  std::vector<double> v = m.m0(base);
  std::vector<D1> out(v.size());
  if (dirscale == 0.0) {
    for (size_t i = 0; i < v.size(); ++i) out[i] = {v[i], 0.0};
    return out;
  }
  double h = detail::fd_h(be, xscale, dirscale);
  std::vector<double> xp(base), xm(base);
  for (int i = 0; i < n; ++i) {
    xp[static_cast<size_t>(i)] += h * dir[static_cast<size_t>(i)];
    xm[static_cast<size_t>(i)] -= h * dir[static_cast<size_t>(i)];
  }
  std::vector<double> vp = m.m0(xp), vm = m.m0(xm);
  for (size_t i = 0; i < v.size(); ++i) out[i] = {v[i], (vp[i] - vm[i]) / (2.0 * h)};
  return out;
}

inline std::vector<D2> map_d2(const SmoothMap& m, std::span<const D2> x,
                              const DiffBackend& be) {
  if (m.m2 && be.prefers_dual()) return m.m2(x);
  int n = static_cast<int>(x.size());
  std::vector<D1> base(static_cast<size_t>(n)), dir(static_cast<size_t>(n));
  double xscale = 0.0, dirscale = 0.0;
  for (int i = 0; i < n; ++i) {
    base[static_cast<size_t>(i)] = x[static_cast<size_t>(i)].v;
    dir[static_cast<size_t>(i)] = x[static_cast<size_t>(i)].d;
    xscale = std::max(xscale, std::fabs(scalar_value(base[static_cast<size_t>(i)])));
    dirscale = std::max(dirscale, std::fabs(scalar_value(dir[static_cast<size_t>(i)])));
  }
  std::vector<D1> v = map_d1(m, base, be);
  std::vector<D2> out(v.size());
  if (dirscale == 0.0) {
    for (size_t i = 0; i < v.size(); ++i) out[i] = {v[i], D1(0.0)};
    return out;
  }
  double h = detail::fd_h(be, xscale, dirscale);
  std::vector<D1> xp(base), xm(base);
  for (int i = 0; i < n; ++i) {
    xp[static_cast<size_t>(i)] += h * dir[static_cast<size_t>(i)];
    xm[static_cast<size_t>(i)] -= h * dir[static_cast<size_t>(i)];
  }
  std::vector<D1> vp = map_d1(m, xp, be), vm = map_d1(m, xm, be);
  for (size_t i = 0; i < v.size(); ++i)
    out[i] = {v[i], (vp[i] - vm[i]) / (2.0 * h)};
  return out;
}

inline std::vector<double> map_jacobian_col(const SmoothMap& m, std::span<const double> x,
                                            int j, const DiffBackend& be) {
  int n = static_cast<int>(x.size());
  std::vector<D1> xd(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    xd[static_cast<size_t>(i)] = {x[static_cast<size_t>(i)], i == j ? 1.0 : 0.0};
  std::vector<D1> r = map_d1(m, xd, be);
  std::vector<double> out(r.size());
  for (size_t i = 0; i < r.size(); ++i) out[i] = r[i].d;
  return out;
}

// Column j of the Jacobian carried at a D1 point (for pullback dual
// channels).  Exact when m2 exists.
inline std::vector<D1> map_jacobian_col_d1(const SmoothMap& m, std::span<const D1> x,
                                           int j, const DiffBackend& be) {
  int n = static_cast<int>(x.size());
  if (m.m2 && be.prefers_dual()) {
    std::vector<D2> xd(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      xd[static_cast<size_t>(i)] = {x[static_cast<size_t>(i)], D1(i == j ? 1.0 : 0.0)};
    std::vector<D2> r = m.m2(xd);
    std::vector<D1> out(r.size());
    for (size_t i = 0; i < r.size(); ++i) out[i] = r[i].d;
    return out;
  }
  double h = be.step * (1.0 + std::fabs(scalar_value(x[static_cast<size_t>(j)])));
  std::vector<D1> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  xp[static_cast<size_t>(j)] += h;
  xm[static_cast<size_t>(j)] -= h;
  std::vector<D1> rp = map_d1(m, xp, be), rm = map_d1(m, xm, be);
  std::vector<D1> out(rp.size());
  for (size_t i = 0; i < rp.size(); ++i) out[i] = (rp[i] - rm[i]) / (2.0 * h);
  return out;
}

}  // namespace contactlab
