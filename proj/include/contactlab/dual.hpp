#pragma once

#include <cmath>
#include <type_traits>

namespace contactlab {

// Forward-mode dual number. Nest as Dual<Dual<double>> to carry second
// derivatives through the same code path.
template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(const T& value) : v(value), d() {}
  constexpr Dual(const T& value, const T& deriv) : v(value), d(deriv) {}

  template <class U,
            class = std::enable_if_t<std::is_arithmetic_v<U> && !std::is_same_v<U, T>>>
  constexpr Dual(U value) : v(static_cast<T>(value)), d() {}

  Dual& operator+=(const Dual& o) {
    v = v + o.v;
    d = d + o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v = v - o.v;
    d = d - o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v = v * o.v;
    return *this;
  }
};

using D1 = Dual<double>;
using D2 = Dual<Dual<double>>;

inline double scalar_value(double x) { return x; }
template <class T>
double scalar_value(const Dual<T>& x) {
  return scalar_value(x.v);
}

inline double scalar_deriv(double) { return 0.0; }
template <class T>
double scalar_deriv(const Dual<T>& x) {
  return scalar_value(x.d);
}

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
Dual<T> operator+(const Dual<T>& a) {
  return a;
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

#define CONTACTLAB_DUAL_SCALAR_OPS(OP)                                     \
  template <class T, class U,                                             \
            class = std::enable_if_t<std::is_arithmetic_v<U>>>            \
  Dual<T> operator OP(const Dual<T>& a, U b) {                            \
    return a OP Dual<T>(b);                                               \
  }                                                                       \
  template <class T, class U,                                             \
            class = std::enable_if_t<std::is_arithmetic_v<U>>>            \
  Dual<T> operator OP(U a, const Dual<T>& b) {                            \
    return Dual<T>(a) OP b;                                               \
  }

CONTACTLAB_DUAL_SCALAR_OPS(+)
CONTACTLAB_DUAL_SCALAR_OPS(-)
CONTACTLAB_DUAL_SCALAR_OPS(*)
CONTACTLAB_DUAL_SCALAR_OPS(/)
#undef CONTACTLAB_DUAL_SCALAR_OPS

// Comparisons act on the value part only; used for branch selection and
// pivoting, never inside smooth formulas.
#define CONTACTLAB_DUAL_CMP(OP)                                            \
  template <class T>                                                      \
  bool operator OP(const Dual<T>& a, const Dual<T>& b) {                  \
    return scalar_value(a) OP scalar_value(b);                            \
  }                                                                       \
  template <class T, class U,                                             \
            class = std::enable_if_t<std::is_arithmetic_v<U>>>            \
  bool operator OP(const Dual<T>& a, U b) {                               \
    return scalar_value(a) OP static_cast<double>(b);                     \
  }                                                                       \
  template <class T, class U,                                             \
            class = std::enable_if_t<std::is_arithmetic_v<U>>>            \
  bool operator OP(U a, const Dual<T>& b) {                               \
    return static_cast<double>(a) OP scalar_value(b);                     \
  }

CONTACTLAB_DUAL_CMP(<)
CONTACTLAB_DUAL_CMP(>)
CONTACTLAB_DUAL_CMP(<=)
CONTACTLAB_DUAL_CMP(>=)
#undef CONTACTLAB_DUAL_CMP

// Math overloads. The double versions forward to std:: so that generic code
// written against contactlab:: names works for the scalar backend too.
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tan(double x) { return std::tan(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double atan2(double y, double x) { return std::atan2(y, x); }
inline double abs(double x) { return std::fabs(x); }
inline double hypot(double x, double y) { return std::hypot(x, y); }

template <class T>
Dual<T> sin(const Dual<T>& a) {
  return {sin(a.v), a.d * cos(a.v)};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  return {cos(a.v), -a.d * sin(a.v)};
}
template <class T>
Dual<T> tan(const Dual<T>& a) {
  T c = cos(a.v);
  return {tan(a.v), a.d / (c * c)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, a.d * e};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  T t = tanh(a.v);
  return {t, a.d * (1.0 - t * t)};
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  T den = x.v * x.v + y.v * y.v;
  return {atan2(y.v, x.v), (y.d * x.v - y.v * x.d) / den};
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
  return scalar_value(a.v) >= 0.0 ? a : -a;
}
template <class T>
Dual<T> hypot(const Dual<T>& x, const Dual<T>& y) {
  return sqrt(x * x + y * y);
}

template <class T>
T pow_int(const T& x, int n) {
  if (n < 0) return T(1.0) / pow_int(x, -n);
  T r(1.0);
  T base = x;
  while (n > 0) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

template <class T>
T sq(const T& x) {
  return x * x;
}

// cos(sqrt(s)) as a smooth function of s >= 0; series branch keeps it
// analytic through s = 0.
template <class T>
T cos_sqrt(const T& s) {
  if (scalar_value(s) > 1e-2) return cos(sqrt(s));
  // sum_{k} (-1)^k s^k / (2k)!  truncation below 1e-25 for s <= 1e-2
  T term(1.0), acc(1.0);
  double fac = 1.0;
  for (int k = 1; k <= 8; ++k) {
    fac *= (2.0 * k - 1.0) * (2.0 * k);
    term = term * s;
    acc += ((k % 2 == 0) ? 1.0 : -1.0) / fac * term;
  }
  return acc;
}

// sin(sqrt(s)) / sqrt(s), same treatment.
template <class T>
T sinc_sqrt(const T& s) {
  if (scalar_value(s) > 1e-2) {
    T r = sqrt(s);
    return sin(r) / r;
  }
  T term(1.0), acc(1.0);
  double fac = 1.0;
  for (int k = 1; k <= 8; ++k) {
    fac *= (2.0 * k) * (2.0 * k + 1.0);
    term = term * s;
    acc += ((k % 2 == 0) ? 1.0 : -1.0) / fac * term;
  }
  return acc;
}

}  // namespace contactlab
