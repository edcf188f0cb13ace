#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "contactlab/dual.hpp"

namespace contactlab {

inline constexpr int kMaxDim = 7;

struct SingularSystemError : std::runtime_error {
  explicit SingularSystemError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense solve of A x = b (row-major, n x n) with partial pivoting.  Works on
// dual scalars; pivot comparisons use value parts so derivative information
// rides along unchanged.
template <class T>
std::vector<T> lu_solve(std::vector<T> A, std::vector<T> b, int n,
                        const char* what = "linear system") {
  double scale = 0.0;
  for (int i = 0; i < n * n; ++i) scale = std::max(scale, std::fabs(scalar_value(A[i])));
  if (scale == 0.0) throw SingularSystemError(std::string(what) + ": zero matrix");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(scalar_value(A[k * n + k]));
    for (int i = k + 1; i < n; ++i) {
      double m = std::fabs(scalar_value(A[i * n + k]));
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    if (best < 1e-12 * scale)
      throw SingularSystemError(std::string(what) + ": pivot " + std::to_string(k) +
                                " below threshold");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A[k * n + j], A[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      T f = A[i * n + k] / A[k * n + k];
      for (int j = k; j < n; ++j) A[i * n + j] = A[i * n + j] - f * A[k * n + j];
      b[i] = b[i] - f * b[k];
    }
  }
  std::vector<T> x(n, T(0.0));
  for (int i = n - 1; i >= 0; --i) {
    T acc = b[i];
    for (int j = i + 1; j < n; ++j) acc = acc - A[i * n + j] * x[j];
    x[i] = acc / A[i * n + i];
  }
  return x;
}

// Kernel vector of an n x n matrix of numerical rank n-1, via full-pivot
// elimination.  pivot_ratio (optional out) reports |last pivot| / |first
// pivot|; small means the rank deficiency is clean.  Throws if the matrix
// drops rank before step n-1.
template <class T>
std::vector<T> kernel_vector(std::vector<T> A, int n, double* pivot_ratio = nullptr,
                             const char* what = "kernel system") {
  std::vector<int> col_of(n);
  for (int i = 0; i < n; ++i) col_of[i] = i;
  double first_pivot = 0.0, last_pivot = 0.0;
  for (int k = 0; k < n - 1; ++k) {
    int pr = k, pc = k;
    double best = -1.0;
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        double m = std::fabs(scalar_value(A[i * n + j]));
        if (m > best) {
          best = m;
          pr = i;
          pc = j;
        }
      }
    if (k == 0) first_pivot = best;
    if (best < 1e-12 * std::max(first_pivot, 1e-300))
      throw SingularSystemError(std::string(what) + ": rank below n-1 at step " +
                                std::to_string(k));
    if (pr != k)
      for (int j = 0; j < n; ++j) std::swap(A[k * n + j], A[pr * n + j]);
    if (pc != k) {
      for (int i = 0; i < n; ++i) std::swap(A[i * n + k], A[i * n + pc]);
      std::swap(col_of[k], col_of[pc]);
    }
    for (int i = k + 1; i < n; ++i) {
      T f = A[i * n + k] / A[k * n + k];
      for (int j = k; j < n; ++j) A[i * n + j] = A[i * n + j] - f * A[k * n + j];
    }
  }
  last_pivot = std::fabs(scalar_value(A[(n - 1) * n + (n - 1)]));
  if (pivot_ratio) *pivot_ratio = first_pivot > 0.0 ? last_pivot / first_pivot : 0.0;
  // free variable corresponds to permuted column n-1
  std::vector<T> y(n, T(0.0));
  y[n - 1] = T(1.0);
  for (int i = n - 2; i >= 0; --i) {
    T acc = T(0.0) - A[i * n + (n - 1)];
    for (int j = i + 1; j < n - 1; ++j) acc = acc - A[i * n + j] * y[j];
    y[i] = acc / A[i * n + i];
  }
  std::vector<T> x(n, T(0.0));
  for (int i = 0; i < n; ++i) x[col_of[i]] = y[i];
  return x;
}

// Determinant of a k x k matrix (row-major) by cofactor recursion; k <= 7.
template <class T>
T small_det(const std::vector<T>& M, int k) {
  if (k == 1) return M[0];
  if (k == 2) return M[0] * M[3] - M[1] * M[2];
  if (k == 3)
    return M[0] * (M[4] * M[8] - M[5] * M[7]) - M[1] * (M[3] * M[8] - M[5] * M[6]) +
           M[2] * (M[3] * M[7] - M[4] * M[6]);
  T acc(0.0);
  std::vector<T> sub((k - 1) * (k - 1), T(0.0));
  for (int c = 0; c < k; ++c) {
    for (int i = 1; i < k; ++i) {
      int jj = 0;
      for (int j = 0; j < k; ++j) {
        if (j == c) continue;
        sub[(i - 1) * (k - 1) + jj] = M[i * k + j];
        ++jj;
      }
    }
    T term = M[c] * small_det(sub, k - 1);
    acc = (c % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

// sqrt(det(V^T V)) normalized by column norms; ~1 for an orthonormal-ish
// independent set, ~0 when columns are dependent.
double gram_independence(const std::vector<std::vector<double>>& columns);

}  // namespace contactlab
