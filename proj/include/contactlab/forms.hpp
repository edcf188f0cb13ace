#pragma once

#include <span>
#include <string>
#include <vector>

#include "contactlab/chart.hpp"
#include "contactlab/smooth_fn.hpp"

namespace contactlab {

// Lexicographically ordered k-element subsets of {0..n-1}; cached.
const std::vector<std::vector<int>>& index_subsets(int n, int k);
int subset_rank(int n, int k, std::span<const int> subset);
long binom(int n, int k);

// Exterior form of fixed degree with one coefficient function per sorted
// multi-index.  Forms whose degree exceeds the chart dimension are kept as
// explicit zero objects so wedge chains can overflow gracefully.
class DifferentialForm {
 public:
  DifferentialForm(ChartPtr chart, int degree, std::vector<SmoothFn> coeffs);
  static DifferentialForm zero(ChartPtr chart, int degree);

  const ChartPtr& chart() const { return chart_; }
  int degree() const { return degree_; }
  bool is_zero_overflow() const { return overflow_; }
  int coefficient_count() const { return static_cast<int>(coeffs_.size()); }
  const SmoothFn& coefficient(int idx) const { return coeffs_[static_cast<size_t>(idx)]; }
  const std::vector<int>& index_set(int idx) const;

  double coefficient_value(int idx, std::span<const double> x) const;

  // Pointwise evaluation on `degree` tangent vectors.
  double eval(std::span<const double> x,
              const std::vector<std::vector<double>>& vectors) const;
  double operator()(const Point& p, const std::vector<std::vector<double>>& vectors) const;

 private:
  ChartPtr chart_;
  int degree_;
  std::vector<SmoothFn> coeffs_;
  bool overflow_ = false;
};

struct ScalarField {
  ChartPtr chart;
  SmoothFn fn;
  double operator()(const Point& p) const { return fn.f0(p.x); }
};

struct VectorField {
  ChartPtr chart;
  SmoothMap components;  // out_dim == chart->dim()

  std::vector<double> operator()(const Point& p) const { return components.m0(p.x); }
};

template <class F>
VectorField make_vector_field(ChartPtr chart, F f) {
  int n = chart->dim();
  return VectorField{std::move(chart), make_smooth_map(n, std::move(f))};
}

template <class F>
ScalarField make_scalar_field(ChartPtr chart, F f) {
  return ScalarField{std::move(chart), make_smooth(std::move(f))};
}

// Smooth map between charts with pushforward data available through the
// dual channels.
struct ChartMap {
  ChartPtr source;
  ChartPtr target;
  SmoothMap map;

  Point apply(const Point& p) const;
  std::vector<double> push_vector(std::span<const double> x, std::span<const double> v,
                                  const DiffBackend& be) const;
};

// Parametrized immersion of a k-dimensional parameter chart; tangent columns
// come from the map's dual channels.
struct ParamImmersion {
  ChartPtr domain;
  ChartPtr target;
  SmoothMap map;

  std::vector<double> position(std::span<const double> s) const { return map.m0(s); }
  std::vector<double> tangent(std::span<const double> s, int j,
                              const DiffBackend& be) const {
    return map_jacobian_col(map, s, j, be);
  }
};

}  // namespace contactlab
