#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "contactlab/chart.hpp"

namespace contactlab {

// Low-discrepancy Halton point in [0,1)^dim, bases 2,3,5,7,11,13,17.
std::vector<double> halton_point(int dim, uint64_t index);

// Deterministic uniform doubles in [0,1) from a seeded mt19937_64.  The
// engine sequence is pinned by the standard; the bit-to-double mapping is
// fixed here rather than delegated to distribution objects, which are not.
class SeededUniform {
 public:
  explicit SeededUniform(uint64_t seed) : eng_(seed) {}
  double next() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  std::vector<double> next_point(int dim) {
    std::vector<double> p(static_cast<size_t>(dim));
    for (auto& v : p) v = next();
    return p;
  }

 private:
  std::mt19937_64 eng_;
};

struct SampleBox {
  std::vector<double> lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
};

enum class SampleStrategy { halton, uniform, grid };

struct SampleSpec {
  SampleStrategy strategy = SampleStrategy::halton;
  size_t count = 256;
  uint64_t seed = 0;
  SampleBox box;
  std::function<bool(std::span<const double>)> predicate;  // optional keep-filter
};

// Deterministic sample points inside `box`, skipping chart-excluded points
// and predicate rejects (skipped points are replaced by continuing the
// sequence so the count is met when feasible).
std::vector<Point> draw_samples(const ChartPtr& chart, const SampleSpec& spec);

// Raw box samples with no chart attached (parameter domains).
std::vector<std::vector<double>> draw_box_samples(const SampleSpec& spec);

// Box spanning the chart's coordinate ranges, shrunk inward by `margin` on
// linear coordinates.  Throws when a linear coordinate is unbounded.
SampleBox chart_bounds_box(const ChartManifold& chart, double margin = 0.0);

}  // namespace contactlab
