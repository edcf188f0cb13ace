#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace contactlab {

struct CoordSpec {
  std::string name;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool periodic = false;

  static CoordSpec linear(std::string name, double lo, double hi) {
    return {std::move(name), lo, hi, false};
  }
  static CoordSpec angle(std::string name, double period) {
    return {std::move(name), 0.0, period, true};
  }
  double period() const { return hi - lo; }
};

// Raised whenever a point leaves a chart's domain or lands in an excluded
// region; carries enough context to locate the offending evaluation.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& chart, const std::string& reason,
                  std::span<const double> x)
      : std::runtime_error(format(chart, reason, x)) {}

 private:
  static std::string format(const std::string& chart, const std::string& reason,
                            std::span<const double> x);
};

struct ExcludedRegion {
  std::string name;
  std::function<bool(std::span<const double>)> contains;
};

class ChartManifold {
 public:
  ChartManifold(std::string name, std::vector<CoordSpec> coords,
                std::vector<ExcludedRegion> excluded = {});

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  const CoordSpec& coord(int i) const { return coords_[static_cast<size_t>(i)]; }
  int coord_index(const std::string& coord_name) const;

  // Wrap periodic coordinates into [lo, lo+period).
  void normalize(std::span<double> x) const;
  bool in_bounds(std::span<const double> x) const;
  const ExcludedRegion* excluded_hit(std::span<const double> x) const;
  void validate(std::span<const double> x) const;  // throws EvaluationError

  // Signed difference to - from, minimal across the period for periodic
  // coordinates.
  double coord_delta(int i, double from, double to) const;

 private:
  std::string name_;
  std::vector<CoordSpec> coords_;
  std::vector<ExcludedRegion> excluded_;
};

using ChartPtr = std::shared_ptr<const ChartManifold>;

struct Point {
  ChartPtr chart;
  std::vector<double> x;
};

// Normalizes and validates; the only sanctioned way to build a Point.
Point make_point(ChartPtr chart, std::vector<double> x);

// Distance respecting periodic wrapping, used for monodromy displacement.
double chart_distance(const ChartManifold& chart, std::span<const double> a,
                      std::span<const double> b);

}  // namespace contactlab
