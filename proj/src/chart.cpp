#include "contactlab/chart.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include "contactlab/linalg.hpp"

namespace contactlab {

std::string EvaluationError::format(const std::string& chart, const std::string& reason,
                                    std::span<const double> x) {
  std::ostringstream os;
  os << "evaluation outside domain: chart '" << chart << "', " << reason << ", point (";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

ChartManifold::ChartManifold(std::string name, std::vector<CoordSpec> coords,
                             std::vector<ExcludedRegion> excluded)
    : name_(std::move(name)), coords_(std::move(coords)), excluded_(std::move(excluded)) {
  assert(!coords_.empty() && coords_.size() <= static_cast<size_t>(kMaxDim) &&
         "chart dimension out of range");
  for (const auto& c : coords_) {
    assert(c.lo < c.hi && "coordinate bounds must be ordered");
    (void)c;
  }
}

int ChartManifold::coord_index(const std::string& coord_name) const {
  for (size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i].name == coord_name) return static_cast<int>(i);
  throw std::invalid_argument("chart '" + name_ + "' has no coordinate '" + coord_name +
                              "'");
}

void ChartManifold::normalize(std::span<double> x) const {
  assert(x.size() == coords_.size());
  for (size_t i = 0; i < coords_.size(); ++i) {
    const auto& c = coords_[i];
    if (!c.periodic) continue;
    double p = c.period();
    double t = std::fmod(x[i] - c.lo, p);
    if (t < 0.0) t += p;
    x[i] = c.lo + t;
  }
}

bool ChartManifold::in_bounds(std::span<const double> x) const {
  if (x.size() != coords_.size()) return false;
  for (size_t i = 0; i < coords_.size(); ++i) {
    const auto& c = coords_[i];
    if (c.periodic) continue;
    if (!(x[i] >= c.lo && x[i] <= c.hi)) return false;
  }
  return true;
}

const ExcludedRegion* ChartManifold::excluded_hit(std::span<const double> x) const {
  for (const auto& r : excluded_)
    if (r.contains(x)) return &r;
  return nullptr;
}

void ChartManifold::validate(std::span<const double> x) const {
  if (x.size() != coords_.size())
    throw EvaluationError(name_, "coordinate count mismatch", x);
  for (size_t i = 0; i < coords_.size(); ++i) {
    const auto& c = coords_[i];
    if (c.periodic) continue;
    if (!(x[i] >= c.lo && x[i] <= c.hi))
      throw EvaluationError(name_, "coordinate '" + c.name + "' out of bounds", x);
    if (!std::isfinite(x[i]))
      throw EvaluationError(name_, "coordinate '" + c.name + "' not finite", x);
  }
  if (const ExcludedRegion* r = excluded_hit(x))
    throw EvaluationError(name_, "inside excluded region '" + r->name + "'", x);
}

double ChartManifold::coord_delta(int i, double from, double to) const {
  const auto& c = coords_[static_cast<size_t>(i)];
  double d = to - from;
  if (!c.periodic) return d;
  double p = c.period();
  d = std::fmod(d, p);
  if (d > 0.5 * p) d -= p;
  if (d < -0.5 * p) d += p;
  return d;
}

Point make_point(ChartPtr chart, std::vector<double> x) {
  chart->normalize(x);
  chart->validate(x);
  return Point{std::move(chart), std::move(x)};
}

double chart_distance(const ChartManifold& chart, std::span<const double> a,
                      std::span<const double> b) {
  assert(a.size() == b.size() && static_cast<int>(a.size()) == chart.dim());
  double acc = 0.0;
  for (int i = 0; i < chart.dim(); ++i) {
    double d = chart.coord_delta(i, a[i], b[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double gram_independence(const std::vector<std::vector<double>>& columns) {
  int k = static_cast<int>(columns.size());
  if (k == 0) return 1.0;
  std::vector<double> G(static_cast<size_t>(k * k), 0.0);
  std::vector<double> norms(static_cast<size_t>(k), 0.0);
  for (int i = 0; i < k; ++i) {
    double n2 = 0.0;
    for (double v : columns[static_cast<size_t>(i)]) n2 += v * v;
    norms[static_cast<size_t>(i)] = std::sqrt(n2);
    if (norms[static_cast<size_t>(i)] == 0.0) return 0.0;
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double s = 0.0;
      for (size_t m = 0; m < columns[static_cast<size_t>(i)].size(); ++m)
        s += columns[static_cast<size_t>(i)][m] * columns[static_cast<size_t>(j)][m];
      G[static_cast<size_t>(i * k + j)] =
          s / (norms[static_cast<size_t>(i)] * norms[static_cast<size_t>(j)]);
    }
  double det = small_det(G, k);
  return det > 0.0 ? std::sqrt(det) : 0.0;
}

}  // namespace contactlab
