#include "contactlab/sampling.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace contactlab {

namespace {
constexpr int kBases[7] = {2, 3, 5, 7, 11, 13, 17};

double radical_inverse(int base, uint64_t i) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % static_cast<uint64_t>(base));
    i /= static_cast<uint64_t>(base);
    f *= inv;
  }
  return r;
}

std::vector<double> box_map(const SampleBox& box, const std::vector<double>& unit) {
  std::vector<double> x(unit.size());
  for (size_t i = 0; i < unit.size(); ++i)
    x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit[i];
  return x;
}

int grid_side(int dim, size_t count) {
  int side = std::max(1, static_cast<int>(std::round(std::pow(static_cast<double>(count),
                                                              1.0 / dim))));
  while (std::pow(side, dim) < static_cast<double>(count)) ++side;
  return side;
}
}  // namespace

std::vector<double> halton_point(int dim, uint64_t index) {
  assert(dim >= 1 && dim <= 7);
  std::vector<double> p(static_cast<size_t>(dim));
  for (int d = 0; d < dim; ++d)
    p[static_cast<size_t>(d)] = radical_inverse(kBases[d], index + 1);  // skip 0
  return p;
}

std::vector<std::vector<double>> draw_box_samples(const SampleSpec& spec) {
  int dim = spec.box.dim();
  if (dim < 1) throw std::invalid_argument("sample box has no coordinates");
  std::vector<std::vector<double>> out;
  out.reserve(spec.count);

  auto accept = [&](const std::vector<double>& x) {
    return !spec.predicate || spec.predicate(x);
  };

  if (spec.strategy == SampleStrategy::grid) {
    int side = grid_side(dim, spec.count);
    std::vector<int> idx(static_cast<size_t>(dim), 0);
    while (true) {
      std::vector<double> u(static_cast<size_t>(dim));
      for (int d = 0; d < dim; ++d)
        u[static_cast<size_t>(d)] =
            (idx[static_cast<size_t>(d)] + 0.5) / static_cast<double>(side);
      std::vector<double> x = box_map(spec.box, u);
      if (accept(x)) out.push_back(std::move(x));
      int d = 0;
      while (d < dim && ++idx[static_cast<size_t>(d)] == side) {
        idx[static_cast<size_t>(d)] = 0;
        ++d;
      }
      if (d == dim) break;
    }
    return out;
  }

  uint64_t budget = static_cast<uint64_t>(spec.count) * 64 + 1024;
  if (spec.strategy == SampleStrategy::halton) {
    for (uint64_t i = spec.seed; out.size() < spec.count && i < spec.seed + budget; ++i) {
      std::vector<double> x = box_map(spec.box, halton_point(dim, i));
      if (accept(x)) out.push_back(std::move(x));
    }
  } else {
    SeededUniform rng(spec.seed);
    for (uint64_t i = 0; out.size() < spec.count && i < budget; ++i) {
      std::vector<double> x = box_map(spec.box, rng.next_point(dim));
      if (accept(x)) out.push_back(std::move(x));
    }
  }
  if (out.size() < spec.count)
    throw std::runtime_error("draw_box_samples: predicate rejected too many points");
  return out;
}

SampleBox chart_bounds_box(const ChartManifold& chart, double margin) {
  SampleBox box;
  for (int i = 0; i < chart.dim(); ++i) {
    const CoordSpec& c = chart.coord(i);
    double lo = c.lo, hi = c.hi;
    if (!c.periodic) {
      if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("chart_bounds_box: coordinate '" + c.name +
                                    "' is unbounded");
      lo += margin;
      hi -= margin;
    }
    box.lo.push_back(lo);
    box.hi.push_back(hi);
  }
  return box;
}

std::vector<Point> draw_samples(const ChartPtr& chart, const SampleSpec& spec) {
  if (spec.box.dim() != chart->dim())
    throw std::invalid_argument("sample box dimension does not match chart");
  SampleSpec inner = spec;
  auto user_pred = spec.predicate;
  inner.predicate = [chart, user_pred](std::span<const double> x) {
    if (user_pred && !user_pred(x)) return false;
    if (!chart->in_bounds(x)) return false;
    return chart->excluded_hit(x) == nullptr;
  };
  std::vector<std::vector<double>> raw = draw_box_samples(inner);
  std::vector<Point> pts;
  pts.reserve(raw.size());
  for (auto& x : raw) pts.push_back(make_point(chart, std::move(x)));
  return pts;
}

}  // namespace contactlab
