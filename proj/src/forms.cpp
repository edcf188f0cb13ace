#include "contactlab/forms.hpp"

#include <cassert>
#include <map>
#include <stdexcept>

#include "contactlab/linalg.hpp"

namespace contactlab {

long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

const std::vector<std::vector<int>>& index_subsets(int n, int k) {
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  auto key = std::make_pair(n, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<std::vector<int>> out;
  if (k == 0) {
    out.push_back({});
  } else if (k <= n) {
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
      out.push_back(idx);
      int i = k - 1;
      while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
      if (i < 0) break;
      ++idx[static_cast<size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
  }
  auto [ins, ok] = cache.emplace(key, std::move(out));
  (void)ok;
  return ins->second;
}

int subset_rank(int n, int k, std::span<const int> subset) {
  const auto& all = index_subsets(n, k);
  for (size_t r = 0; r < all.size(); ++r) {
    if (static_cast<int>(all[r].size()) != static_cast<int>(subset.size())) continue;
    bool eq = true;
    for (size_t i = 0; i < subset.size(); ++i)
      if (all[r][i] != subset[i]) {
        eq = false;
        break;
      }
    if (eq) return static_cast<int>(r);
  }
  throw std::invalid_argument("subset_rank: not a sorted subset of range");
}

DifferentialForm::DifferentialForm(ChartPtr chart, int degree,
                                   std::vector<SmoothFn> coeffs)
    : chart_(std::move(chart)), degree_(degree), coeffs_(std::move(coeffs)) {
  assert(degree_ >= 0);
  int n = chart_->dim();
  if (degree_ > n) {
    overflow_ = true;
    coeffs_.clear();
    return;
  }
  assert(static_cast<long>(coeffs_.size()) == binom(n, degree_) &&
         "coefficient count must match C(dim, degree)");
}

DifferentialForm DifferentialForm::zero(ChartPtr chart, int degree) {
  int n = chart->dim();
  long m = degree > n ? 0 : binom(n, degree);
  std::vector<SmoothFn> cs(static_cast<size_t>(m));
  for (auto& c : cs) c = constant_fn(0.0);
  return DifferentialForm(std::move(chart), degree, std::move(cs));
}

const std::vector<int>& DifferentialForm::index_set(int idx) const {
  return index_subsets(chart_->dim(), degree_)[static_cast<size_t>(idx)];
}

double DifferentialForm::coefficient_value(int idx, std::span<const double> x) const {
  return coeffs_[static_cast<size_t>(idx)].f0(x);
}

double DifferentialForm::eval(std::span<const double> x,
                              const std::vector<std::vector<double>>& vectors) const {
  if (overflow_) return 0.0;
  if (static_cast<int>(vectors.size()) != degree_)
    throw std::invalid_argument("form evaluation needs exactly `degree` vectors");
  if (degree_ == 0) return coeffs_[0].f0(x);
  int k = degree_;
  const auto& subsets = index_subsets(chart_->dim(), k);
  std::vector<double> minor(static_cast<size_t>(k * k), 0.0);
  double acc = 0.0;
  for (size_t r = 0; r < subsets.size(); ++r) {
    double c = coeffs_[r].f0(x);
    if (c == 0.0) continue;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        minor[static_cast<size_t>(a * k + b)] =
            vectors[static_cast<size_t>(b)][static_cast<size_t>(subsets[r][static_cast<size_t>(a)])];
    acc += c * small_det(minor, k);
  }
  return acc;
}

double DifferentialForm::operator()(const Point& p,
                                    const std::vector<std::vector<double>>& vectors) const {
  if (p.chart.get() != chart_.get())
    throw std::invalid_argument("form evaluated at a point of a different chart");
  chart_->validate(p.x);
  return eval(p.x, vectors);
}

Point ChartMap::apply(const Point& p) const {
  if (p.chart.get() != source.get())
    throw std::invalid_argument("chart map applied to a point of the wrong chart");
  return make_point(target, map.m0(p.x));
}

std::vector<double> ChartMap::push_vector(std::span<const double> x,
                                          std::span<const double> v,
                                          const DiffBackend& be) const {
  int n = static_cast<int>(x.size());
  std::vector<D1> xd(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    xd[static_cast<size_t>(i)] = {x[static_cast<size_t>(i)], v[static_cast<size_t>(i)]};
  std::vector<D1> r = map_d1(map, xd, be);
  std::vector<double> out(r.size());
  for (size_t i = 0; i < r.size(); ++i) out[i] = r[i].d;
  return out;
}

}  // namespace contactlab
