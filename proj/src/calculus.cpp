#include "contactlab/calculus.hpp"

#include <algorithm>
#include <cassert>
#include <memory>
#include <stdexcept>

#include "contactlab/linalg.hpp"

namespace contactlab {

namespace {

// Parity of merging two sorted index blocks: (-1)^{#inversions}.
double merge_sign(std::span<const int> I, std::span<const int> J) {
  int inv = 0;
  for (int a : I)
    for (int b : J)
      if (b < a) ++inv;
  return (inv % 2 == 0) ? 1.0 : -1.0;
}

struct ProductTerm {
  double sign;
  SmoothFn a, b;
};

SmoothFn product_sum(std::vector<ProductTerm> terms, DiffBackend be) {
  auto data = std::make_shared<std::vector<ProductTerm>>(std::move(terms));
  SmoothFn s;
  s.f0 = [data](std::span<const double> x) {
    double acc = 0.0;
    for (const auto& t : *data) acc += t.sign * t.a.f0(x) * t.b.f0(x);
    return acc;
  };
  s.f1 = [data, be](std::span<const D1> x) {
    D1 acc(0.0);
    for (const auto& t : *data)
      acc = acc + t.sign * fn_d1(t.a, x, be) * fn_d1(t.b, x, be);
    return acc;
  };
  s.f2 = [data, be](std::span<const D2> x) {
    D2 acc(0.0);
    for (const auto& t : *data)
      acc = acc + t.sign * fn_d2(t.a, x, be) * fn_d2(t.b, x, be);
    return acc;
  };
  return s;
}

struct PartialTerm {
  double sign;
  SmoothFn a;
  int j;
};

SmoothFn partial_sum(std::vector<PartialTerm> terms, DiffBackend be) {
  auto data = std::make_shared<std::vector<PartialTerm>>(std::move(terms));
  SmoothFn s;
  s.f0 = [data, be](std::span<const double> x) {
    double acc = 0.0;
    for (const auto& t : *data) acc += t.sign * fn_partial(t.a, x, t.j, be);
    return acc;
  };
  s.f1 = [data, be](std::span<const D1> x) {
    D1 acc(0.0);
    for (const auto& t : *data) acc = acc + t.sign * fn_partial_d1(t.a, x, t.j, be);
    return acc;
  };
  s.f2 = [data, be](std::span<const D2> x) {
    D2 acc(0.0);
    for (const auto& t : *data) acc = acc + t.sign * fn_partial_d2(t.a, x, t.j, be);
    return acc;
  };
  return s;
}

struct ContractTerm {
  double sign;
  int m;
  SmoothFn a;
};

SmoothFn contract_sum(SmoothMap X, std::vector<ContractTerm> terms, DiffBackend be) {
  auto data = std::make_shared<std::vector<ContractTerm>>(std::move(terms));
  auto Xp = std::make_shared<SmoothMap>(std::move(X));
  SmoothFn s;
  s.f0 = [data, Xp](std::span<const double> x) {
    std::vector<double> v = Xp->m0(x);
    double acc = 0.0;
    for (const auto& t : *data)
      acc += t.sign * v[static_cast<size_t>(t.m)] * t.a.f0(x);
    return acc;
  };
  s.f1 = [data, Xp, be](std::span<const D1> x) {
    std::vector<D1> v = map_d1(*Xp, x, be);
    D1 acc(0.0);
    for (const auto& t : *data)
      acc = acc + t.sign * v[static_cast<size_t>(t.m)] * fn_d1(t.a, x, be);
    return acc;
  };
  s.f2 = [data, Xp, be](std::span<const D2> x) {
    std::vector<D2> v = map_d2(*Xp, x, be);
    D2 acc(0.0);
    for (const auto& t : *data)
      acc = acc + t.sign * v[static_cast<size_t>(t.m)] * fn_d2(t.a, x, be);
    return acc;
  };
  return s;
}

}  // namespace

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b,
                       const DiffBackend& be) {
  if (a.chart().get() != b.chart().get())
    throw std::invalid_argument("wedge: operands live on different charts");
  int n = a.chart()->dim();
  int p = a.degree(), q = b.degree();
  if (p + q > n || a.is_zero_overflow() || b.is_zero_overflow())
    return DifferentialForm::zero(a.chart(), p + q);

  const auto& ksets = index_subsets(n, p + q);
  std::vector<SmoothFn> coeffs;
  coeffs.reserve(ksets.size());
  for (const auto& K : ksets) {
    std::vector<ProductTerm> terms;
    const auto& picks = index_subsets(p + q, p);
    for (const auto& pick : picks) {
      std::vector<int> I, J;
      size_t pi = 0;
      for (int pos = 0; pos < p + q; ++pos) {
        if (pi < pick.size() && pick[pi] == pos) {
          I.push_back(K[static_cast<size_t>(pos)]);
          ++pi;
        } else {
          J.push_back(K[static_cast<size_t>(pos)]);
        }
      }
      double sgn = merge_sign(I, J);
      int ia = subset_rank(n, p, I);
      int ib = subset_rank(n, q, J);
      terms.push_back({sgn, a.coefficient(ia), b.coefficient(ib)});
    }
    coeffs.push_back(product_sum(std::move(terms), be));
  }
  return DifferentialForm(a.chart(), p + q, std::move(coeffs));
}

DifferentialForm exterior_derivative(const DifferentialForm& a, const DiffBackend& be) {
  int n = a.chart()->dim();
  int k = a.degree();
  if (k + 1 > n || a.is_zero_overflow())
    return DifferentialForm::zero(a.chart(), k + 1);

  const auto& jsets = index_subsets(n, k + 1);
  std::vector<SmoothFn> coeffs;
  coeffs.reserve(jsets.size());
  for (const auto& J : jsets) {
    std::vector<PartialTerm> terms;
    for (int pos = 0; pos <= k; ++pos) {
      std::vector<int> I;
      for (int q = 0; q <= k; ++q)
        if (q != pos) I.push_back(J[static_cast<size_t>(q)]);
      double sgn = (pos % 2 == 0) ? 1.0 : -1.0;
      terms.push_back({sgn, a.coefficient(subset_rank(n, k, I)), J[static_cast<size_t>(pos)]});
    }
    coeffs.push_back(partial_sum(std::move(terms), be));
  }
  return DifferentialForm(a.chart(), k + 1, std::move(coeffs));
}

DifferentialForm interior_product(const VectorField& X, const DifferentialForm& a,
                                  const DiffBackend& be) {
  if (X.chart.get() != a.chart().get())
    throw std::invalid_argument("interior product: field and form on different charts");
  int k = a.degree();
  if (k == 0)
    throw std::invalid_argument("interior product of a 0-form is undefined");
  int n = a.chart()->dim();
  if (a.is_zero_overflow()) return DifferentialForm::zero(a.chart(), k - 1);

  const auto& jsets = index_subsets(n, k - 1);
  std::vector<SmoothFn> coeffs;
  coeffs.reserve(jsets.size());
  for (const auto& J : jsets) {
    std::vector<ContractTerm> terms;
    for (int m = 0; m < n; ++m) {
      if (std::binary_search(J.begin(), J.end(), m)) continue;
      std::vector<int> K(J);
      K.insert(std::upper_bound(K.begin(), K.end(), m), m);
      int pos = static_cast<int>(std::lower_bound(K.begin(), K.end(), m) - K.begin());
      double sgn = (pos % 2 == 0) ? 1.0 : -1.0;
      terms.push_back({sgn, m, a.coefficient(subset_rank(n, k, K))});
    }
    coeffs.push_back(contract_sum(X.components, std::move(terms), be));
  }
  return DifferentialForm(a.chart(), k - 1, std::move(coeffs));
}

DifferentialForm lie_derivative(const VectorField& X, const DifferentialForm& a,
                                const DiffBackend& be) {
  DifferentialForm da = exterior_derivative(a, be);
  if (a.degree() == 0) return interior_product(X, da, be);
  DifferentialForm iXa = interior_product(X, a, be);
  return add(exterior_derivative(iXa, be), interior_product(X, da, be));
}

DifferentialForm pullback(const ChartMap& phi, const DifferentialForm& a,
                          const DiffBackend& be) {
  if (phi.target.get() != a.chart().get())
    throw std::invalid_argument("pullback: form does not live on the map target");
  int ns = phi.source->dim();
  int nt = phi.target->dim();
  int k = a.degree();
  if (k > ns || a.is_zero_overflow()) return DifferentialForm::zero(phi.source, k);

  if (k == 0) {
    auto m = std::make_shared<SmoothMap>(phi.map);
    SmoothFn c0 = a.coefficient(0);
    SmoothFn s;
    s.f0 = [m, c0](std::span<const double> x) {
      std::vector<double> y = m->m0(x);
      return c0.f0(y);
    };
    s.f1 = [m, c0, be](std::span<const D1> x) {
      std::vector<D1> y = map_d1(*m, x, be);
      return fn_d1(c0, y, be);
    };
    s.f2 = [m, c0, be](std::span<const D2> x) {
      std::vector<D2> y = map_d2(*m, x, be);
      return fn_d2(c0, y, be);
    };
    return DifferentialForm(phi.source, 0, {s});
  }

  const auto& jsets = index_subsets(ns, k);
  const auto& isets = index_subsets(nt, k);
  std::vector<SmoothFn> coeffs;
  coeffs.reserve(jsets.size());
  auto m = std::make_shared<SmoothMap>(phi.map);
  auto target_coeffs = std::make_shared<std::vector<SmoothFn>>();
  for (int i = 0; i < a.coefficient_count(); ++i) target_coeffs->push_back(a.coefficient(i));
  auto isets_p = &isets;

  for (const auto& J : jsets) {
    auto Jp = std::make_shared<std::vector<int>>(J);
    SmoothFn s;
    s.f0 = [m, target_coeffs, isets_p, Jp, k, be](std::span<const double> x) {
      std::vector<double> y = m->m0(x);
      std::vector<std::vector<double>> cols;
      cols.reserve(Jp->size());
      for (int j : *Jp) cols.push_back(map_jacobian_col(*m, x, j, be));
      double acc = 0.0;
      std::vector<double> minor(static_cast<size_t>(k * k));
      for (size_t r = 0; r < isets_p->size(); ++r) {
        double cv = (*target_coeffs)[r].f0(y);
        if (cv == 0.0) continue;
        for (int aRow = 0; aRow < k; ++aRow)
          for (int bCol = 0; bCol < k; ++bCol)
            minor[static_cast<size_t>(aRow * k + bCol)] =
                cols[static_cast<size_t>(bCol)]
                    [static_cast<size_t>((*isets_p)[r][static_cast<size_t>(aRow)])];
        acc += cv * small_det(minor, k);
      }
      return acc;
    };
    s.f1 = [m, target_coeffs, isets_p, Jp, k, be](std::span<const D1> x) {
      std::vector<D1> y = map_d1(*m, x, be);
      std::vector<std::vector<D1>> cols;
      cols.reserve(Jp->size());
      for (int j : *Jp) cols.push_back(map_jacobian_col_d1(*m, x, j, be));
      D1 acc(0.0);
      std::vector<D1> minor(static_cast<size_t>(k * k), D1(0.0));
      for (size_t r = 0; r < isets_p->size(); ++r) {
        D1 cv = fn_d1((*target_coeffs)[r], y, be);
        for (int aRow = 0; aRow < k; ++aRow)
          for (int bCol = 0; bCol < k; ++bCol)
            minor[static_cast<size_t>(aRow * k + bCol)] =
                cols[static_cast<size_t>(bCol)]
                    [static_cast<size_t>((*isets_p)[r][static_cast<size_t>(aRow)])];
        acc = acc + cv * small_det(minor, k);
      }
      return acc;
    };
    // no second channel; fn_d2 falls back to differencing f1
    coeffs.push_back(std::move(s));
  }
  return DifferentialForm(phi.source, k, std::move(coeffs));
}

DifferentialForm one_form(ChartPtr chart, std::vector<SmoothFn> coeffs) {
  return DifferentialForm(std::move(chart), 1, std::move(coeffs));
}

DifferentialForm function_form(ChartPtr chart, SmoothFn f) {
  return DifferentialForm(std::move(chart), 0, {std::move(f)});
}

DifferentialForm coordinate_differential(ChartPtr chart, int i) {
  int n = chart->dim();
  std::vector<SmoothFn> cs(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) cs[static_cast<size_t>(j)] = constant_fn(j == i ? 1.0 : 0.0);
  return DifferentialForm(std::move(chart), 1, std::move(cs));
}

DifferentialForm scale(const DifferentialForm& a, double c) {
  std::vector<SmoothFn> cs;
  cs.reserve(static_cast<size_t>(a.coefficient_count()));
  for (int i = 0; i < a.coefficient_count(); ++i) {
    SmoothFn src = a.coefficient(i);
    SmoothFn s;
    s.f0 = [src, c](std::span<const double> x) { return c * src.f0(x); };
    if (src.f1) s.f1 = [src, c](std::span<const D1> x) { return c * src.f1(x); };
    if (src.f2) s.f2 = [src, c](std::span<const D2> x) { return c * src.f2(x); };
    cs.push_back(std::move(s));
  }
  return DifferentialForm(a.chart(), a.degree(), std::move(cs));
}

DifferentialForm add(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.chart().get() != b.chart().get() || a.degree() != b.degree())
    throw std::invalid_argument("add: mismatched forms");
  if (a.is_zero_overflow()) return b;
  if (b.is_zero_overflow()) return a;
  std::vector<SmoothFn> cs;
  cs.reserve(static_cast<size_t>(a.coefficient_count()));
  for (int i = 0; i < a.coefficient_count(); ++i) {
    SmoothFn fa = a.coefficient(i), fb = b.coefficient(i);
    SmoothFn s;
    s.f0 = [fa, fb](std::span<const double> x) { return fa.f0(x) + fb.f0(x); };
    if (fa.f1 && fb.f1)
      s.f1 = [fa, fb](std::span<const D1> x) { return fa.f1(x) + fb.f1(x); };
    if (fa.f2 && fb.f2)
      s.f2 = [fa, fb](std::span<const D2> x) { return fa.f2(x) + fb.f2(x); };
    cs.push_back(std::move(s));
  }
  return DifferentialForm(a.chart(), a.degree(), std::move(cs));
}

}  // namespace contactlab
