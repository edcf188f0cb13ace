#include "contactlab/contact.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace contactlab {

ContactForm::ContactForm(ChartPtr chart, DifferentialForm alpha, DiffBackend be,
                         int orientation_sign, std::string name)
    : chart_(chart),
      alpha_(std::move(alpha)),
      dalpha_(exterior_derivative(alpha_, be)),
      volume_(alpha_),  // placeholder, rebuilt below
      backend_(be),
      orientation_sign_(orientation_sign),
      name_(std::move(name)) {
  if (chart_->dim() % 2 == 0)
    throw std::invalid_argument("contact form requires an odd-dimensional chart");
  if (alpha_.degree() != 1)
    throw std::invalid_argument("contact form must be built from a 1-form");
  DifferentialForm v = alpha_;
  for (int i = 1; i < n(); ++i) v = wedge(v, dalpha_, backend_);
  volume_ = std::move(v);
}

double ContactForm::volume_density(std::span<const double> x) const {
  chart_->validate(x);
  return volume_.coefficient_value(0, x);
}

ContactCheckResult verify_contact(const ContactForm& cf, const std::vector<Point>& samples,
                                  double tol_rel) {
  ContactCheckResult res;
  res.sample_count = samples.size();
  if (samples.empty()) return res;
  std::vector<double> mags;
  mags.reserve(samples.size());
  double min_abs = std::numeric_limits<double>::infinity();
  std::vector<double> argmin;
  bool orient_ok = true;
  for (const auto& p : samples) {
    double v = cf.volume_form().coefficient_value(0, p.x);
    double m = std::fabs(v);
    mags.push_back(m);
    if (m < min_abs) {
      min_abs = m;
      argmin = p.x;
    }
    if (v * cf.orientation_sign() <= 0.0) orient_ok = false;
  }
  std::vector<double> sorted(mags);
  std::sort(sorted.begin(), sorted.end());
  double median = sorted[sorted.size() / 2];
  res.min_abs = min_abs;
  res.median_abs = median;
  res.threshold = tol_rel * median;
  res.orientation_consistent = orient_ok;
  res.argmin = std::move(argmin);
  res.pass = orient_ok && min_abs >= res.threshold && median > 0.0;
  return res;
}

VectorField reeb_field(const ContactForm& cf) {
  ChartPtr chart = cf.chart();
  auto shared = std::make_shared<ContactForm>(cf);
  SmoothMap m;
  m.out_dim = chart->dim();
  m.m0 = [shared](std::span<const double> x) { return reeb_components(*shared, x); };
  m.m1 = [shared](std::span<const D1> x) { return reeb_components(*shared, x); };
  m.m2 = [shared](std::span<const D2> x) { return reeb_components(*shared, x); };
  return VectorField{chart, std::move(m)};
}

double reeb_residual(const ContactForm& cf, std::span<const double> x,
                     std::span<const double> R) {
  int n = cf.chart()->dim();
  std::vector<double> a = cf.alpha_frame(x);
  std::vector<double> M = cf.dalpha_matrix(x);
  double pairing = 0.0;
  for (int i = 0; i < n; ++i) pairing += a[static_cast<size_t>(i)] * R[static_cast<size_t>(i)];
  double res = std::fabs(pairing - 1.0);
  for (int i = 0; i < n; ++i) {
    double Mu = 0.0;
    for (int j = 0; j < n; ++j)
      Mu += M[static_cast<size_t>(i * n + j)] * R[static_cast<size_t>(j)];
    res = std::max(res, std::fabs(Mu));
  }
  return res;
}

VectorField hamiltonian_field(const ContactForm& cf, const SmoothFn& H) {
  auto shared = std::make_shared<ContactForm>(cf);
  auto Hp = std::make_shared<SmoothFn>(H);
  SmoothMap m;
  m.out_dim = cf.chart()->dim();
  m.m0 = [shared, Hp](std::span<const double> x) {
    return hamiltonian_components(*shared, *Hp, x);
  };
  m.m1 = [shared, Hp](std::span<const D1> x) {
    return hamiltonian_components(*shared, *Hp, x);
  };
  m.m2 = [shared, Hp](std::span<const D2> x) {
    return hamiltonian_components(*shared, *Hp, x);
  };
  return VectorField{cf.chart(), std::move(m)};
}

HamiltonianResidual hamiltonianresidual_impl(const ContactForm& cf, const SmoothFn& H,
                                             std::span<const double> x,
                                             std::span<const double> X) {
  const DiffBackend& be = cf.backend();
  int n = cf.chart()->dim();
  std::vector<double> a = cf.alpha_frame(x);
  std::vector<double> M = cf.dalpha_matrix(x);
  std::vector<double> R = reeb_components(cf, x);

  double Hval = H.f0(x);
  std::vector<double> dH(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) dH[static_cast<size_t>(j)] = fn_partial(H, x, j, be);
  double dRH = 0.0;
  for (int j = 0; j < n; ++j) dRH += dH[static_cast<size_t>(j)] * R[static_cast<size_t>(j)];

  HamiltonianResidual out;
  double aX = 0.0;
  for (int i = 0; i < n; ++i) aX += a[static_cast<size_t>(i)] * X[static_cast<size_t>(i)];
  out.alpha_eq = std::fabs(aX - Hval);
  for (int i = 0; i < n; ++i) {
    double MX = 0.0;
    for (int j = 0; j < n; ++j)
      MX += M[static_cast<size_t>(i * n + j)] * X[static_cast<size_t>(j)];
    double rhs = dRH * a[static_cast<size_t>(i)] - dH[static_cast<size_t>(i)];
    out.dalpha_eq = std::max(out.dalpha_eq, std::fabs(MX - rhs));
  }
  return out;
}

HamiltonianResidual hamiltonian_residual(const ContactForm& cf, const SmoothFn& H,
                                         std::span<const double> x) {
  std::vector<double> X = hamiltonian_components(cf, H, x);
  return hamiltonianresidual_impl(cf, H, x, X);
}

ConformalCheckResult check_contactomorphism(const ContactForm& src, const ContactForm& dst,
                                            const ChartMap& phi,
                                            const std::vector<Point>& samples,
                                            double tol_kernel) {
  const DiffBackend& be = src.backend();
  int n = src.chart()->dim();
  ConformalCheckResult res;
  res.min_lambda = std::numeric_limits<double>::infinity();
  res.max_lambda = -std::numeric_limits<double>::infinity();
  for (const auto& p : samples) {
    std::vector<double> y = phi.map.m0(p.x);
    dst.chart()->validate(y);
    std::vector<double> a = src.alpha_frame(std::span<const double>(p.x));
    std::vector<double> ady = dst.alpha_frame(std::span<const double>(y));

    // pulled-back covector on the coordinate frame
    std::vector<double> pb(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
      std::vector<double> col = map_jacobian_col(phi.map, p.x, j, be);
      double acc = 0.0;
      for (size_t mI = 0; mI < col.size(); ++mI) acc += ady[mI] * col[mI];
      pb[static_cast<size_t>(j)] = acc;
    }

    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += pb[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
      den += a[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
    }
    double lambda = den > 0.0 ? num / den : 0.0;

    // kernel violation: evaluate pb on a normalized kernel basis of alpha_src
    int piv = 0;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      double m = std::fabs(a[static_cast<size_t>(i)]);
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    double kv = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == piv) continue;
      std::vector<double> w(static_cast<size_t>(n), 0.0);
      w[static_cast<size_t>(i)] = 1.0;
      w[static_cast<size_t>(piv)] = -a[static_cast<size_t>(i)] / a[static_cast<size_t>(piv)];
      double norm = 0.0, val = 0.0;
      for (int j2 = 0; j2 < n; ++j2) {
        norm += w[static_cast<size_t>(j2)] * w[static_cast<size_t>(j2)];
        val += pb[static_cast<size_t>(j2)] * w[static_cast<size_t>(j2)];
      }
      kv = std::max(kv, std::fabs(val) / std::sqrt(norm));
    }

    ConformalSample cs;
    cs.lambda = lambda;
    cs.kernel_violation = kv;
    cs.displacement = chart_distance(*src.chart(), p.x, y);
    res.samples.push_back(cs);
    res.max_kernel_violation = std::max(res.max_kernel_violation, kv);
    res.min_lambda = std::min(res.min_lambda, lambda);
    res.max_lambda = std::max(res.max_lambda, lambda);
    res.max_lambda_dev = std::max(res.max_lambda_dev, std::fabs(lambda - 1.0));
  }
  res.pass = res.max_kernel_violation <= tol_kernel && res.min_lambda > 0.0;
  return res;
}

namespace {

using VelocityFn = std::function<std::vector<double>(double, std::span<const double>)>;

std::vector<double> rk4_flow(const ChartManifold& chart, const VelocityFn& vel,
                             std::vector<double> state, double t0, double t1, int steps) {
  if (steps < 1) throw std::invalid_argument("rk4_flow: steps must be positive");
  size_t n = state.size();
  double h = (t1 - t0) / steps;
  std::vector<double> tmp(n);
  auto advance = [&](const std::vector<double>& base, const std::vector<double>& k,
                     double scale) {
    for (size_t i = 0; i < n; ++i) tmp[i] = base[i] + scale * k[i];
    chart.normalize(tmp);
  };
  for (int s = 0; s < steps; ++s) {
    double t = t0 + h * s;
    chart.normalize(state);
    std::vector<double> k1 = vel(t, state);
    advance(state, k1, 0.5 * h);
    std::vector<double> k2 = vel(t + 0.5 * h, tmp);
    advance(state, k2, 0.5 * h);
    std::vector<double> k3 = vel(t + 0.5 * h, tmp);
    advance(state, k3, h);
    std::vector<double> k4 = vel(t + h, tmp);
    for (size_t i = 0; i < n; ++i)
      state[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  chart.normalize(state);
  return state;
}

}  // namespace

std::vector<double> flow_reeb(const ContactForm& cf, std::vector<double> start, double time,
                              int steps) {
  VelocityFn vel = [&cf](double, std::span<const double> x) { return reeb_components(cf, x); };
  return rk4_flow(*cf.chart(), vel, std::move(start), 0.0, time, steps);
}

std::vector<double> flow_hamiltonian(const ContactForm& cf, const SmoothFn& H,
                                     std::vector<double> start, double time, int steps) {
  VelocityFn vel = [&cf, &H](double, std::span<const double> x) {
    return hamiltonian_components(cf, H, x);
  };
  return rk4_flow(*cf.chart(), vel, std::move(start), 0.0, time, steps);
}

std::vector<double> flow_hamiltonian_family(const ContactForm& cf, const SmoothFn& family,
                                            std::vector<double> start, int steps) {
  VelocityFn vel = [&cf, &family](double t, std::span<const double> x) {
    // Freeze the time slot, then solve for the instantaneous Hamiltonian field.
    SmoothFn frozen = make_smooth([&family, t, be = cf.backend()](const auto& xs) {
      using T = std::remove_cvref_t<decltype(xs[0])>;
      std::vector<T> ext(xs.begin(), xs.end());
      ext.push_back(T(t));
      return fn_eval(family, std::span<const T>(ext), be);
    });
    return hamiltonian_components(cf, frozen, x);
  };
  return rk4_flow(*cf.chart(), vel, std::move(start), 0.0, 1.0, steps);
}

IsotropicCheckResult check_isotropic(const ContactForm& cf, const ParamImmersion& imm,
                                     const std::vector<std::vector<double>>& param_samples,
                                     double tol) {
  const DiffBackend& be = cf.backend();
  IsotropicCheckResult res;
  int k = imm.domain->dim();
  for (const auto& s : param_samples) {
    std::vector<double> x = imm.position(s);
    cf.chart()->validate(x);
    std::vector<double> a = cf.alpha_frame(std::span<const double>(x));
    std::vector<std::vector<double>> cols;
    double local = 0.0;
    for (int j = 0; j < k; ++j) {
      std::vector<double> t = imm.tangent(s, j, be);
      double val = 0.0, norm = 0.0;
      for (size_t i = 0; i < t.size(); ++i) {
        val += a[i] * t[i];
        norm += t[i] * t[i];
      }
      local = std::max(local, std::fabs(val) / std::max(std::sqrt(norm), 1e-30));
      cols.push_back(std::move(t));
    }
    double indep = gram_independence(cols);
    if (local > res.max_violation) {
      res.max_violation = local;
      res.worst_param = s;
    }
    res.min_independence = std::min(res.min_independence, indep);
  }
  res.pass = res.max_violation <= tol && res.min_independence > 1e-6;
  return res;
}

}  // namespace contactlab
