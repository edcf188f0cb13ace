#include "contactlab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "contactlab/sampling.hpp"

namespace contactlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTau = 2.0 * std::numbers::pi;

// Fiber coefficient reused on a larger chart: reads the first m slots only.
SmoothFn lift_fiber_fn(SmoothFn f, int m) {
  auto fp = std::make_shared<SmoothFn>(std::move(f));
  DiffBackend be = DiffBackend::duals();
  return make_smooth([fp, m, be](const auto& x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    std::span<const T> head(x.data(), static_cast<size_t>(m));
    return fn_eval(*fp, head, be);
  });
}

std::vector<CoordSpec> fiber_plus(const ChartManifold& fiber_chart,
                                  std::vector<CoordSpec> extra) {
  std::vector<CoordSpec> coords;
  for (int i = 0; i < fiber_chart.dim(); ++i) coords.push_back(fiber_chart.coord(i));
  for (auto& c : extra) coords.push_back(std::move(c));
  return coords;
}

// Fiber-chart exclusions carried to the first m slots of the total chart.
ExcludedRegion lifted_exclusion(ChartPtr fiber_chart, int m) {
  return {"fiber-" + std::string("excluded"),
          [fiber_chart, m](std::span<const double> x) {
            return fiber_chart->excluded_hit(x.first(static_cast<size_t>(m))) != nullptr;
          }};
}

std::vector<SmoothFn> lifted_fiber_coeffs(const ContactForm& fiber) {
  int m = fiber.chart()->dim();
  std::vector<SmoothFn> a;
  a.reserve(static_cast<size_t>(m) + 2);
  for (int i = 0; i < m; ++i) a.push_back(lift_fiber_fn(fiber.alpha().coefficient(i), m));
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Charts and catalog forms

ChartPtr chart_r3_cart(double bound) {
  return std::make_shared<ChartManifold>(
      "r3-cart", std::vector<CoordSpec>{CoordSpec::linear("x", -bound, bound),
                                        CoordSpec::linear("y", -bound, bound),
                                        CoordSpec::linear("z", -bound, bound)});
}

ChartPtr chart_r3_cyl(double r_max, double z_bound) {
  ExcludedRegion axis{"axis",
                      [](std::span<const double> x) { return x[0] < 1e-3; }};
  return std::make_shared<ChartManifold>(
      "r3-cyl", std::vector<CoordSpec>{CoordSpec::linear("r", 0.0, r_max),
                                       CoordSpec::angle("theta", kTau),
                                       CoordSpec::linear("z", -z_bound, z_bound)},
      std::vector<ExcludedRegion>{axis});
}

ContactForm std_r3_form(double bound) {
  ChartPtr chart = chart_r3_cart(bound);
  std::vector<SmoothFn> a(3);
  a[0] = make_smooth([](const auto& x) { return -x[1]; });
  a[1] = constant_fn(0.0);
  a[2] = constant_fn(1.0);
  return ContactForm(chart, DifferentialForm(chart, 1, std::move(a)),
                     DiffBackend::duals(), +1, "std-r3");
}

ContactForm ot_r3_form(double r_max) {
  ChartPtr chart = chart_r3_cyl(r_max, 50.0);
  std::vector<SmoothFn> a(3);
  a[0] = constant_fn(0.0);
  a[1] = make_smooth([](const auto& x) { return x[0] * sin(x[0]); });
  a[2] = make_smooth([](const auto& x) { return cos(x[0]); });
  return ContactForm(chart, DifferentialForm(chart, 1, std::move(a)),
                     DiffBackend::duals(), +1, "ot-r3");
}

ContactForm ot_r3_cart_form(double bound) {
  ChartPtr chart = chart_r3_cart(bound);
  std::vector<SmoothFn> a(3);
  a[0] = make_smooth([](const auto& x) {
    auto s = x[0] * x[0] + x[1] * x[1];
    return -x[1] * sinc_sqrt(s);
  });
  a[1] = make_smooth([](const auto& x) {
    auto s = x[0] * x[0] + x[1] * x[1];
    return x[0] * sinc_sqrt(s);
  });
  a[2] = make_smooth([](const auto& x) {
    return cos_sqrt(x[0] * x[0] + x[1] * x[1]);
  });
  return ContactForm(chart, DifferentialForm(chart, 1, std::move(a)),
                     DiffBackend::duals(), +1, "ot-r3-cart");
}

std::array<double, 3> ot_reeb_closed_form(double r) {
  double den = r + std::sin(r) * std::cos(r);
  return {0.0, std::sin(r) / den, (std::sin(r) + r * std::cos(r)) / den};
}

std::vector<double> ot_reeb_sign_change_radii(double r_max) {
  auto f = [](double r) { return std::sin(r) + r * std::cos(r); };
  std::vector<double> roots;
  int scan = 4096;
  double a = 0.05;
  double fa = f(a);
  for (int i = 1; i <= scan; ++i) {
    double b = 0.05 + (r_max - 0.05) * i / scan;
    double fb = f(b);
    if (fa == 0.0) roots.push_back(a);
    if (fa * fb < 0.0) {
      double lo = a, hi = b;
      for (int it = 0; it < 90; ++it) {
        double mid = 0.5 * (lo + hi);
        (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

// ---------------------------------------------------------------------------
// Product fibrations

ContactFibration std_product(const ContactForm& fiber, int sign, double base_radius) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("std_product: sign must be +-1");
  ChartPtr fc = fiber.chart();
  int m = fc->dim();
  std::vector<ExcludedRegion> excl{lifted_exclusion(fc, m)};
  excl.push_back({"base-axis", [m](std::span<const double> x) {
                    return x[static_cast<size_t>(m)] < 1e-3;
                  }});
  ChartPtr chart = std::make_shared<ChartManifold>(
      "std-product:" + fc->name(),
      fiber_plus(*fc, {CoordSpec::linear("br", 0.0, base_radius),
                       CoordSpec::angle("btheta", kTau)}),
      std::move(excl));

  std::vector<SmoothFn> a = lifted_fiber_coeffs(fiber);
  a.push_back(constant_fn(0.0));
  a.push_back(make_smooth([m, sign](const auto& x) {
    auto r = x[static_cast<size_t>(m)];
    return static_cast<double>(sign) * r * r;
  }));

  std::string name = std::string("std-product") + (sign > 0 ? "+" : "-");
  std::vector<int> fidx(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) fidx[static_cast<size_t>(i)] = i;
  return ContactFibration{name,
                          ContactForm(chart, DifferentialForm(chart, 1, std::move(a)),
                                      DiffBackend::duals(), sign, name),
                          fiber,
                          std::move(fidx),
                          {m, m + 1}};
}

ContactFibration std_product_cart(const ContactForm& fiber, int sign, double base_bound) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("std_product_cart: sign must be +-1");
  ChartPtr fc = fiber.chart();
  int m = fc->dim();
  std::vector<ExcludedRegion> excl{lifted_exclusion(fc, m)};
  ChartPtr chart = std::make_shared<ChartManifold>(
      "std-product-cart:" + fc->name(),
      fiber_plus(*fc, {CoordSpec::linear("bx", -base_bound, base_bound),
                       CoordSpec::linear("by", -base_bound, base_bound)}),
      std::move(excl));

  std::vector<SmoothFn> a = lifted_fiber_coeffs(fiber);
  a.push_back(make_smooth([m, sign](const auto& x) {
    return -static_cast<double>(sign) * x[static_cast<size_t>(m) + 1];
  }));
  a.push_back(make_smooth([m, sign](const auto& x) {
    return static_cast<double>(sign) * x[static_cast<size_t>(m)];
  }));

  std::string name = std::string("std-product-cart") + (sign > 0 ? "+" : "-");
  std::vector<int> fidx(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) fidx[static_cast<size_t>(i)] = i;
  return ContactFibration{name,
                          ContactForm(chart, DifferentialForm(chart, 1, std::move(a)),
                                      DiffBackend::duals(), sign, name),
                          fiber,
                          std::move(fidx),
                          {m, m + 1}};
}

BasePath polar_circle(double radius, bool ccw) {
  double w = ccw ? kTau : -kTau;
  BasePath p;
  p.name = "polar-circle";
  p.closed = true;
  p.pos = [radius, w](double t) -> std::array<double, 2> { return {radius, w * t}; };
  p.vel = [w](double) -> std::array<double, 2> { return {0.0, w}; };
  return p;
}

BasePath polar_radial_segment(double r0, double r1, double theta) {
  BasePath p;
  p.name = "polar-radial";
  p.pos = [r0, r1, theta](double t) -> std::array<double, 2> {
    return {r0 + (r1 - r0) * t, theta};
  };
  p.vel = [r0, r1](double) -> std::array<double, 2> { return {r1 - r0, 0.0}; };
  return p;
}

BasePath polar_fourier_loop(std::uint64_t seed, double base_r, double wobble) {
  SeededUniform rng(seed);
  auto coeff = std::make_shared<std::array<double, 6>>();
  double norm = 0.0;
  for (int k = 0; k < 3; ++k) {
    (*coeff)[static_cast<size_t>(2 * k)] = 2.0 * rng.next() - 1.0;
    (*coeff)[static_cast<size_t>(2 * k + 1)] = 2.0 * rng.next() - 1.0;
    norm += (std::fabs((*coeff)[static_cast<size_t>(2 * k)]) +
             std::fabs((*coeff)[static_cast<size_t>(2 * k + 1)])) /
            (k + 1);
  }
  double scale = norm > 0.0 ? wobble / norm : 0.0;
  BasePath p;
  p.name = "polar-fourier";
  p.closed = true;
  p.pos = [coeff, scale, base_r](double t) -> std::array<double, 2> {
    double th = kTau * t;
    double r = base_r;
    for (int k = 0; k < 3; ++k)
      r += scale *
           ((*coeff)[static_cast<size_t>(2 * k)] * std::cos((k + 1) * th) +
            (*coeff)[static_cast<size_t>(2 * k + 1)] * std::sin((k + 1) * th)) /
           (k + 1);
    return {r, th};
  };
  p.vel = [coeff, scale](double t) -> std::array<double, 2> {
    double th = kTau * t;
    double dr = 0.0;
    for (int k = 0; k < 3; ++k)
      dr += scale * ((*coeff)[static_cast<size_t>(2 * k + 1)] * std::cos((k + 1) * th) -
                     (*coeff)[static_cast<size_t>(2 * k)] * std::sin((k + 1) * th));
    return {dr * kTau, kTau};
  };
  return p;
}

// ---------------------------------------------------------------------------
// Monodromy prescription

SmoothFn family_constant(double c) { return constant_fn(c); }

SmoothFn family_linear_x(double c) {
  return make_smooth([c](const auto& x) { return c * x[0]; });
}

PrescribedFibration prescribe_monodromy(const MonodromyPrescription& presc,
                                        const ContactForm& fiber, double base_radius,
                                        int region_samples) {
  ChartPtr fc = fiber.chart();
  int m = fc->dim();
  double delta = presc.delta;
  if (!(delta > 0.0) || 0.75 * delta > base_radius)
    throw std::invalid_argument("prescribe_monodromy: support exceeds the base");

  std::vector<ExcludedRegion> excl{lifted_exclusion(fc, m)};
  excl.push_back({"base-axis", [m](std::span<const double> x) {
                    return x[static_cast<size_t>(m)] < 1e-3;
                  }});
  ChartPtr chart = std::make_shared<ChartManifold>(
      "prescribed:" + fc->name(),
      fiber_plus(*fc, {CoordSpec::linear("br", 0.0, base_radius),
                       CoordSpec::angle("btheta", kTau)}),
      std::move(excl));

  auto fam = std::make_shared<SmoothFn>(presc.family);
  double beta = presc.beta;
  double scale = presc.scale;
  DiffBackend be = DiffBackend::duals();

  // dr coefficient, -g on the support and exactly zero outside it
  SmoothFn a_r = make_smooth([fam, m, delta, beta, scale, be](const auto& x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    T th = x[static_cast<size_t>(m) + 1];
    if (scalar_value(th) > kPi) th = th - kTau;
    T xi = angle_cutoff(th);
    if (scalar_value(xi) == 0.0) return T(0.0);
    T s = (x[static_cast<size_t>(m)] - 0.25 * delta) / (0.5 * delta);
    T taup = flat_ends_reparam_deriv(s, beta);
    if (scalar_value(taup) == 0.0) return T(0.0);
    T tau = flat_ends_reparam(s, beta);
    std::vector<T> arg(x.begin(), x.begin() + m);
    arg.push_back(tau);
    T G = fn_eval(*fam, std::span<const T>(arg), be);
    return T(-(2.0 * scale / delta)) * xi * taup * G;
  });

  std::vector<SmoothFn> a = lifted_fiber_coeffs(fiber);
  a.push_back(a_r);
  a.push_back(make_smooth([m](const auto& x) {
    auto r = x[static_cast<size_t>(m)];
    return r * r;
  }));

  std::vector<int> fidx(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) fidx[static_cast<size_t>(i)] = i;
  PrescribedFibration out{
      ContactFibration{"prescribed",
                       ContactForm(chart, DifferentialForm(chart, 1, std::move(a)),
                                   DiffBackend::duals(), +1, "prescribed"),
                       fiber,
                       std::move(fidx),
                       {m, m + 1}},
      presc, 0.0, 0.0};

  // sup of the deformation term and of its fiber gradient over the support
  if (region_samples > 0) {
    SampleSpec spec;
    spec.count = static_cast<size_t>(region_samples);
    spec.box = chart_bounds_box(*fc);
    spec.box.lo.push_back(0.25 * delta);
    spec.box.hi.push_back(0.75 * delta);
    spec.box.lo.push_back(-0.25 * kPi);
    spec.box.hi.push_back(0.25 * kPi);
    const SmoothFn& g = out.fib.total.alpha().coefficient(m);
    for (const auto& x : draw_box_samples(spec)) {
      out.sup_g = std::max(out.sup_g, std::fabs(g.f0(x)));
      double s2 = 0.0;
      for (int j = 0; j < m; ++j) {
        double pj = fn_partial(g, x, j, be);
        s2 += pj * pj;
      }
      out.sup_dg = std::max(out.sup_dg, std::sqrt(s2));
    }
  }
  return out;
}

BasePath prescription_segment(double delta) {
  return polar_radial_segment(0.25 * delta, 0.75 * delta, 0.0);
}

double eps_delta_bisect(const MonodromyPrescription& presc, const ContactForm& fiber,
                        int samples, std::uint64_t seed, double hi, int iters) {
  // Outside the twisting window the form equals the product, so the bisection
  // concentrates its samples where degeneration can actually happen.
  auto passes = [&](double c) {
    MonodromyPrescription p = presc;
    p.scale = c;
    PrescribedFibration pf = prescribe_monodromy(p, fiber, 1.2, 0);
    SampleSpec spec;
    spec.count = static_cast<size_t>(samples);
    spec.seed = seed;
    spec.box = chart_bounds_box(*fiber.chart());
    spec.box.lo.push_back(0.20 * p.delta);
    spec.box.hi.push_back(0.80 * p.delta);
    spec.box.lo.push_back(-0.30 * kPi);
    spec.box.hi.push_back(0.30 * kPi);
    auto pts = draw_samples(pf.fib.total.chart(), spec);
    return verify_contact(pf.fib.total, pts).pass;
  };
  if (passes(hi)) return hi;
  double lo = 0.0;
  for (int i = 0; i < iters; ++i) {
    double mid = 0.5 * (lo + hi);
    (passes(mid) ? lo : hi) = mid;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Round 5-manifold over the torus

OpenBookData s3_open_book(double rho_cap) {
  std::vector<ExcludedRegion> excl{
      {"binding-margin", [](std::span<const double> x) {
         return x[0] < 1e-3 || x[0] > 0.5 * kPi - 1e-3;
       }}};
  ChartPtr chart = std::make_shared<ChartManifold>(
      "s3-hopf", std::vector<CoordSpec>{CoordSpec::linear("eta", 0.0, 0.5 * kPi),
                                        CoordSpec::angle("phi1", kTau),
                                        CoordSpec::angle("phi2", kTau)},
      std::move(excl));

  std::vector<SmoothFn> b(3);
  b[0] = constant_fn(0.0);
  b[1] = make_smooth([](const auto& x) {
    auto c = cos(x[0]);
    return c * c;
  });
  b[2] = make_smooth([](const auto& x) {
    auto s = sin(x[0]);
    return s * s;
  });

  return OpenBookData{
      chart,
      ContactForm(chart, DifferentialForm(chart, 1, std::move(b)), DiffBackend::duals(),
                  -1, "s3-round"),
      make_smooth([rho_cap](const auto& x) { return smooth_min_cap(cos(x[0]), rho_cap); }),
      make_smooth([](const auto& x) { return x[1]; }),
      rho_cap};
}

ContactForm bourgeois_form_unchecked(const OpenBookData& ob, double eps) {
  std::vector<ExcludedRegion> excl{
      {"binding-margin", [](std::span<const double> x) {
         return x[0] < 1e-3 || x[0] > 0.5 * kPi - 1e-3;
       }}};
  ChartPtr chart = std::make_shared<ChartManifold>(
      "bourgeois", std::vector<CoordSpec>{CoordSpec::linear("eta", 0.0, 0.5 * kPi),
                                          CoordSpec::angle("phi1", kTau),
                                          CoordSpec::angle("phi2", kTau),
                                          CoordSpec::angle("theta1", kTau),
                                          CoordSpec::angle("theta2", kTau)},
      std::move(excl));

  double cap = ob.rho_cap;
  std::vector<SmoothFn> a(5);
  a[0] = constant_fn(0.0);
  a[1] = make_smooth([](const auto& x) {
    auto c = cos(x[0]);
    return c * c;
  });
  a[2] = make_smooth([](const auto& x) {
    auto s = sin(x[0]);
    return s * s;
  });
  a[3] = make_smooth([eps, cap](const auto& x) {
    return eps * smooth_min_cap(cos(x[0]), cap) * cos(x[1]);
  });
  a[4] = make_smooth([eps, cap](const auto& x) {
    return eps * smooth_min_cap(cos(x[0]), cap) * sin(x[1]);
  });
  return ContactForm(chart, DifferentialForm(chart, 1, std::move(a)),
                     DiffBackend::duals(), +1, "bourgeois");
}

ContactForm bourgeois_form(const OpenBookData& ob, double eps) {
  if (eps == 0.0)
    throw std::invalid_argument("bourgeois_form: the torus term needs eps != 0");
  return bourgeois_form_unchecked(ob, eps);
}

ContactFibration bourgeois_fibration(const OpenBookData& ob, double eps) {
  return ContactFibration{"bourgeois", bourgeois_form(ob, eps), ob.base, {0, 1, 2}, {3, 4}};
}

BasePath torus_segment(double delta, double angle) {
  double ux = delta * std::cos(angle), uy = delta * std::sin(angle);
  BasePath p;
  p.name = "torus-segment";
  p.pos = [ux, uy](double t) -> std::array<double, 2> { return {ux * t, uy * t}; };
  p.vel = [ux, uy](double) -> std::array<double, 2> { return {ux, uy}; };
  return p;
}

// ---------------------------------------------------------------------------
// Gluing profile

double GluingProfile::zeta(double r) const {
  if (r >= 0.5) return 1.0;
  if (r <= r0) return 0.0;
  return std::sqrt((r - r0) / b(r));
}

ProfileGridReport certify_profile(const GluingProfile& profile, int grid) {
  ProfileGridReport rep;
  rep.grid = grid;
  double min_dFdr = 1e300, min_axis = 1e300, max_zdz = -1e300, min_grad = 1e300;
  double max_plane = 0.0;
  for (int i = 0; i < grid; ++i) {
    double r = 0.02 + (1.0 - 0.02) * i / (grid - 1);
    D1 fr_axis = profile.F(D1(r, 1.0), D1(0.0, 0.0));
    min_axis = std::min(min_axis, fr_axis.d);
    if (r >= 0.5) {
      max_plane = std::max(max_plane, std::fabs(profile.F(r, 1.0)));
      max_plane = std::max(max_plane, std::fabs(profile.F(r, -1.0)));
    }
    for (int j = 0; j < grid; ++j) {
      double z = -1.0 + 2.0 * j / (grid - 1);
      D1 fr = profile.F(D1(r, 1.0), D1(z, 0.0));
      D1 fz = profile.F(D1(r, 0.0), D1(z, 1.0));
      min_dFdr = std::min(min_dFdr, fr.d);
      max_zdz = std::max(max_zdz, z * fz.d);
      if (std::fabs(fr.v) <= 0.02)
        min_grad = std::min(min_grad, std::hypot(fr.d, fz.d));
    }
  }
  rep.min_dFdr = min_dFdr;
  rep.min_dFdr_axis = min_axis;
  rep.max_z_dFdz = max_zdz;
  rep.min_grad_near_zero = min_grad;
  rep.max_plane_defect = max_plane;
  rep.zeta_flat_exact = true;
  for (int k = 0; k <= 10; ++k) {
    double r = 0.5 + 0.05 * k;
    if (profile.zeta(r) != 1.0) rep.zeta_flat_exact = false;
  }
  rep.pass = min_dFdr >= -1e-12 && min_axis >= 0.999 && max_zdz <= 1e-15 &&
             min_grad >= 0.25 && max_plane == 0.0 && rep.zeta_flat_exact;
  return rep;
}

GluedFibration geiges_glued(const ContactForm& fiber_cart3, double rho_g) {
  if (!(rho_g > 0.0)) throw std::invalid_argument("geiges_glued: rho_g must be positive");
  GluingProfile prof;

  ChartPtr fc = fiber_cart3.chart();
  int m = fc->dim();
  std::vector<ExcludedRegion> excl{lifted_exclusion(fc, m)};
  ChartPtr chart = std::make_shared<ChartManifold>(
      "geiges-glued:" + fc->name(),
      fiber_plus(*fc, {CoordSpec::linear("u", -1.05, 1.05),
                       CoordSpec::angle("theta", kTau)}),
      std::move(excl));

  std::vector<SmoothFn> a = lifted_fiber_coeffs(fiber_cart3);
  a.push_back(constant_fn(0.0));
  a.push_back(make_smooth([prof, rho_g, m](const auto& x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    T u = x[static_cast<size_t>(m)];
    T r = prof.r_of_u(u);
    return T(rho_g) * prof.z_of_u(u) * r * r;
  }));

  std::vector<int> fidx(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) fidx[static_cast<size_t>(i)] = i;
  return GluedFibration{
      ContactFibration{"geiges-glued",
                       ContactForm(chart, DifferentialForm(chart, 1, std::move(a)),
                                   DiffBackend::duals(), +1, "geiges-glued"),
                       fiber_cart3,
                       std::move(fidx),
                       {m, m + 1}},
      prof, rho_g};
}

ContactFibration geiges_normal_model(const ContactForm& fiber, int sign, double rho,
                                     double r_min, double r_max) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("geiges_normal_model: sign must be +-1");
  ChartPtr fc = fiber.chart();
  int m = fc->dim();
  std::vector<ExcludedRegion> excl{lifted_exclusion(fc, m)};
  ChartPtr chart = std::make_shared<ChartManifold>(
      "geiges-normal:" + fc->name(),
      fiber_plus(*fc, {CoordSpec::linear("r", r_min, r_max),
                       CoordSpec::angle("theta", kTau)}),
      std::move(excl));

  std::vector<SmoothFn> a = lifted_fiber_coeffs(fiber);
  a.push_back(constant_fn(0.0));
  a.push_back(make_smooth([sign, rho, m](const auto& x) {
    auto r = x[static_cast<size_t>(m)];
    return static_cast<double>(sign) * rho * r * r;
  }));

  std::string name = std::string("geiges-normal") + (sign > 0 ? "+" : "-");
  std::vector<int> fidx(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) fidx[static_cast<size_t>(i)] = i;
  return ContactFibration{name,
                          ContactForm(chart, DifferentialForm(chart, 1, std::move(a)),
                                      DiffBackend::duals(), sign, name),
                          fiber,
                          std::move(fidx),
                          {m, m + 1}};
}

double geiges_restriction_residual(const GluedFibration& gf, int side, int nsamples) {
  if (side != 1 && side != -1)
    throw std::invalid_argument("geiges_restriction_residual: side must be +-1");
  const ContactForm& total = gf.fib.total;
  const ContactForm& fiber = gf.fib.fiber;
  int m = gf.fib.fiber_dim();
  int n = total.chart()->dim();
  double u_half = std::sqrt((0.5 - gf.profile.r0) / (1.0 - gf.profile.r0));

  SampleSpec spec;
  spec.count = static_cast<size_t>(nsamples);
  spec.box = chart_bounds_box(*fiber.chart());
  spec.box.lo.push_back(u_half + 0.02);
  spec.box.hi.push_back(1.0);
  spec.box.lo.push_back(0.0);
  spec.box.hi.push_back(kTau);

  double worst = 0.0;
  for (const auto& x0 : draw_box_samples(spec)) {
    std::vector<double> x = x0;
    x[static_cast<size_t>(m)] *= side;  // mirror onto the requested plateau
    std::vector<double> got = total.alpha_frame(std::span<const double>(x));
    std::vector<double> fcoords(x.begin(), x.begin() + m);
    std::vector<double> want = fiber.alpha_frame(std::span<const double>(fcoords));
    want.push_back(0.0);
    double r = gf.profile.r_of_u(x[static_cast<size_t>(m)]);
    want.push_back(side * gf.rho_g * r * r);
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::fabs(got[static_cast<size_t>(i)] -
                                        want[static_cast<size_t>(i)]));
  }
  return worst;
}

BasePath geiges_cross_path(double omega) {
  BasePath p;
  p.name = "geiges-cross";
  p.pos = [omega](double t) -> std::array<double, 2> {
    return {-1.0 + 2.0 * t, omega * kPi * t};
  };
  p.vel = [omega](double) -> std::array<double, 2> { return {2.0, omega * kPi}; };
  return p;
}

// ---------------------------------------------------------------------------
// Holonomy measurement

HolonomyMeasurement measure_holonomy(const ContactFibration& fib, const BasePath& path,
                                     const std::vector<std::vector<double>>& fiber_starts,
                                     const LiftOptions& opts, int time_samples) {
  HolonomyMeasurement out;
  LiftOptions o = opts;
  o.checkpoints = std::max(2, time_samples);
  int m = fib.fiber_dim();
  int n = fib.total.chart()->dim();

  for (const auto& start : fiber_starts) {
    Trajectory tr = lift_path(fib, path, start, {}, o);
    if (!tr.complete) {
      out.complete = false;
      continue;
    }
    for (size_t k = 0; k < tr.times.size(); ++k) {
      double t = tr.times[k];
      const std::vector<double>& p = tr.fiber_states[k];
      std::array<double, 2> u = path_velocity(path, t);
      std::vector<double> x = fib.embed(p, path.pos(t));

      std::vector<double> X = horizontal_lift<double>(fib, std::span<const double>(x), u);
      std::vector<double> af = fib.fiber.alpha_frame(std::span<const double>(p));
      double H = 0.0;
      for (int i = 0; i < m; ++i)
        H += af[static_cast<size_t>(i)] * X[static_cast<size_t>(fib.fiber_idx[i])];
      out.sup_H = std::max(out.sup_H, std::fabs(H));

      double grad2 = 0.0;
      for (int j = 0; j < m; ++j) {
        std::vector<D1> xd(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) xd[static_cast<size_t>(i)] = D1(x[static_cast<size_t>(i)]);
        xd[static_cast<size_t>(fib.fiber_idx[j])].d = 1.0;
        std::vector<D1> Xd = horizontal_lift<D1>(fib, std::span<const D1>(xd), u);
        std::vector<D1> pd(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i)
          pd[static_cast<size_t>(i)] = xd[static_cast<size_t>(fib.fiber_idx[i])];
        std::vector<D1> afd = fib.fiber.alpha_frame(std::span<const D1>(pd));
        D1 Hd(0.0);
        for (int i = 0; i < m; ++i)
          Hd = Hd + afd[static_cast<size_t>(i)] * Xd[static_cast<size_t>(fib.fiber_idx[i])];
        grad2 += Hd.d * Hd.d;
      }
      out.sup_dH = std::max(out.sup_dH, std::sqrt(grad2));
    }
  }
  return out;
}

HolonomyFit fit_linear_through_origin(std::span<const double> xs,
                                      std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("fit_linear_through_origin: mismatched data");
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
    syy += ys[i] * ys[i];
  }
  HolonomyFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double res = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double d = ys[i] - fit.slope * xs[i];
    res += d * d;
  }
  fit.residual_rel = syy > 0.0 ? std::sqrt(res / syy) : 0.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Doubled loop with detour

namespace {

// Zero-velocity seams make the concatenation C^1 as one path.
double seam(double t) { return smoothstep_cubic(t); }
double seam_dot(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 6.0 * t * (1.0 - t);
}

BasePath radial_piece(double delta, std::array<double, 2> dir, double r_in, double r_out) {
  BasePath p;
  p.name = "radial";
  p.pos = [=](double t) -> std::array<double, 2> {
    double r = (r_in + (r_out - r_in) * seam(t)) * delta;
    return {r * dir[0], r * dir[1]};
  };
  p.vel = [=](double t) -> std::array<double, 2> {
    double dr = (r_out - r_in) * seam_dot(t) * delta;
    return {dr * dir[0], dr * dir[1]};
  };
  return p;
}

// Quarter arc theta: 0 -> pi/2 with r(theta) = 3 delta/4 + (delta/5) sin(2 theta).
BasePath bulge_arc(double delta) {
  BasePath p;
  p.name = "bulge-arc";
  p.pos = [delta](double t) -> std::array<double, 2> {
    double th = 0.5 * kPi * seam(t);
    double r = delta * (0.75 + 0.2 * std::sin(2.0 * th));
    return {r * std::cos(th), r * std::sin(th)};
  };
  p.vel = [delta](double t) -> std::array<double, 2> {
    double th = 0.5 * kPi * seam(t);
    double dth = 0.5 * kPi * seam_dot(t);
    double r = delta * (0.75 + 0.2 * std::sin(2.0 * th));
    double dr = delta * 0.4 * std::cos(2.0 * th) * dth;
    return {dr * std::cos(th) - r * std::sin(th) * dth,
            dr * std::sin(th) + r * std::cos(th) * dth};
  };
  return p;
}

// Arc of the circle r = rr from angle a0 to a1, seam-reparametrized.
BasePath reroute_arc(double rr, double a0, double a1) {
  BasePath p;
  p.name = "reroute-arc";
  p.pos = [=](double t) -> std::array<double, 2> {
    double th = a0 + (a1 - a0) * seam(t);
    return {rr * std::cos(th), rr * std::sin(th)};
  };
  p.vel = [=](double t) -> std::array<double, 2> {
    double dth = (a1 - a0) * seam_dot(t);
    double th = a0 + (a1 - a0) * seam(t);
    return {-rr * std::sin(th) * dth, rr * std::cos(th) * dth};
  };
  return p;
}

// Point reflection through the origin. Composed with reverse_piece below it
// yields a second lobe of opposite orientation, so the two lobe areas cancel.
BasePath negate_piece(BasePath inner) {
  auto shared = std::make_shared<BasePath>(std::move(inner));
  BasePath p;
  p.name = shared->name + "-mirrored";
  p.t0 = shared->t0;
  p.t1 = shared->t1;
  p.pos = [shared](double t) -> std::array<double, 2> {
    auto q = shared->pos(t);
    return {-q[0], -q[1]};
  };
  p.vel = [shared](double t) -> std::array<double, 2> {
    auto v = path_velocity(*shared, t);
    return {-v[0], -v[1]};
  };
  return p;
}

BasePath reverse_piece(BasePath inner) {
  auto shared = std::make_shared<BasePath>(std::move(inner));
  BasePath p;
  p.name = shared->name + "-reversed";
  p.t0 = shared->t0;
  p.t1 = shared->t1;
  p.pos = [shared](double t) -> std::array<double, 2> {
    return shared->pos(shared->t0 + shared->t1 - t);
  };
  p.vel = [shared](double t) -> std::array<double, 2> {
    auto v = path_velocity(*shared, shared->t0 + shared->t1 - t);
    return {-v[0], -v[1]};
  };
  return p;
}

}  // namespace

BasePath section5_path_symmetric(double delta) {
  std::vector<BasePath> pieces;
  pieces.push_back(radial_piece(delta, {1.0, 0.0}, 0.0, 0.75));
  pieces.push_back(bulge_arc(delta));
  pieces.push_back(radial_piece(delta, {0.0, 1.0}, 0.75, 0.0));
  // Second lobe: reflected image run backwards, so gamma(1-t) = -gamma(t)
  // and the enclosed signed areas of the two lobes cancel exactly.
  for (int k = 2; k >= 0; --k)
    pieces.push_back(negate_piece(reverse_piece(pieces[static_cast<size_t>(k)])));
  return concat_paths("double-loop", std::move(pieces));
}

BasePath section5_path(double delta, double rho) {
  if (!(rho < 0.25 * delta))
    throw std::invalid_argument("section5_path: detour radius must sit below delta/4");
  double rr = std::max(0.125 * delta, 1.2 * rho);
  double rhat = rr / delta;  // radial_piece scales by delta
  std::vector<BasePath> pieces;
  pieces.push_back(radial_piece(delta, {1.0, 0.0}, rhat, 0.75));
  pieces.push_back(bulge_arc(delta));
  pieces.push_back(radial_piece(delta, {0.0, 1.0}, 0.75, rhat));
  // Both passes through the crossing detour around the removed disk at
  // radius rr. In this planar chart the two half circles overlap; on the
  // glued surface the strands separate, and the only chart-level contract
  // is staying outside the removed disk.
  pieces.push_back(reroute_arc(rr, 0.5 * kPi, -0.5 * kPi));
  for (int k = 2; k >= 0; --k)
    pieces.push_back(negate_piece(reverse_piece(pieces[static_cast<size_t>(k)])));
  pieces.push_back(reroute_arc(rr, kPi, 0.0));
  return concat_paths("double-loop-detour", std::move(pieces));
}

// ---------------------------------------------------------------------------
// Catalog

std::vector<std::string> catalog_names() {
  return {"std-r3",  "ot-r3",     "ot-r3-cart", "std-product",
          "std-product-cart", "prescribed", "bourgeois",  "geiges-glued"};
}

ContactForm catalog_form(const std::string& name) {
  if (name == "std-r3") return std_r3_form();
  if (name == "ot-r3") return ot_r3_form();
  if (name == "ot-r3-cart") return ot_r3_cart_form();
  if (name == "std-product" || name == "std-product-cart" || name == "prescribed" ||
      name == "bourgeois" || name == "geiges-glued")
    return catalog_fibration(name).total;
  throw std::invalid_argument("catalog_form: unknown name '" + name + "'");
}

ContactFibration catalog_fibration(const std::string& name) {
  if (name == "std-product") return std_product(ot_r3_form());
  if (name == "std-product-cart") return std_product_cart(ot_r3_cart_form());
  if (name == "prescribed") {
    MonodromyPrescription presc;
    presc.family = family_constant(0.02);
    return prescribe_monodromy(presc, std_r3_form(2.0)).fib;
  }
  if (name == "bourgeois") return bourgeois_fibration(s3_open_book(), 0.05);
  if (name == "geiges-glued") return geiges_glued(std_r3_form(12.0)).fib;
  throw std::invalid_argument("catalog_fibration: unknown name '" + name + "'");
}

}  // namespace contactlab
