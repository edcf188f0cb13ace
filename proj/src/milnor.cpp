#include "contactlab/milnor.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "contactlab/sampling.hpp"

namespace contactlab {

namespace {

template <class T>
std::vector<T> cx_unpack(const CxTriple<T>& z) {
  return {z[0].re, z[0].im, z[1].re, z[1].im, z[2].re, z[2].im};
}

SmoothFn map_component(SmoothMap m, int k) {
  auto sh = std::make_shared<SmoothMap>(std::move(m));
  SmoothFn s;
  s.f0 = [sh, k](std::span<const double> x) { return sh->m0(x)[static_cast<size_t>(k)]; };
  if (sh->m1)
    s.f1 = [sh, k](std::span<const D1> x) { return sh->m1(x)[static_cast<size_t>(k)]; };
  if (sh->m2)
    s.f2 = [sh, k](std::span<const D2> x) { return sh->m2(x)[static_cast<size_t>(k)]; };
  return s;
}

// Largest Wirtinger anti-holomorphic residual of the map (u, v) over the
// three complex slots, via partials of the component functions.
double dbar_residual(const SmoothFn& u, const SmoothFn& v, std::span<const double> x,
                     const DiffBackend& be) {
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) {
    int a = 2 * j, b = 2 * j + 1;
    double ua = fn_partial(u, x, a, be), ub = fn_partial(u, x, b, be);
    double va = fn_partial(v, x, a, be), vb = fn_partial(v, x, b, be);
    double rr = 0.5 * (ua - vb);
    double ri = 0.5 * (va + ub);
    worst = std::max(worst, std::hypot(rr, ri));
  }
  return worst;
}

// Gaussian direction through Box-Muller so the sphere sampling is isotropic.
std::vector<double> sphere_point(SeededUniform& rng, int dim, double radius) {
  std::vector<double> p(static_cast<size_t>(dim));
  for (int i = 0; i < dim; i += 2) {
    double u1 = rng.next(), u2 = rng.next();
    while (u1 <= 1e-300) u1 = rng.next();
    double m = std::sqrt(-2.0 * std::log(u1));
    p[static_cast<size_t>(i)] = m * std::cos(6.283185307179586 * u2);
    if (i + 1 < dim) p[static_cast<size_t>(i) + 1] = m * std::sin(6.283185307179586 * u2);
  }
  double n = 0.0;
  for (double c : p) n += c * c;
  n = std::sqrt(n);
  if (n < 1e-12) return sphere_point(rng, dim, radius);
  for (double& c : p) c *= radius / n;
  return p;
}

struct Grad2 {
  std::array<double, 2> val;
  std::array<std::array<double, 6>, 2> jac;  // rows u, v
};

Grad2 eval_with_grad(const SmoothFn& u, const SmoothFn& v, std::span<const double> x,
                     const DiffBackend& be) {
  Grad2 g;
  g.val = {u.f0(x), v.f0(x)};
  for (int j = 0; j < 6; ++j) {
    g.jac[0][static_cast<size_t>(j)] = fn_partial(u, x, j, be);
    g.jac[1][static_cast<size_t>(j)] = fn_partial(v, x, j, be);
  }
  return g;
}

double dot6(const std::array<double, 6>& a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < 6; ++i) s += a[i] * b[i];
  return s;
}

double tangential_norm(const std::array<double, 6>& grad, std::span<const double> x,
                       double radius) {
  double rad = dot6(grad, x) / radius;
  double full = 0.0;
  for (double c : grad) full += c * c;
  double t2 = full - rad * rad;
  return t2 > 0.0 ? std::sqrt(t2) : 0.0;
}

// Great-circle interpolation between two points of the same sphere.
std::vector<double> slerp(std::span<const double> a, std::span<const double> b,
                          double radius, double s) {
  double c = 0.0;
  for (size_t i = 0; i < a.size(); ++i) c += a[i] * b[i];
  c /= radius * radius;
  c = std::clamp(c, -1.0, 1.0);
  double th = std::acos(c);
  double sth = std::sin(th);
  std::vector<double> out(a.size());
  double wa = std::sin((1.0 - s) * th) / sth, wb = std::sin(s * th) / sth;
  double n = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    out[i] = wa * a[i] + wb * b[i];
    n += out[i] * out[i];
  }
  n = std::sqrt(n);
  for (double& c2 : out) c2 *= radius / n;
  return out;
}

}  // namespace

ChartPtr chart_c3(double bound) {
  std::vector<CoordSpec> coords;
  const char* names[6] = {"re1", "im1", "re2", "im2", "re3", "im3"};
  for (int i = 0; i < 6; ++i) coords.push_back(CoordSpec::linear(names[i], -bound, bound));
  return std::make_shared<ChartManifold>("c3", std::move(coords));
}

SmoothMap milnor_g_map() {
  return make_smooth_map(2, [](const auto& x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    auto w = milnor_g(cx_pack(std::span<const T>(x)));
    return std::vector<T>{w.re, w.im};
  });
}

SmoothMap milnor_mirror_map() {
  return make_smooth_map(6, [](const auto& x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    return cx_unpack(milnor_mirror(cx_pack(std::span<const T>(x))));
  });
}

SmoothMap milnor_ge_map() {
  return make_smooth_map(2, [](const auto& x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    auto w = milnor_g(milnor_mirror(cx_pack(std::span<const T>(x))));
    return std::vector<T>{w.re, w.im};
  });
}

SmoothMap milnor_f2_map() {
  return make_smooth_map(2, [](const auto& x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    auto w = milnor_f2(Cx<T>(x[0], x[1]), Cx<T>(x[2], x[3]));
    return std::vector<T>{w.re, w.im};
  });
}

MilnorData make_milnor_data(double eps_m, double delta_m) {
  if (!(eps_m > 0.0) || !(delta_m > 0.0))
    throw std::invalid_argument("make_milnor_data: radii must be positive");
  MilnorData md{milnor_f2_map(), milnor_g_map(), milnor_mirror_map(), milnor_ge_map(),
                eps_m, delta_m, 1e-3};
  return md;
}

std::array<std::array<std::array<double, 2>, 3>, 3> milnor_hessian_origin() {
  std::array<std::array<std::array<double, 2>, 3>, 3> H{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      // nested duals: outer slot differentiates along a_j, inner along a_i
      CxTriple<D2> z;
      for (int k = 0; k < 3; ++k) {
        z[static_cast<size_t>(k)].re =
            D2(D1(0.0, k == i ? 1.0 : 0.0), D1(k == j ? 1.0 : 0.0, 0.0));
        z[static_cast<size_t>(k)].im = D2(D1(0.0), D1(0.0));
      }
      Cx<D2> F = milnor_g(milnor_mirror(z));
      H[static_cast<size_t>(i)][static_cast<size_t>(j)] = {F.re.d.d, F.im.d.d};
    }
  }
  return H;
}

MilnorReport milnor_checks(const MilnorData& md, int samples, uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("milnor_checks: need samples");
  MilnorReport rep;
  DiffBackend be = DiffBackend::duals();

  SmoothFn ge_u = map_component(md.ge, 0), ge_v = map_component(md.ge, 1);
  SmoothFn g_u = map_component(md.g, 0), g_v = map_component(md.g, 1);
  SmoothFn f2_u = map_component(md.f2, 0), f2_v = map_component(md.f2, 1);

  auto Hm = milnor_hessian_origin();
  {
    // det over the first rows by cofactor expansion, complex arithmetic
    auto at = [&Hm](int i, int j) {
      return Cx<double>(Hm[static_cast<size_t>(i)][static_cast<size_t>(j)][0],
                        Hm[static_cast<size_t>(i)][static_cast<size_t>(j)][1]);
    };
    Cx<double> det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
                     at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
                     at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    rep.hessian_det = {det.re, det.im};
    rep.hessian_nondegenerate = std::sqrt(abs2(det)) > 1e-8;
  }

  SeededUniform rng(seed);
  const double eps = md.eps_m;
  const double floor_g = md.link_margin * eps * eps;
  std::vector<double> link_pt(6, 0.0);
  link_pt[0] = eps;  // the polynomial vanishes on the first axis

  rep.min_phase_rank = 1e300;
  rep.min_tube_angle = 1e300;

  int accepted = 0;
  long budget = static_cast<long>(samples) * 64 + 1024;
  while (accepted < samples && budget-- > 0) {
    std::vector<double> z = sphere_point(rng, 6, eps);
    auto gz = md.g.m0(z);
    double mod = std::hypot(gz[0], gz[1]);
    if (mod <= floor_g) {
      ++rep.excluded_near_link;
      continue;
    }
    ++accepted;

    rep.max_dbar = std::max(rep.max_dbar, dbar_residual(ge_u, ge_v, z, be));
    rep.dbar_g_control = std::max(rep.dbar_g_control, dbar_residual(g_u, g_v, z, be));

    // phase differential of the angle of g, tangentially to the sphere
    Grad2 G = eval_with_grad(g_u, g_v, z, be);
    std::array<double, 6> dtheta{};
    double m2 = G.val[0] * G.val[0] + G.val[1] * G.val[1];
    for (size_t j = 0; j < 6; ++j)
      dtheta[j] = (G.val[0] * G.jac[1][j] - G.val[1] * G.jac[0][j]) / m2;
    rep.min_phase_rank = std::min(rep.min_phase_rank, tangential_norm(dtheta, z, eps));

    // restriction to the plane: third slot zeroed, compare against the germ
    std::vector<double> plane = {z[0], z[1], z[2], z[3], 0.0, 0.0};
    std::vector<double> head(plane.begin(), plane.begin() + 4);
    double du = g_u.f0(plane) - f2_u.f0(head);
    double dv = g_v.f0(plane) - f2_v.f0(head);
    rep.restriction_residual = std::max(rep.restriction_residual, std::hypot(du, dv));

    // walk the great circle toward a link point until the tube radius is met
    auto gez = md.ge.m0(z);
    double mod_ge = std::hypot(gez[0], gez[1]);
    double align = 0.0;
    for (size_t i = 0; i < 6; ++i) align += z[i] * link_pt[i];
    if (mod_ge > md.delta_m && std::fabs(align) < 0.99 * eps * eps) {
      double lo = 0.0, hi = 1.0;  // |ge| crosses delta_m between the ends
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        auto q = slerp(z, link_pt, eps, mid);
        auto gq = md.ge.m0(q);
        (std::hypot(gq[0], gq[1]) > md.delta_m ? lo : hi) = mid;
      }
      auto q = slerp(z, link_pt, eps, 0.5 * (lo + hi));
      Grad2 T = eval_with_grad(ge_u, ge_v, q, be);
      std::array<double, 6> dm{};
      for (size_t j = 0; j < 6; ++j)
        dm[j] = 2.0 * (T.val[0] * T.jac[0][j] + T.val[1] * T.jac[1][j]);
      double full = 0.0;
      for (double c : dm) full += c * c;
      full = std::sqrt(full);
      if (full > 0.0) {
        double tang = tangential_norm(dm, q, eps);
        rep.min_tube_angle = std::min(rep.min_tube_angle, tang / full);
        ++rep.tube_point_count;
      }
    }
  }
  rep.sample_count = accepted;

  rep.pass = accepted == samples && rep.hessian_nondegenerate && rep.max_dbar <= 1e-12 &&
             rep.dbar_g_control > 0.1 && rep.restriction_residual == 0.0 &&
             rep.min_phase_rank > 1e-3 && rep.tube_point_count > 0 &&
             rep.min_tube_angle > 0.2;
  return rep;
}

}  // namespace contactlab
