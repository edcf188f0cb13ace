#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>

#include "contactlab/constructions.hpp"
#include "contactlab/sampling.hpp"

using namespace contactlab;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTau = 2.0 * kPi;

std::vector<Point> fiber_box_samples(const ChartPtr& chart, SampleBox box, size_t count,
                                     uint64_t seed = 0) {
  SampleSpec spec;
  spec.count = count;
  spec.seed = seed;
  spec.box = std::move(box);
  return draw_samples(chart, spec);
}

}  // namespace

TEST_CASE("catalog serves every advertised name and rejects unknowns") {
  for (const auto& name : catalog_names()) {
    ContactForm cf = catalog_form(name);
    CHECK(cf.chart()->dim() % 2 == 1);
  }
  CHECK_THROWS_AS(catalog_form("no-such-form"), std::invalid_argument);
  CHECK_THROWS_AS(catalog_fibration("std-r3"), std::invalid_argument);
}

TEST_CASE("closed-form Reeb field of the overtwisted form matches the solver") {
  ContactForm cf = ot_r3_form();
  SeededUniform rng(3);
  for (int i = 0; i < 40; ++i) {
    double r = 0.1 + 2.9 * rng.next();
    std::vector<double> x = {r, rng.next() * kTau, 2.0 * rng.next() - 1.0};
    auto R = reeb_components(cf, std::span<const double>(x));
    auto C = ot_reeb_closed_form(r);
    for (int k = 0; k < 3; ++k)
      CHECK(std::fabs(R[static_cast<size_t>(k)] - C[static_cast<size_t>(k)]) <= 1e-10);
  }
}

TEST_CASE("vertical Reeb component: signs at landmarks and sign-change radii") {
  CHECK(ot_reeb_closed_form(1e-7)[2] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ot_reeb_closed_form(kPi)[2] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(ot_reeb_closed_form(kTau)[2] == doctest::Approx(1.0).epsilon(1e-13));
  auto roots = ot_reeb_sign_change_radii(9.0);
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(2.028757838110434).epsilon(1e-11));
  CHECK(roots[1] == doctest::Approx(4.913180439434884).epsilon(1e-11));
  CHECK(roots[2] == doctest::Approx(7.978665712413241).epsilon(1e-11));
}

TEST_CASE("cylindrical and cartesian overtwisted forms agree away from the axis") {
  ContactForm cyl = ot_r3_form();
  ContactForm cart = ot_r3_cart_form();
  // compare alpha on matched tangent vectors at r=1.3, theta=0.6
  double r = 1.3, th = 0.6, z = -0.4;
  std::vector<double> xc = {r * std::cos(th), r * std::sin(th), z};
  std::vector<double> xp = {r, th, z};
  auto ac = cart.alpha_frame(std::span<const double>(xc));
  auto ap = cyl.alpha_frame(std::span<const double>(xp));
  // d/dr in cartesian components
  double a_r_cart = ac[0] * std::cos(th) + ac[1] * std::sin(th);
  // d/dtheta in cartesian components
  double a_th_cart = ac[0] * (-r * std::sin(th)) + ac[1] * (r * std::cos(th));
  CHECK(a_r_cart == doctest::Approx(ap[0]).epsilon(1e-12));
  CHECK(a_th_cart == doctest::Approx(ap[1]).epsilon(1e-12));
  CHECK(ac[2] == doctest::Approx(ap[2]).epsilon(1e-12));
}

TEST_CASE("product lift drops rotational velocity by -r^2 along the fiber Reeb") {
  ContactFibration fib = std_product(ot_r3_form());
  std::vector<double> p = {1.3, 0.7, 0.2};
  std::array<double, 2> base = {0.6, 1.1};
  std::vector<double> x = fib.embed(p, base);
  auto Xth = horizontal_lift<double>(fib, std::span<const double>(x), {0.0, 1.0});
  auto R0 = reeb_components(fib.fiber, std::span<const double>(p));
  for (size_t i = 0; i < 3; ++i)
    CHECK(Xth[i] == doctest::Approx(-0.36 * R0[i]).epsilon(1e-9));
  auto Xr = horizontal_lift<double>(fib, std::span<const double>(x), {1.0, 0.0});
  for (size_t i = 0; i < 3; ++i) CHECK(std::fabs(Xr[i]) <= 1e-12);
}

TEST_CASE("circle monodromy equals the fiber Reeb flow at time -2 area") {
  ContactFibration fib = std_product(ot_r3_form());
  BasePath loop = polar_circle(0.5);
  std::vector<double> start = {1.0, 0.0, 0.0};
  LiftOptions o;
  o.total_steps = 3000;
  Trajectory tr = lift_path(fib, loop, start, {}, o);
  REQUIRE(tr.complete);
  auto ref = flow_reeb(fib.fiber, start, -2.0 * kPi * 0.25, 3000);
  CHECK(chart_distance(*fib.fiber.chart(), tr.end_state(), ref) <= 1e-8);
}

TEST_CASE("fourier loop stays in its band and closes up") {
  BasePath loop = polar_fourier_loop(2, 0.6, 0.25);
  for (int i = 0; i <= 100; ++i) {
    double r = loop.pos(i / 100.0)[0];
    CHECK(r >= 0.35 - 1e-12);
    CHECK(r <= 0.85 + 1e-12);
  }
  CHECK(loop.pos(0.0)[0] == doctest::Approx(loop.pos(1.0)[0]).epsilon(1e-12));
}

TEST_CASE("fourier loop monodromy is conformal with factor one") {
  ContactFibration fib = std_product(ot_r3_form());
  LiftOptions o;
  o.total_steps = 2000;
  MonodromyMap mono(fib, polar_fourier_loop(4, 0.6, 0.25), o);
  auto pts = fiber_box_samples(fib.fiber.chart(),
                               SampleBox{{0.5, 0.0, -1.0}, {2.0, kTau, 1.0}}, 4);
  auto res = monodromy_conformal_check(mono, pts, 1e-4);
  CHECK(res.pass);
  CHECK(res.all_complete);
  CHECK(res.min_lambda > 0.0);
  CHECK(res.max_lambda_dev <= 1e-4);
}

TEST_CASE("zero prescription reproduces the product form exactly") {
  MonodromyPrescription presc;
  presc.family = family_constant(0.0);
  PrescribedFibration pf = prescribe_monodromy(presc, std_r3_form(2.0));
  CHECK(pf.sup_g == 0.0);
  CHECK(pf.sup_dg == 0.0);
  const SmoothFn& ar = pf.fib.total.alpha().coefficient(3);
  SeededUniform rng(11);
  for (int i = 0; i < 30; ++i) {
    std::vector<double> x = {2.0 * rng.next() - 1.0, 2.0 * rng.next() - 1.0,
                             2.0 * rng.next() - 1.0, 1.2 * rng.next(),
                             kTau * rng.next()};
    CHECK(ar.f0(x) == 0.0);
  }
}

TEST_CASE("prescribed coefficient vanishes identically outside the window") {
  MonodromyPrescription presc;
  presc.family = family_linear_x(0.05);
  PrescribedFibration pf = prescribe_monodromy(presc, std_r3_form(2.0));
  const SmoothFn& ar = pf.fib.total.alpha().coefficient(3);
  DiffBackend be = DiffBackend::duals();
  std::vector<std::vector<double>> outside = {
      {0.5, 0.5, 0.0, 0.20, 0.0},        // below the radial window
      {0.5, 0.5, 0.0, 0.80, 0.0},        // above it
      {0.5, 0.5, 0.0, 0.50, 0.9},        // angle out of the wedge
      {0.5, 0.5, 0.0, 0.50, kTau - 0.9}  // same, approached from below
  };
  for (const auto& x : outside) {
    CHECK(ar.f0(x) == 0.0);
    for (int j = 0; j < 5; ++j) CHECK(fn_partial(ar, x, j, be) == 0.0);
  }
  // and it is alive inside
  std::vector<double> inside = {0.5, 0.5, 0.0, 0.5, 0.0};
  CHECK(std::fabs(ar.f0(inside)) > 1e-4);
  CHECK(pf.sup_g > 1e-3);
}

TEST_CASE("constant prescription shifts the fiber by the prescribed Reeb time") {
  MonodromyPrescription presc;
  presc.family = family_constant(0.05);
  PrescribedFibration pf = prescribe_monodromy(presc, std_r3_form(2.0));
  BasePath seg = prescription_segment(1.0);
  std::vector<double> start = {0.3, -0.2, 0.1};
  LiftOptions o;
  o.total_steps = 3000;
  Trajectory tr = lift_path(pf.fib, seg, start, {}, o);
  REQUIRE(tr.complete);
  CHECK(tr.end_state()[0] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(tr.end_state()[1] == doctest::Approx(-0.2).epsilon(1e-9));
  CHECK(tr.end_state()[2] == doctest::Approx(0.15).epsilon(1e-7));
}

TEST_CASE("prescribed monodromy matches the independent family flow") {
  MonodromyPrescription presc;
  presc.family = family_linear_x(0.05);
  PrescribedFibration pf = prescribe_monodromy(presc, std_r3_form(2.0));
  BasePath seg = prescription_segment(1.0);
  std::vector<double> start = {0.4, 0.1, -0.3};
  LiftOptions o;
  o.total_steps = 3000;
  Trajectory tr = lift_path(pf.fib, seg, start, {}, o);
  REQUIRE(tr.complete);
  auto ref = flow_hamiltonian_family(pf.fib.fiber, presc.family, start, 2000);
  for (size_t i = 0; i < 3; ++i)
    CHECK(tr.end_state()[i] == doctest::Approx(ref[i]).epsilon(1e-7));
  // hand endpoint: X = 0.05 (d/dy + x d/dz) at frozen x
  CHECK(ref[0] == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(ref[1] == doctest::Approx(0.15).epsilon(1e-10));
  CHECK(ref[2] == doctest::Approx(-0.3 + 0.05 * 0.4).epsilon(1e-10));
}

TEST_CASE("prescription scale headroom sits in the expected bracket") {
  MonodromyPrescription presc;
  presc.family = family_constant(1.0);
  double eps = eps_delta_bisect(presc, std_r3_form(2.0), 256, 5, 1.0, 16);
  CHECK(eps > 0.03);
  CHECK(eps < 0.12);
}

TEST_CASE("bourgeois forms are contact for either sign and degenerate at zero") {
  OpenBookData ob = s3_open_book();
  SampleSpec spec;
  spec.count = 400;
  for (double eps : {0.05, -0.05}) {
    ContactForm cf = bourgeois_form(ob, eps);
    spec.box = chart_bounds_box(*cf.chart());
    auto pts = draw_samples(cf.chart(), spec);
    auto res = verify_contact(cf, pts);
    CHECK(res.pass);
    CHECK(res.orientation_consistent);
  }
  CHECK_THROWS_AS(bourgeois_form(ob, 0.0), std::invalid_argument);
  ContactForm flat = bourgeois_form_unchecked(ob, 0.0);
  spec.box = chart_bounds_box(*flat.chart());
  CHECK_FALSE(verify_contact(flat, draw_samples(flat.chart(), spec)).pass);
}

TEST_CASE("bourgeois volume density matches the hand formula") {
  OpenBookData ob = s3_open_book();
  double eps = 0.05;
  ContactForm cf = bourgeois_form(ob, eps);
  SeededUniform rng(17);
  for (int i = 0; i < 25; ++i) {
    double eta = 0.05 + (0.5 * kPi - 0.1) * rng.next();
    std::vector<double> x = {eta, kTau * rng.next(), kTau * rng.next(),
                             kTau * rng.next(), kTau * rng.next()};
    D1 rho_d = smooth_min_cap(D1(std::cos(eta), -std::sin(eta)), ob.rho_cap);
    double s = std::sin(eta), c = std::cos(eta);
    double expected =
        2.0 * eps * eps * rho_d.v * (rho_d.v * 2.0 * s * c - rho_d.d * s * s);
    CHECK(cf.volume_density(x) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("bourgeois coefficients never read the torus angles") {
  ContactForm cf = catalog_form("bourgeois");
  std::vector<double> x1 = {0.7, 1.1, 2.2, 0.3, 5.9};
  std::vector<double> x2 = {0.7, 1.1, 2.2, 4.0, 1.2};
  for (int i = 0; i < 5; ++i) {
    const SmoothFn& f = cf.alpha().coefficient(i);
    CHECK(f.f0(x1) == f.f0(x2));
  }
}

TEST_CASE("round fiber Reeb turns both open-book angles at unit rate") {
  OpenBookData ob = s3_open_book();
  std::vector<double> x = {0.9, 0.4, 3.3};
  auto R = reeb_components(ob.base, std::span<const double>(x));
  CHECK(std::fabs(R[0]) <= 1e-12);
  CHECK(R[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(R[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("torus holonomy is bounded by eps delta rho and scales linearly") {
  OpenBookData ob = s3_open_book();
  double delta = 0.3;
  BasePath seg = torus_segment(delta, 0.4);
  std::vector<std::vector<double>> starts = {{0.7, 0.3, 5.0}, {1.1, 2.0, 1.0}};
  LiftOptions o;
  o.total_steps = 1200;
  std::vector<double> epss = {0.01, 0.02, 0.04};
  std::vector<double> sups;
  for (double eps : epss) {
    auto hm = measure_holonomy(bourgeois_fibration(ob, eps), seg, starts, o, 33);
    REQUIRE(hm.complete);
    CHECK(hm.sup_H <= 1.05 * eps * delta * ob.rho_cap);
    sups.push_back(hm.sup_H);
  }
  auto fit = fit_linear_through_origin(epss, sups);
  CHECK(fit.residual_rel <= 0.05);
  CHECK(fit.slope > 0.0);
}

TEST_CASE("gluing profile certifies on the acceptance grid") {
  GluingProfile prof;
  auto rep = certify_profile(prof, 200);
  CHECK(rep.pass);
  CHECK(rep.min_dFdr >= -1e-12);
  CHECK(rep.min_dFdr_axis >= 0.999);
  CHECK(rep.max_z_dFdz <= 1e-15);
  CHECK(rep.min_grad_near_zero >= 0.25);
  CHECK(rep.max_plane_defect == 0.0);
  CHECK(rep.zeta_flat_exact);
}

TEST_CASE("profile parametrization rides the zero set and plateaus exactly") {
  GluingProfile prof;
  for (double u : {-0.99, -0.7, -0.3, 0.0, 0.2, 0.45, 0.57, 0.6, 0.8, 1.0}) {
    double r = prof.r_of_u(u), z = prof.z_of_u(u);
    CHECK(std::fabs(prof.F(r, z)) <= 1e-12);
    if (r >= 0.5) CHECK(std::fabs(z) == 1.0);
  }
  CHECK(prof.z_of_u(0.9) == 1.0);
  CHECK(prof.z_of_u(-0.9) == -1.0);
}

TEST_CASE("glued form is contact and restricts to the normal models exactly") {
  GluedFibration gf = geiges_glued(std_r3_form(12.0), 0.05);
  SampleSpec spec;
  spec.count = 400;
  spec.box = chart_bounds_box(*gf.fib.total.chart());
  auto pts = draw_samples(gf.fib.total.chart(), spec);
  auto res = verify_contact(gf.fib.total, pts);
  CHECK(res.pass);
  CHECK(geiges_restriction_residual(gf, +1) <= 1e-12);
  CHECK(geiges_restriction_residual(gf, -1) <= 1e-12);
}

TEST_CASE("crossing holonomy: radial is silent, helical scales with rho") {
  std::vector<std::vector<double>> starts = {{0.2, 0.1, 0.0}};
  LiftOptions o;
  o.total_steps = 1500;
  ContactForm fiber = std_r3_form(12.0);

  auto radial = measure_holonomy(geiges_glued(fiber, 0.05).fib, geiges_cross_path(0.0),
                                 starts, o, 17);
  REQUIRE(radial.complete);
  CHECK(radial.sup_H <= 1e-13);
  CHECK(radial.sup_dH <= 1e-13);

  std::vector<double> rhos = {0.02, 0.04, 0.08};
  std::vector<double> sups;
  for (double rho : rhos) {
    auto hm = measure_holonomy(geiges_glued(fiber, rho).fib, geiges_cross_path(1.0),
                               starts, o, 33);
    REQUIRE(hm.complete);
    CHECK(hm.sup_dH <= 1e-12);
    sups.push_back(hm.sup_H);
  }
  auto fit = fit_linear_through_origin(rhos, sups);
  CHECK(fit.residual_rel <= 0.02);
  CHECK(fit.slope > 2.5);
  CHECK(fit.slope < 3.5);
}

TEST_CASE("double loop cancels its lobe areas") {
  BasePath sym = section5_path_symmetric(1.0);
  // the reflected half runs backwards: gamma(1-t) = -gamma(t)
  for (double t : {0.05, 0.2, 0.41, 0.49}) {
    auto a = sym.pos(t);
    auto b = sym.pos(1.0 - t);
    // piece-local parameters are recovered by division, so allow rounding
    CHECK(b[0] == doctest::Approx(-a[0]).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(-a[1]).epsilon(1e-12));
  }
  CHECK(std::fabs(path_signed_area(sym, 16384)) <= 1e-9);
  // one lobe alone encloses, in closed form, half the integral of r(theta)^2
  // over the quarter arc r = 3/4 + (1/5) sin 2 theta; spokes contribute nothing
  double lobe = 0.5 * (0.5625 * 0.5 * kPi + 0.3 + 0.01 * kPi);
  BasePath half;
  half.name = "single-lobe";
  half.closed = true;
  half.grid_multiple = 3;
  half.pos = [sym](double t) { return sym.pos(0.5 * t); };
  half.vel = [sym](double t) -> std::array<double, 2> {
    auto v = path_velocity(sym, 0.5 * t);
    return {0.5 * v[0], 0.5 * v[1]};
  };
  CHECK(path_signed_area(half, 16384) == doctest::Approx(lobe).epsilon(1e-6));
}

TEST_CASE("detour keeps the loop outside the forbidden disk") {
  double rho = 1.0 / 16.0;
  BasePath det = section5_path(1.0, rho);
  double min_r = 1e300;
  for (int i = 0; i <= 4000; ++i) {
    auto q = det.pos(i / 4000.0);
    min_r = std::min(min_r, std::hypot(q[0], q[1]));
  }
  CHECK(min_r >= 0.125 - 1e-12);
  // lobes pair up under reflection: gamma(7/8 - t) = -gamma(t) off the detours
  for (double t : {0.05, 0.1875, 0.3, 0.37}) {
    auto a = det.pos(t);
    auto b = det.pos(0.875 - t);
    CHECK(b[0] == doctest::Approx(-a[0]).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(-a[1]).epsilon(1e-12));
  }
  auto p0 = det.pos(0.0);
  auto p1 = det.pos(1.0);
  CHECK(p0[0] == doctest::Approx(p1[0]).epsilon(1e-12));
  CHECK(std::fabs(p0[1] - p1[1]) <= 1e-12);
  CHECK_THROWS_AS(section5_path(1.0, 0.3), std::invalid_argument);
}

TEST_CASE("flow integrators reproduce hand endpoints") {
  ContactForm std3 = std_r3_form();
  auto p = flow_reeb(std3, {0.2, -0.5, 1.0}, 0.7, 100);
  CHECK(p[0] == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(p[1] == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(p[2] == doctest::Approx(1.7).epsilon(1e-13));

  SmoothFn H = make_smooth([](const auto& x) { return x[0]; });
  auto q = flow_hamiltonian(std3, H, {0.4, 0.0, 0.0}, 2.0, 200);
  CHECK(q[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(q[2] == doctest::Approx(0.8).epsilon(1e-12));

  // family H = t alone: flow along t dz, displacement one half
  SmoothFn fam = make_smooth([](const auto& x) { return x[3]; });
  auto w = flow_hamiltonian_family(std3, fam, {0.0, 0.0, 0.0}, 200);
  CHECK(w[2] == doctest::Approx(0.5).epsilon(1e-12));
}
