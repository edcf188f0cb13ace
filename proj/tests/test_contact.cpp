#include "doctest.h"

#include <cmath>

#include "contactlab/contact.hpp"
#include "contactlab/sampling.hpp"

using namespace contactlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

ChartPtr r3_cart() {
  return std::make_shared<ChartManifold>(
      "r3-cart", std::vector<CoordSpec>{CoordSpec::linear("x", -8, 8),
                                        CoordSpec::linear("y", -8, 8),
                                        CoordSpec::linear("z", -8, 8)});
}

ChartPtr r3_cyl() {
  return std::make_shared<ChartManifold>(
      "r3-cyl",
      std::vector<CoordSpec>{CoordSpec::linear("r", 0.0, 8.0),
                             CoordSpec::angle("theta", 2 * kPi),
                             CoordSpec::linear("z", -8, 8)},
      std::vector<ExcludedRegion>{
          {"axis", [](std::span<const double> x) { return x[0] < 1e-3; }}});
}

// standard form dz + x dy
ContactForm std_form() {
  auto c = r3_cart();
  DifferentialForm a(c, 1,
                     {constant_fn(0.0), make_smooth([](auto x) { return x[0]; }),
                      constant_fn(1.0)});
  return ContactForm(c, std::move(a), DiffBackend::duals(), +1, "std-cart");
}

// cos(r) dz + r sin(r) dtheta on the cylindrical chart
ContactForm twisted_form() {
  auto c = r3_cyl();
  DifferentialForm a(c, 1,
                     {constant_fn(0.0),
                      make_smooth([](auto x) { return x[0] * contactlab::sin(x[0]); }),
                      make_smooth([](auto x) { return contactlab::cos(x[0]); })});
  return ContactForm(c, std::move(a), DiffBackend::duals(), +1, "twisted-cyl");
}
}  // namespace

TEST_CASE("volume density of the twisted form matches the closed form") {
  ContactForm cf = twisted_form();
  // alpha ^ dalpha = (r + sin r cos r) dr^dtheta^dz
  for (double r : {0.5, 1.0, 2.2, 4.0}) {
    std::vector<double> x = {r, 1.1, 0.3};
    double expected = r + std::sin(r) * std::cos(r);
    CHECK(cf.volume_density(x) == doctest::Approx(expected).epsilon(1e-11));
  }
  // frozen value at r = 1
  std::vector<double> x1 = {1.0, 0.0, 0.0};
  CHECK(cf.volume_density(x1) == doctest::Approx(1.4546487134128408).epsilon(1e-12));
}

TEST_CASE("verify_contact passes for contact forms and fails for a degenerate form") {
  ContactForm cf = std_form();
  SampleSpec spec;
  spec.count = 200;
  spec.box = {{-2, -2, -2}, {2, 2, 2}};
  auto samples = draw_samples(cf.chart(), spec);
  auto res = verify_contact(cf, samples);
  CHECK(res.pass);
  CHECK(res.min_abs >= res.threshold);

  // dz alone is totally degenerate
  auto c = r3_cart();
  DifferentialForm dz(c, 1, {constant_fn(0.0), constant_fn(0.0), constant_fn(1.0)});
  ContactForm bad(c, std::move(dz), DiffBackend::duals(), +1, "degenerate");
  auto res2 = verify_contact(bad, draw_samples(c, spec));
  CHECK_FALSE(res2.pass);
}

TEST_CASE("Reeb field of the standard form is d/dz with dual derivatives zero") {
  ContactForm cf = std_form();
  std::vector<double> x = {0.7, -0.3, 0.2};
  auto R = reeb_components(cf, std::span<const double>(x));
  CHECK(R[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(R[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(R[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(reeb_residual(cf, x, R) <= 1e-14);

  std::vector<D1> xd = {{0.7, 1.0}, {-0.3, 0.0}, {0.2, 0.0}};
  auto Rd = reeb_components(cf, std::span<const D1>(xd));
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(Rd[i].d) <= 1e-13);
}

TEST_CASE("Reeb field of the twisted form matches the closed-form components") {
  ContactForm cf = twisted_form();
  auto theta_comp = [](double r) {
    return std::sin(r) / (r + std::sin(r) * std::cos(r));
  };
  auto z_comp = [](double r) {
    return (std::sin(r) + r * std::cos(r)) / (r + std::sin(r) * std::cos(r));
  };
  for (double r : {0.3, 1.0, 2.0, kPi, 5.0}) {
    std::vector<double> x = {r, 0.8, -1.0};
    auto R = reeb_components(cf, std::span<const double>(x));
    CHECK(R[0] == doctest::Approx(0.0).epsilon(1e-11));
    CHECK(R[1] == doctest::Approx(theta_comp(r)).epsilon(1e-10));
    CHECK(R[2] == doctest::Approx(z_comp(r)).epsilon(1e-10));
    CHECK(reeb_residual(cf, x, R) <= 1e-10);
  }
  // frozen: z-component flips sign; -1 at r = pi, +1 in the limit r -> 0
  std::vector<double> xpi = {kPi, 0.0, 0.0};
  auto Rpi = reeb_components(cf, std::span<const double>(xpi));
  CHECK(Rpi[2] == doctest::Approx(-1.0).epsilon(1e-12));
  std::vector<double> x0 = {2e-3, 0.0, 0.0};
  auto R0 = reeb_components(cf, std::span<const double>(x0));
  CHECK(R0[2] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("Reeb solve reports degenerate systems") {
  auto c = r3_cart();
  DifferentialForm dz(c, 1, {constant_fn(0.0), constant_fn(0.0), constant_fn(1.0)});
  ContactForm bad(c, std::move(dz), DiffBackend::duals(), +1, "degenerate");
  std::vector<double> x = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(reeb_components(bad, std::span<const double>(x)), SingularSystemError);
}

TEST_CASE("Hamiltonian field solves its defining equations") {
  ContactForm cf = std_form();
  // H = x: for alpha = dz + x dy the field is d/dy + x d/dz... check via residual
  SmoothFn H = make_smooth([](auto x) { return x[0]; });
  std::vector<double> x = {0.4, 1.2, -0.9};
  auto X = hamiltonian_components(cf, H, std::span<const double>(x));
  CHECK(X[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(X[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(X[2] == doctest::Approx(0.0).epsilon(1e-12));
  auto res = hamiltonian_residual(cf, H, x);
  CHECK(res.alpha_eq <= 1e-12);
  CHECK(res.dalpha_eq <= 1e-12);

  // a messier H on the twisted form, residual still at solver precision
  ContactForm tw = twisted_form();
  SmoothFn H2 = make_smooth([](auto x) {
    return contactlab::sin(x[1]) * x[0] + 0.2 * x[2];
  });
  std::vector<double> y = {1.3, 0.7, 0.1};
  auto res2 = hamiltonian_residual(tw, H2, y);
  CHECK(res2.alpha_eq <= 1e-10);
  CHECK(res2.dalpha_eq <= 1e-10);
}

TEST_CASE("Hamiltonian solver rejects non-contact input") {
  auto c = r3_cart();
  DifferentialForm dz(c, 1, {constant_fn(0.0), constant_fn(0.0), constant_fn(1.0)});
  ContactForm bad(c, std::move(dz), DiffBackend::duals(), +1, "degenerate");
  SmoothFn H = make_smooth([](auto x) { return x[0]; });
  std::vector<double> x = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(hamiltonian_components(bad, H, std::span<const double>(x)),
                  SingularSystemError);
}

TEST_CASE("identity map is a contactomorphism, a shear is not") {
  ContactForm cf = std_form();
  ChartMap id{cf.chart(), cf.chart(), make_smooth_map(3, [](auto x) {
                using T = std::remove_cvref_t<decltype(x[0])>;
                return std::vector<T>{x[0], x[1], x[2]};
              })};
  SampleSpec spec;
  spec.count = 64;
  spec.box = {{-2, -2, -2}, {2, 2, 2}};
  auto samples = draw_samples(cf.chart(), spec);
  auto ok = check_contactomorphism(cf, cf, id, samples);
  CHECK(ok.pass);
  CHECK(ok.max_lambda_dev <= 1e-12);

  // (x,y,z) -> (x, y + z, z) does not preserve ker(dz + x dy)
  ChartMap shear{cf.chart(), cf.chart(), make_smooth_map(3, [](auto x) {
                   using T = std::remove_cvref_t<decltype(x[0])>;
                   return std::vector<T>{x[0], x[1] + x[2], x[2]};
                 })};
  auto badres = check_contactomorphism(cf, cf, shear, samples);
  CHECK_FALSE(badres.pass);
}

TEST_CASE("isotropic check accepts a Legendrian curve and flags a transverse one") {
  ContactForm cf = std_form();
  auto dom = std::make_shared<ChartManifold>(
      "param", std::vector<CoordSpec>{CoordSpec::linear("t", -1.0, 1.0)});
  // x = t, y = t^2, z = -t^3 * 2/3... need dz = -x dy: z' = -t * 2t = -2t^2,
  // z = -(2/3) t^3: Legendrian lift of y = x^2.
  ParamImmersion leg{dom, cf.chart(), make_smooth_map(3, [](auto s) {
                       using T = std::remove_cvref_t<decltype(s[0])>;
                       T t = s[0];
                       return std::vector<T>{t, t * t, -(2.0 / 3.0) * t * t * t};
                     })};
  std::vector<std::vector<double>> params;
  for (int i = 0; i <= 20; ++i) params.push_back({-0.9 + 1.8 * i / 20.0});
  auto res = check_isotropic(cf, leg, params);
  CHECK(res.pass);
  CHECK(res.max_violation <= 1e-10);

  ParamImmersion trans{dom, cf.chart(), make_smooth_map(3, [](auto s) {
                         using T = std::remove_cvref_t<decltype(s[0])>;
                         return std::vector<T>{s[0], T(0.0), s[0]};
                       })};
  auto res2 = check_isotropic(cf, trans, params);
  CHECK_FALSE(res2.pass);
  CHECK(res2.max_violation > 0.1);
}
