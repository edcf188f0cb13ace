#include "doctest.h"

#include <cmath>

#include "contactlab/milnor.hpp"
#include "contactlab/sampling.hpp"

using namespace contactlab;

namespace {

Cx<double> hand_poly(const CxTriple<double>& z) {
  // plain holomorphic expansion of the mirrored polynomial
  return z[0] * z[1] + z[0] * z[2] + z[1] * z[2];
}

CxTriple<double> random_triple(SeededUniform& rng) {
  CxTriple<double> z;
  for (auto& c : z) c = {2.0 * rng.next() - 1.0, 2.0 * rng.next() - 1.0};
  return z;
}

}  // namespace

TEST_CASE("mirror is an involutive isometry") {
  SeededUniform rng(5);
  for (int i = 0; i < 20; ++i) {
    auto z = random_triple(rng);
    auto w = milnor_mirror(milnor_mirror(z));
    double n1 = 0.0, n2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      CHECK(w[static_cast<size_t>(k)].re == z[static_cast<size_t>(k)].re);
      CHECK(w[static_cast<size_t>(k)].im == z[static_cast<size_t>(k)].im);
      n1 += abs2(z[static_cast<size_t>(k)]);
      n2 += abs2(milnor_mirror(z)[static_cast<size_t>(k)]);
    }
    CHECK(n1 == n2);
  }
}

TEST_CASE("composition equals the symmetric quadratic polynomial") {
  SeededUniform rng(6);
  for (int i = 0; i < 30; ++i) {
    auto z = random_triple(rng);
    auto lhs = milnor_g(milnor_mirror(z));
    auto rhs = hand_poly(z);
    CHECK(lhs.re == doctest::Approx(rhs.re).epsilon(1e-15));
    CHECK(lhs.im == doctest::Approx(rhs.im).epsilon(1e-15));
  }
}

TEST_CASE("restriction to the plane is the two-variable germ, exactly") {
  SmoothMap g = milnor_g_map();
  SmoothMap f2 = milnor_f2_map();
  SeededUniform rng(7);
  for (int i = 0; i < 30; ++i) {
    std::vector<double> h = {2.0 * rng.next() - 1.0, 2.0 * rng.next() - 1.0,
                             2.0 * rng.next() - 1.0, 2.0 * rng.next() - 1.0};
    std::vector<double> full = {h[0], h[1], h[2], h[3], 0.0, 0.0};
    auto a = g.m0(full);
    auto b = f2.m0(h);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
  }
}

TEST_CASE("hessian at the origin is the frozen symmetric matrix") {
  auto H = milnor_hessian_origin();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double want = i == j ? 0.0 : 1.0;
      CHECK(H[static_cast<size_t>(i)][static_cast<size_t>(j)][0] ==
            doctest::Approx(want).epsilon(1e-13));
      CHECK(std::fabs(H[static_cast<size_t>(i)][static_cast<size_t>(j)][1]) <= 1e-13);
    }
  }
}

TEST_CASE("full check report on default data") {
  MilnorData md = make_milnor_data();
  MilnorReport rep = milnor_checks(md, 300, 11);
  CHECK(rep.pass);
  CHECK(rep.sample_count == 300);
  CHECK(rep.max_dbar <= 1e-13);
  CHECK(rep.dbar_g_control > 0.3);
  CHECK(rep.hessian_det[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::fabs(rep.hessian_det[1]) <= 1e-12);
  CHECK(rep.hessian_nondegenerate);
  CHECK(rep.restriction_residual == 0.0);
  CHECK(rep.min_phase_rank > 0.1);
  CHECK(rep.tube_point_count > 200);
  CHECK(rep.min_tube_angle > 0.8);
}

TEST_CASE("phase differential carries no radial component") {
  // the angle map is degree-zero homogeneous, so its gradient is tangential
  SmoothMap ge = milnor_ge_map();
  SeededUniform rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> z(6);
    for (auto& c : z) c = 2.0 * rng.next() - 1.0;
    auto val = ge.m0(z);
    double m2 = val[0] * val[0] + val[1] * val[1];
    if (m2 < 1e-4) continue;
    double radial = 0.0;
    for (int j = 0; j < 6; ++j) {
      std::vector<D1> seeded(6);
      for (int k = 0; k < 6; ++k)
        seeded[static_cast<size_t>(k)] = D1(z[static_cast<size_t>(k)], k == j ? 1.0 : 0.0);
      auto dv = ge.m1(seeded);
      double dtheta = (val[0] * dv[1].d - val[1] * dv[0].d) / m2;
      radial += dtheta * z[static_cast<size_t>(j)];
    }
    CHECK(std::fabs(radial) <= 1e-12);
  }
}

TEST_CASE("ball chart has the advertised shape") {
  ChartPtr c = chart_c3();
  CHECK(c->dim() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK_FALSE(c->coord(i).periodic);
    CHECK(c->coord(i).lo == -10.0);
    CHECK(c->coord(i).hi == 10.0);
  }
  CHECK_THROWS_AS(make_milnor_data(0.0), std::invalid_argument);
}
