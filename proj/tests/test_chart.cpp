#include "doctest.h"

#include <cmath>

#include "contactlab/chart.hpp"

using namespace contactlab;

namespace {
ChartPtr cyl_chart() {
  double pi = 3.14159265358979323846;
  return std::make_shared<ChartManifold>(
      "cyl", std::vector<CoordSpec>{CoordSpec::linear("r", 0.0, 10.0),
                                    CoordSpec::angle("theta", 2 * pi),
                                    CoordSpec::linear("z", -5.0, 5.0)},
      std::vector<ExcludedRegion>{
          {"axis", [](std::span<const double> x) { return x[0] < 1e-3; }}});
}
}  // namespace

TEST_CASE("periodic coordinates normalize into their window") {
  auto c = cyl_chart();
  double pi = 3.14159265358979323846;
  Point p = make_point(c, {1.0, -0.5, 0.0});
  CHECK(p.x[1] == doctest::Approx(2 * pi - 0.5).epsilon(1e-14));
  Point q = make_point(c, {1.0, 7.0, 0.0});
  CHECK(q.x[1] == doctest::Approx(7.0 - 2 * pi).epsilon(1e-14));
  CHECK(q.x[1] >= 0.0);
  CHECK(q.x[1] < 2 * pi);
}

TEST_CASE("excluded regions and bounds raise EvaluationError") {
  auto c = cyl_chart();
  CHECK_THROWS_AS(make_point(c, {1e-4, 0.3, 0.0}), EvaluationError);
  CHECK_THROWS_AS(make_point(c, {1.0, 0.3, 9.0}), EvaluationError);
  CHECK_NOTHROW(make_point(c, {2e-3, 0.3, 0.0}));
  try {
    make_point(c, {1e-4, 0.3, 0.0});
  } catch (const EvaluationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("cyl") != std::string::npos);
    CHECK(msg.find("axis") != std::string::npos);
  }
}

TEST_CASE("coord_delta wraps across the period seam") {
  auto c = cyl_chart();
  double pi = 3.14159265358979323846;
  CHECK(c->coord_delta(1, 2 * pi - 0.1, 0.1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(c->coord_delta(1, 0.1, 2 * pi - 0.1) == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(c->coord_delta(0, 1.0, 2.5) == doctest::Approx(1.5).epsilon(1e-14));
  double d = chart_distance(*c, std::vector<double>{1.0, 2 * pi - 0.1, 0.0},
                            std::vector<double>{1.0, 0.1, 0.0});
  CHECK(d == doctest::Approx(0.2).epsilon(1e-12));
}
