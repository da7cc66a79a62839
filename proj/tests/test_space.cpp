#include <cmath>
#include <limits>

#include "doctest.h"
#include "mplab/gallery.hpp"
#include "mplab/space.hpp"
#include "test_helpers.hpp"

using namespace mplab;
using namespace mplab::testing;

TEST_CASE("line space validates cleanly") {
  const auto space = make_line(4);
  CHECK(space.validate().ok());
  CHECK(space.single_metric());
}

TEST_CASE("triangle violation is reported with a witness") {
  // rho2[0][2] = 3 while rho2[0][1] = rho2[1][2] = 1.
  std::vector<double> rho1{0, 1, 2, 1, 0, 1, 2, 1, 0};
  std::vector<double> rho2{0, 1, 3, 1, 0, 1, 3, 1, 0};
  const FiniteBimetricSpace space({"0", "1", "2"}, rho1, rho2, false);
  const auto report = space.validate();
  CHECK_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.axiom == "triangle" && v.metric_index == 2 && v.i == 0 && v.j == 1 && v.k == 2) {
      found = true;
      CHECK(v.lhs == doctest::Approx(3.0));
      CHECK(v.rhs == doctest::Approx(2.0));
    }
  }
  CHECK(found);
}

TEST_CASE("baire square passes the ultrametric check") {
  const auto space = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 2));
  CHECK(space.ultrametric2_claimed());
  CHECK(space.validate().ok());
  CHECK(is_ultrametric(space, 1));
  CHECK(is_ultrametric(space, 2));
}

TEST_CASE("structural errors throw") {
  CHECK_THROWS_AS(FiniteBimetricSpace({"a", "b"}, {0, 1, 1, 0}, {0, 1}, false),
                  std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(FiniteBimetricSpace({"a", "b"}, {0, nan, nan, 0}, {0, 1, 1, 0}, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(FiniteBimetricSpace({"a", "b"}, {0, -1, -1, 0}, {0, 1, 1, 0}, false),
                  std::invalid_argument);
}

TEST_CASE("zero distance between distinct points is a violation, not a merge") {
  const FiniteBimetricSpace space({"a", "b"}, {0, 0, 0, 0}, {0, 1, 1, 0}, false);
  const auto report = space.validate();
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations.front().axiom == "positivity");
}

TEST_CASE("balls") {
  const auto line = make_line(4);
  CHECK(ball(line, 1, 1, 1.0) == std::vector<PointId>{0, 1, 2});
  CHECK(ball(line, 1, 2, 0.0) == std::vector<PointId>{2});

  // Baire square: the rho1-ball of radius 1/4 around 00 is the cylinder
  // fixing the first coordinate.
  const auto baire = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 2));
  REQUIRE(baire.labels()[0] == "00");
  REQUIRE(baire.labels()[1] == "01");
  CHECK(ball(baire, 1, 0, 0.25) == std::vector<PointId>{0, 1});

  CHECK_THROWS_AS(ball(line, 1, 0, -1.0), std::domain_error);
}

TEST_CASE("ball monotone in radius and piecewise constant between spectrum values") {
  const auto space = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 3));
  const auto spec = distance_spectrum(space, 1).values;
  for (PointId x = 0; x < space.size(); ++x) {
    std::vector<PointId> prev;
    for (std::size_t t = 0; t < spec.size(); ++t) {
      const auto b = ball(space, 1, x, spec[t]);
      if (!prev.empty()) {
        CHECK(std::includes(b.begin(), b.end(), prev.begin(), prev.end()));
      }
      // Constant on [spec[t], next).
      const double mid = (t + 1 < spec.size()) ? (spec[t] + spec[t + 1]) / 2.0
                                               : spec[t] * 1.25;
      CHECK(ball(space, 1, x, mid) == b);
      prev = b;
    }
  }
}

TEST_CASE("diameter") {
  const auto line = make_line(4);
  CHECK(diameter(line, 1, all_ids(line)) == 3.0);
  CHECK(diameter(line, 1, {2}) == 0.0);
  CHECK_THROWS_AS(diameter(line, 1, {}), std::domain_error);

  const auto baire = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 2));
  CHECK(diameter(baire, 2, {0, 1}) == 0.25);
}

TEST_CASE("diameter of a ball is at most twice the radius") {
  const auto space = grid_ball_space(1, 9, std::numeric_limits<double>::infinity());
  const auto spec = distance_spectrum(space, 1).values;
  for (PointId x = 0; x < space.size(); ++x) {
    for (double r : spec) {
      CHECK(diameter(space, 1, ball(space, 1, x, r)) <= 2.0 * r + 1e-15);
    }
  }
}

TEST_CASE("distance spectra") {
  CHECK(distance_spectrum(make_line(4), 1).values == std::vector<double>{1, 2, 3});
  const auto baire = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 2));
  CHECK(distance_spectrum(baire, 2).values == std::vector<double>{0.25, 0.5});
  const auto cube = hamming_cube(3);
  CHECK(distance_spectrum(cube, 1).values == std::vector<double>{1, 2, 3});
  CHECK(distance_spectrum(make_single_point(), 1).values.empty());
}

TEST_CASE("ultrametric balls: every point is a center") {
  const auto space = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 4));
  const auto spec = distance_spectrum(space, 2).values;
  for (PointId x = 0; x < space.size(); ++x) {
    for (double r : spec) {
      const auto bx = ball(space, 2, x, r);
      for (PointId y : bx) {
        CHECK(ball(space, 2, y, r) == bx);
      }
    }
  }
}

TEST_CASE("space json round trip") {
  const auto space = fg_ultrametric_cube(UltrametricProfile::geometric(2.0, 3.0, 3));
  const auto j = space.to_json();
  const auto back = FiniteBimetricSpace::from_json(j);
  CHECK(back.size() == space.size());
  CHECK(back.labels() == space.labels());
  CHECK(back.matrix(1) == space.matrix(1));
  CHECK(back.matrix(2) == space.matrix(2));
  CHECK(back.ultrametric2_claimed() == space.ultrametric2_claimed());
}

TEST_CASE("missing rho2 defaults to rho1") {
  nlohmann::json j;
  j["labels"] = {"a", "b"};
  j["rho1"] = {{0.0, 1.0}, {1.0, 0.0}};
  const auto space = FiniteBimetricSpace::from_json(j);
  CHECK(space.single_metric());
  CHECK(space.dist(2, 0, 1) == 1.0);
}
