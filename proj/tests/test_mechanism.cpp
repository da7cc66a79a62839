#include <cmath>
#include <map>

#include "doctest.h"
#include "mplab/gallery.hpp"
#include "mplab/mechanism.hpp"
#include "mplab/rng.hpp"
#include "test_helpers.hpp"

using namespace mplab;
using namespace mplab::testing;

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

TEST_CASE("two-point exponential mechanism has the 3/4 - 1/4 distribution") {
  const auto space = make_two_point();
  const double alpha = 2.0 * std::log(3.0);
  const auto mech = build_exponential(space, alpha);
  // The default net scale is zero here, so the net is the whole space.
  REQUIRE(mech.net.size() == 2);
  const auto dist = output_distribution(mech, 0);
  CHECK(dist.support[0].second == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(dist.support[1].second == doctest::Approx(0.25).epsilon(1e-15));

  const auto acc = exact_accuracy(mech, space);
  CHECK(acc.sup_error == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(acc.per_input[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("single-point space gives the identity mechanism") {
  const auto space = make_single_point();
  const auto mech = build_exponential(space, 1.0);
  CHECK(exact_accuracy(mech, space).sup_error == 0.0);
  CHECK(sample(mech, 0, 123) == 0);
}

TEST_CASE("line with the default net collapses and audits at zero slope") {
  const auto line = make_line(4);
  const auto mech = build_exponential(line, kLn2);
  CHECK(mech.net.size() == 1);  // entropic scale at alpha/3 spans the diameter
  const auto audit = audit_privacy(mech, line);
  CHECK(audit.max_slope <= kLn2 / 2.0 + 1e-12);
  CHECK(audit.pass);
}

TEST_CASE("exponential audits pass across spaces and alphas") {
  const std::vector<FiniteBimetricSpace> spaces = {
      make_line(4), hamming_cube(3),
      fg_ultrametric_cube(UltrametricProfile::baire(2.0, 4)),
      random_closure_space(10, 3)};
  for (const auto& space : spaces) {
    for (double alpha : {0.25, 1.0, 4.0}) {
      const auto mech = build_exponential(space, alpha);
      const auto audit = audit_privacy(mech, space);
      CHECK(audit.pass);
      CHECK(audit.max_slope <= alpha * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("relaxed distance on the baire square") {
  const auto space = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 2));
  // sigma(00, 11) with ball radius 1/4: the rho2-ball around 11 is {10,11},
  // both at rho1 distance 1/2 from 00.
  CHECK(relaxed_distance(space, 0, 3, 0.25) == 0.5);
  CHECK(relaxed_distance(space, 0, 1, 0.25) == 0.0);
}

TEST_CASE("relaxed mechanism on the baire square") {
  const auto space = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 2));
  const auto mech = build_ultrametric_relaxed(space, kLn2, 0.25);
  CHECK(mech.net == std::vector<PointId>{0, 2});
  // sigma to the other cylinder is 1/2, within the own cylinder 0.
  CHECK(mech.log_weight(0, 0) == 0.0);
  CHECK(mech.log_weight(0, 1) == -kLn2 * 0.5 / 2.0);
  const auto audit = audit_privacy(mech, space);
  CHECK(audit.pass);
}

TEST_CASE("relaxed mechanism with a spanning radius degenerates to one point") {
  const auto space = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 2));
  const auto mech = build_ultrametric_relaxed(space, 1.0, 0.5);
  CHECK(mech.net.size() == 1);
  for (PointId x = 0; x < space.size(); ++x) {
    CHECK(sample(mech, x, 99) == mech.net[0]);
  }
}

TEST_CASE("relaxed mechanism rejects spaces without the ultrametric claim") {
  const auto line = make_line(4);
  CHECK_THROWS_AS(build_ultrametric_relaxed(line, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("relaxed audit passes on a deeper cube") {
  const auto space = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 6));
  const auto mech = build_ultrametric_relaxed(space, kLn2);
  const auto audit = audit_privacy(mech, space);
  CHECK(audit.pass);
  CHECK(audit.max_slope <= kLn2 * (1.0 + 1e-9));
}

TEST_CASE("constant mechanism") {
  const auto line = make_line(4);
  const auto mech = build_constant(line, 1);
  CHECK(audit_privacy(mech, line).max_slope == 0.0);
  CHECK(exact_accuracy(mech, line).sup_error == 2.0);
  for (std::uint64_t seed : {0ull, 17ull, 991ull}) {
    CHECK(sample(mech, 2, seed) == 1);
  }
}

TEST_CASE("nearest-floor rounding fails the audit with a finite witness") {
  const auto line = make_line(4);
  const auto bad = build_nearest_floor(line, kLn2, 1.5);
  REQUIRE(bad.net.size() == 2);
  const auto audit = audit_privacy(bad, line);
  CHECK_FALSE(audit.pass);
  CHECK(std::isfinite(audit.max_slope));
  CHECK(audit.max_slope > kLn2);
}

TEST_CASE("audit slope is invariant under relabeling") {
  const auto space = random_closure_space(8, 13);
  const auto mech = build_exponential(space, 1.5);
  const double slope = audit_privacy(mech, space).max_slope;

  // Reverse the point order.
  const std::size_t n = space.size();
  std::vector<double> rho(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = space.labels()[n - 1 - i];
    for (std::size_t j = 0; j < n; ++j) {
      rho[i * n + j] = space.dist(1, n - 1 - i, n - 1 - j);
    }
  }
  const FiniteBimetricSpace reversed(labels, rho, rho, false);
  const auto mech2 = build_exponential(reversed, 1.5, mech.net_s);
  CHECK(audit_privacy(mech2, reversed).max_slope == doctest::Approx(slope).epsilon(1e-12));
}

TEST_CASE("sampling matches the distribution and is reproducible") {
  const auto space = make_two_point();
  const auto mech = build_exponential(space, 2.0 * std::log(3.0));
  std::size_t hits = 0;
  const std::size_t trials = 100000;
  for (std::size_t t = 0; t < trials; ++t) {
    if (sample(mech, 0, derive_seed(4242, 0, t)) == 0) ++hits;
  }
  const double freq = static_cast<double>(hits) / static_cast<double>(trials);
  const double sigma = std::sqrt(0.75 * 0.25 / static_cast<double>(trials));
  CHECK(std::abs(freq - 0.75) <= 3.0 * sigma);
  // Bit-identical rerun.
  for (std::size_t t = 0; t < 100; ++t) {
    CHECK(sample(mech, 0, derive_seed(4242, 0, t)) ==
          sample(mech, 0, derive_seed(4242, 0, t)));
  }
}

TEST_CASE("monte-carlo accuracy agrees with the exact value") {
  const auto space = make_two_point();
  const auto mech = build_exponential(space, 2.0 * std::log(3.0));
  const auto exact = exact_accuracy(mech, space);
  const auto mc = accuracy_mc(mech, space, 10000, 7);
  REQUIRE(mc.sup_stderr.has_value());
  CHECK(std::abs(mc.sup_error - exact.sup_error) <= 3.0 * *mc.sup_stderr);

  // Single trial: no standard error.
  const auto one = accuracy_mc(mech, space, 1, 7);
  CHECK_FALSE(one.sup_stderr.has_value());
  CHECK(one.per_input_stderr.empty());

  // Constant mechanism: zero variance, exact agreement.
  const auto cm = build_constant(space, 0);
  const auto cmc = accuracy_mc(cm, space, 50, 3);
  CHECK(cmc.sup_error == exact_accuracy(cm, space).sup_error);
  CHECK(*cmc.sup_stderr == 0.0);
}

TEST_CASE("monte-carlo reruns are bit-identical") {
  const auto space = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 3));
  const auto mech = build_ultrametric_relaxed(space, 1.0);
  const auto a = accuracy_mc(mech, space, 500, 99);
  const auto b = accuracy_mc(mech, space, 500, 99);
  CHECK(a.per_input == b.per_input);
  CHECK(a.sup_error == b.sup_error);
}

TEST_CASE("output distributions normalize even at extreme alpha") {
  const auto space = make_line(4);
  const auto mech = build_exponential(space, 5000.0, 0.0);
  for (PointId x = 0; x < space.size(); ++x) {
    const auto dist = output_distribution(mech, x);
    double total = 0.0;
    for (const auto& [_, p] : dist.support) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto audit = audit_privacy(mech, space);
  CHECK(audit.pass);
}

TEST_CASE("mechanism summary json") {
  const auto space = make_line(4);
  const auto mech = build_exponential(space, 1.0, 1.5);
  const auto j = mech.summary_json();
  CHECK(j.at("kind") == "exponential");
  CHECK(j.at("alpha") == 1.0);
  CHECK(j.at("net_s") == 1.5);
  CHECK(j.at("net").size() == mech.net.size());
}
