#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "mplab/gallery.hpp"
#include "mplab/rng.hpp"
#include "mplab/scales.hpp"
#include "mplab/transport.hpp"
#include "test_helpers.hpp"

using namespace mplab;
using namespace mplab::testing;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

LatticeMeasure point_mass(int d, int n, std::size_t cell) {
  std::size_t cells = 1;
  for (int t = 0; t < d; ++t) cells *= static_cast<std::size_t>(n);
  std::vector<std::int64_t> nums(cells, 0);
  nums[cell] = 1;
  return make_lattice_measure(d, n, 1, std::move(nums));
}
}  // namespace

TEST_CASE("grid ball spaces") {
  const auto seg = grid_ball_space(1, 5, kInf);
  CHECK(seg.size() == 5);
  CHECK(distance_spectrum(seg, 1).values == std::vector<double>{0.5, 1.0, 1.5, 2.0});
  CHECK(seg.validate().ok());

  CHECK(grid_ball_space(2, 5, kInf).size() == 25);
  CHECK(grid_ball_space(2, 5, 1.0).size() == 13);
  const auto disc = grid_ball_space(2, 9, 2.0);
  CHECK(disc.validate().ok());
  CHECK(disc.size() == 49);

  CHECK_THROWS_AS(grid_ball_space(1, 4, kInf), std::domain_error);
  CHECK_THROWS_AS(grid_ball_space(2, 201, kInf), std::domain_error);
}

TEST_CASE("hamming cubes") {
  const auto cube = hamming_cube(2);
  CHECK(cube.size() == 4);
  CHECK(distance_spectrum(cube, 1).values == std::vector<double>{1.0, 2.0});
  CHECK(cube.validate().ok());
  CHECK_THROWS_AS(hamming_cube(13), std::domain_error);
}

TEST_CASE("fg cube distances and cylinders") {
  const auto space = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 2));
  CHECK(space.dist(1, 0, 1) == 0.25);
  CHECK(space.dist(1, 0, 2) == 0.5);
  CHECK(space.dist(1, 0, 3) == 0.5);
  CHECK(space.validate().ok());
  CHECK(space.single_metric());

  // rho1-ball of radius f(k) is the cylinder fixing the first k-1
  // coordinates, hence has 2^(L-k+1) points.
  const auto prof = UltrametricProfile::baire(2.0, 4);
  const auto big = fg_ultrametric_cube(prof);
  for (std::size_t k = 1; k <= 4; ++k) {
    for (PointId x : {PointId{0}, PointId{5}, PointId{15}}) {
      CHECK(ball(big, 1, x, prof.f[k - 1]).size() ==
            (std::size_t{1} << (4 - k + 1)));
    }
  }
}

TEST_CASE("closed forms at alpha = ln 2 on the dyadic cube") {
  const auto prof = UltrametricProfile::baire(2.0, 10);
  const auto forms = theorem64_closed_forms(prof, kLn2);
  REQUIRE(forms.entropic.has_value());
  CHECK(*forms.entropic == 0.5);
  CHECK(forms.entropic_k0 == 1);
  CHECK(forms.diametric == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
  CHECK(forms.diametric_argmax == 1);
  CHECK(forms.truncation_safe);
}

TEST_CASE("closed forms flag boundary optima as truncation-unsafe") {
  const auto prof = UltrametricProfile::baire(2.0, 4);
  const auto forms = theorem64_closed_forms(prof, std::pow(2.0, 20.0));
  CHECK_FALSE(forms.truncation_safe);
}

TEST_CASE("scan equals closed forms on truncation-safe profiles") {
  const std::vector<UltrametricProfile> profiles = {
      UltrametricProfile::baire(2.0, 6),
      UltrametricProfile::geometric(2.0, 4.0, 6)};
  for (const auto& prof : profiles) {
    const auto space = fg_ultrametric_cube(prof);
    ScaleEngine engine(space);
    for (double alpha : {0.25, 1.0, 4.0}) {
      const auto forms = theorem64_closed_forms(prof, alpha);
      if (!forms.truncation_safe) continue;
      CHECK(engine.entropic(alpha).value == *forms.entropic);
      CHECK(engine.diametric(alpha).value ==
            doctest::Approx(forms.diametric).epsilon(1e-12));
    }
  }
}

TEST_CASE("dyadic baire scales track min(1/alpha, 1) within recorded constants") {
  const auto prof = UltrametricProfile::baire(2.0, 10);
  for (double alpha = 0.125; alpha <= 64.0; alpha *= 2.0) {
    const auto forms = theorem64_closed_forms(prof, alpha);
    REQUIRE(forms.entropic.has_value());
    const double target = std::min(1.0 / alpha, 1.0);
    CHECK(*forms.entropic >= target / 16.0);
    CHECK(*forms.entropic <= target * 16.0);
    CHECK(forms.diametric >= target / 16.0);
    CHECK(forms.diametric <= target * 16.0);
  }
}

TEST_CASE("w1 distances on simple pairs") {
  // Point masses at 1/4 and 1/2 on the d=1, n=4 grid.
  const auto a = point_mass(1, 4, 0);
  const auto b = point_mass(1, 4, 1);
  const auto r = w1_distance(a, b);
  CHECK(r.num == 1);
  CHECK(r.den == 4);

  // Half mass at 1/4 and 3/4 versus all mass at 1/4: move 1/2 across 1/2.
  const auto mix = make_lattice_measure(1, 4, 2, {1, 0, 1, 0});
  const auto delta = make_lattice_measure(1, 4, 1, {1, 0, 0, 0});
  const auto r2 = w1_distance(mix, delta);
  CHECK(r2.num == 1);
  CHECK(r2.den == 4);

  CHECK(w1_distance(mix, mix).num == 0);
}

TEST_CASE("w1 rejects mismatched grids and oversized supports") {
  CHECK_THROWS_AS(w1_distance(point_mass(1, 4, 0), point_mass(1, 5, 0)),
                  std::invalid_argument);
}

TEST_CASE("lattice measure space") {
  const auto list = lattice_measure_list(1, 4, 4);
  CHECK(list.size() == 35);
  const auto space = lattice_measure_space(1, 4, 4);
  CHECK(space.size() == 35);
  CHECK(space.validate().ok());

  // Entropic scale is non-increasing in alpha.
  ScaleEngine engine(space);
  double prev = 1e300;
  for (double alpha : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double e = engine.entropic(alpha).value;
    CHECK(e <= prev + 1e-15);
    prev = e;
  }
  CHECK_THROWS_AS(lattice_measure_space(2, 4, 8), std::domain_error);
}

TEST_CASE("wasserstein cover structure") {
  const auto c1 = wasserstein_cover(1, 0.5);
  CHECK(c1.n == 4);
  CHECK(c1.cells() == 4);
  REQUIRE(c1.lambda_count.has_value());
  CHECK(*c1.lambda_count == 35);
  CHECK(c1.path_length == doctest::Approx(0.75));
  CHECK(c1.path_length <= 1.0);

  const auto c2 = wasserstein_cover(2, 0.5);
  CHECK(c2.cells() == 16);
  CHECK(*c2.lambda_count == 300540195ull);
  CHECK(c2.path_length == doctest::Approx(3.75));
  CHECK(c2.path_length <= 4.0);
  // Consecutive snake cells are one grid step apart.
  for (std::size_t k = 0; k + 1 < c2.salesman_path.size(); ++k) {
    const std::size_t a = c2.salesman_path[k], b = c2.salesman_path[k + 1];
    const auto probe = point_mass(2, 4, a);
    int linf = 0;
    for (int t = 0; t < 2; ++t) {
      linf = std::max(linf, std::abs(probe.icoord(a, t) - probe.icoord(b, t)));
    }
    CHECK(linf == 1);
  }
}

TEST_CASE("binomial strings") {
  CHECK(binomial_string(7, 3) == "35");
  CHECK(binomial_string(15, 7) == "6435");
  CHECK(binomial_string(31, 15) == "300540195");
  CHECK(binomial_string(127, 63) ==
        "11975573020964041433067793888190275875");
}

TEST_CASE("lambda count equals the composition count for small grids") {
  // Weights in multiples of 1/|S| on |S| cells: compositions of |S|.
  for (int cells : {4, 8}) {
    const auto list = lattice_measure_list(1, cells, cells);
    const auto c = wasserstein_cover(1, 2.0 / static_cast<double>(cells));
    REQUIRE(static_cast<int>(c.cells()) == cells);
    CHECK(std::to_string(list.size()) == c.lambda_count_str);
  }
}

TEST_CASE("round_to_cover fixes points of the cover and rounds everything else") {
  const auto cover = wasserstein_cover(1, 0.5);
  // Already a multiple of 1/4 everywhere: unchanged.
  const auto inside = make_lattice_measure(1, 4, 4, {1, 1, 1, 1});
  const auto rounded = round_to_cover(inside, cover);
  CHECK(rounded.nums == std::vector<std::int64_t>{1, 1, 1, 1});
  CHECK(rounded.den == 4);

  // (0.3, 0.3, 0.2, 0.2) rounds to (1/4, 1/4, 1/4, 1/4) along the path.
  const auto nu = make_lattice_measure(1, 4, 10, {3, 3, 2, 2});
  const auto out = round_to_cover(nu, cover);
  CHECK(out.den == 4);
  CHECK(out.nums == std::vector<std::int64_t>{1, 1, 1, 1});
  const auto dist = w1_distance(nu, out);
  CHECK(static_cast<double>(dist.num) / static_cast<double>(dist.den) <= 0.25);
}

TEST_CASE("round_to_cover on random rational measures stays within 1/n") {
  for (const auto& [d, gamma] : std::vector<std::pair<int, double>>{{1, 0.5}, {2, 0.5}}) {
    const auto cover = wasserstein_cover(d, gamma);
    const std::size_t cells = cover.cells();
    CounterRng rng(2024 + static_cast<std::uint64_t>(d));
    for (int it = 0; it < 50; ++it) {
      const std::int64_t den = 8 + static_cast<std::int64_t>(rng.next_below(56));
      std::vector<std::int64_t> nums(cells, 0);
      for (std::int64_t unit = 0; unit < den; ++unit) {
        nums[rng.next_below(cells)] += 1;
      }
      const auto nu = make_lattice_measure(d, cover.n, den, std::move(nums));
      const auto out = round_to_cover(nu, cover);
      // Output lies in the cover lattice: denominators divide |S|.
      CHECK(out.den == static_cast<std::int64_t>(cells));
      const auto dist = w1_distance(nu, out);
      // Exact comparison: num/den <= 1/n  <=>  num * n <= den.
      CHECK(dist.num * cover.n <= dist.den);
    }
  }
}

TEST_CASE("lipschitz net space") {
  const auto space = lipschitz_net_space(3, 1.0 / 3.0);
  CHECK(space.size() == 27);
  CHECK(space.validate().ok());
  // The zero function is within sup distance 1 of everything.
  PointId zero = space.size();
  for (PointId i = 0; i < space.size(); ++i) {
    if (space.labels()[i] == "0,0,0,0") zero = i;
  }
  REQUIRE(zero < space.size());
  for (PointId i = 0; i < space.size(); ++i) {
    CHECK(space.dist(1, zero, i) <= 1.0 + 1e-15);
  }

  CHECK(lipschitz_net_space(4, 0.25).size() == 81);
  CHECK_THROWS_AS(lipschitz_net_space(9, 1.0 / 9.0), std::domain_error);
}

TEST_CASE("random closure spaces are metric and reproducible") {
  const auto a = random_closure_space(12, 5);
  const auto b = random_closure_space(12, 5);
  CHECK(a.matrix(1) == b.matrix(1));
  CHECK(a.validate().ok());
  CHECK_FALSE(random_closure_space(12, 6).matrix(1) == a.matrix(1));
}
