#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "mplab/gallery.hpp"
#include "mplab/harness.hpp"
#include "test_helpers.hpp"

using namespace mplab;
using namespace mplab::testing;

namespace {
constexpr double kLn2 = 0.6931471805599453;

SweepConfig line_config() {
  SweepConfig cfg;
  cfg.space_spec = {{"gallery", "ball"}, {"d", 1}, {"grid_n", 9}, {"p", "inf"}};
  cfg.alphas = {kLn2, 2.0};
  cfg.trials = 200;
  cfg.seed = 11;
  return cfg;
}
}  // namespace

TEST_CASE("sweep on the four-point line matches the module oracles") {
  nlohmann::json spec;
  {
    const auto line = make_line(4);
    const auto tmp = std::string("line_space_tmp.json");
    std::ofstream out(tmp);
    out << line.to_json().dump() << "\n";
    spec = {{"path", tmp}};
  }
  SweepConfig cfg;
  cfg.space_spec = spec;
  cfg.alphas = {kLn2};
  const TradeoffCurve curve = run_sweep(cfg);
  REQUIRE(curve.rows.size() == 1);
  const auto& row = curve.rows[0];
  CHECK(row.s_entropic == 1.0);
  REQUIRE(row.s_outer.has_value());
  CHECK(*row.s_outer == doctest::Approx(2.0));
  REQUIRE(row.s_doubling.has_value());
  CHECK(*row.s_doubling == 0.0);
  REQUIRE(row.acc_exp_exact.has_value());
  CHECK(*row.acc_exp_exact >= row.lower_bound);
  REQUIRE(row.audit_slope_exp.has_value());
  CHECK(*row.audit_slope_exp <= kLn2 * (1 + 1e-9));
  std::remove("line_space_tmp.json");
}

TEST_CASE("sweep on a single point emits zeros") {
  nlohmann::json spec;
  {
    const auto single = make_single_point();
    std::ofstream out("single_space_tmp.json");
    out << single.to_json().dump() << "\n";
    spec = {{"path", "single_space_tmp.json"}};
  }
  SweepConfig cfg;
  cfg.space_spec = spec;
  cfg.alphas = {1.0};
  const TradeoffCurve curve = run_sweep(cfg);
  const auto& row = curve.rows[0];
  CHECK(row.s_entropic == 0.0);
  CHECK(row.s_diametric_2a == 0.0);
  CHECK(row.lower_bound == 0.0);
  CHECK(*row.acc_exp_exact == 0.0);
  std::remove("single_space_tmp.json");
}

TEST_CASE("csv round trip is bit exact") {
  const TradeoffCurve curve = run_sweep(line_config());
  const std::string csv = curve.to_csv();
  const TradeoffCurve back = TradeoffCurve::from_csv(csv);
  CHECK(back.to_csv() == csv);
  REQUIRE(back.rows.size() == curve.rows.size());
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    CHECK(back.rows[i].alpha == curve.rows[i].alpha);
    CHECK(back.rows[i].s_entropic == curve.rows[i].s_entropic);
    CHECK(back.rows[i].acc_exp_mc == curve.rows[i].acc_exp_mc);
    CHECK(back.rows[i].acc_exp_stderr == curve.rows[i].acc_exp_stderr);
    CHECK(back.rows[i].audit_slope_ultra == curve.rows[i].audit_slope_ultra);
  }
}

TEST_CASE("sweep reruns with the same seed are identical") {
  const TradeoffCurve a = run_sweep(line_config());
  const TradeoffCurve b = run_sweep(line_config());
  CHECK(a.to_csv() == b.to_csv());
}

TEST_CASE("ultrametric cells fill only on ultrametric spaces") {
  SweepConfig cfg;
  cfg.space_spec = {{"gallery", "baire"}, {"L", std::size_t{3}}, {"r", 2.0}};
  cfg.alphas = {1.0};
  const TradeoffCurve curve = run_sweep(cfg);
  const auto& row = curve.rows[0];
  CHECK(row.acc_ultra_exact.has_value());
  CHECK(row.acc_exp_exact.has_value());  // baire cube is also single-metric
  CHECK(row.audit_slope_ultra.has_value());

  SweepConfig cfg2 = line_config();
  const auto& row2 = run_sweep(cfg2).rows[0];
  CHECK_FALSE(row2.acc_ultra_exact.has_value());
}

TEST_CASE("sweep config parsing") {
  nlohmann::json j{
      {"space", {{"gallery", "hamming"}, {"d", 2}}},
      {"alphas", {{"geom", {{"start", 0.5}, {"stop", 4.0}, {"factor", 2.0}}}}},
      {"trials", 10},
      {"seed", 3},
  };
  const SweepConfig cfg = SweepConfig::from_json(j);
  CHECK(cfg.alphas == std::vector<double>{0.5, 1.0, 2.0, 4.0});
  CHECK(cfg.trials == 10);

  nlohmann::json bad{{"space", {{"gallery", "hamming"}}}, {"alphas", {-1.0}}};
  CHECK_THROWS_AS(SweepConfig::from_json(bad), std::invalid_argument);
  CHECK_THROWS_AS(SweepConfig::from_json(nlohmann::json{{"alphas", {1.0}}}),
                  std::invalid_argument);
}

TEST_CASE("verification suite passes on healthy spaces") {
  const auto baire = fg_ultrametric_cube(UltrametricProfile::baire(2.0, 4));
  const SuiteReport rep = run_verification_suite(baire, {0.5, 2.0}, 7);
  CHECK(rep.ok());
  CHECK_FALSE(rep.aborted);

  const auto random = random_closure_space(10, 40);
  CHECK(run_verification_suite(random, {1.0}, 8).ok());
}

TEST_CASE("verification suite aborts cleanly on a corrupted matrix") {
  std::vector<double> rho{0, 1, 3, 1, 0, 1, 3, 1, 0};  // triangle violation
  const FiniteBimetricSpace bad({"0", "1", "2"}, rho, rho, false);
  const SuiteReport rep = run_verification_suite(bad, {1.0}, 0);
  CHECK(rep.aborted);
  CHECK_FALSE(rep.ok());
  REQUIRE_FALSE(rep.checks.empty());
  CHECK(rep.checks.front().name == "validation");
  CHECK_FALSE(rep.checks.front().pass);
}

TEST_CASE("space_from_spec dispatches gallery kinds") {
  CHECK(space_from_spec({{"gallery", "hamming"}, {"d", 3}}).size() == 8);
  CHECK(space_from_spec({{"gallery", "baire"}, {"L", std::size_t{2}}}).size() == 4);
  CHECK(space_from_spec({{"gallery", "random"}, {"n", std::size_t{6}}, {"seed", 1}})
            .size() == 6);
  CHECK_THROWS_AS(space_from_spec({{"gallery", "nope"}}), std::invalid_argument);
  CHECK_THROWS_AS(space_from_spec(nlohmann::json::object()), std::invalid_argument);
}
