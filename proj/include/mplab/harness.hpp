#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mplab/mechanism.hpp"
#include "mplab/scales.hpp"
#include "mplab/space.hpp"

namespace mplab {

// Orchestration: build spaces, sweep alphas, audit mechanisms, persist
// tradeoff curves, and run the named verification properties.

struct SweepConfig {
  nlohmann::json space_spec;  // {"path": "..."} or {"gallery": "...", ...}
  std::vector<double> alphas;
  bool run_exponential = true;  // applies when the two metrics coincide
  bool run_ultrametric = true;  // applies when rho2 is claimed ultrametric
  std::size_t trials = 0;       // 0 = exact accuracy only
  std::uint64_t seed = 0;
  std::string csv_out;
  std::string json_out;

  static SweepConfig from_json(const nlohmann::json& j);
};

struct TradeoffRow {
  double alpha = 0.0;
  double s_entropic = 0.0;
  double s_entropic_2a = 0.0;
  double s_diametric_2a = 0.0;
  std::optional<double> s_doubling;
  std::optional<double> s_outer;
  double lower_bound = 0.0;  // max(s_entropic_2a / 8, s_diametric_2a / 5)
  std::optional<double> acc_exp_exact, acc_exp_mc, acc_exp_stderr;
  std::optional<double> acc_ultra_exact, acc_ultra_mc, acc_ultra_stderr;
  std::optional<double> audit_slope_exp, audit_slope_ultra;
};

struct TradeoffCurve {
  std::vector<TradeoffRow> rows;

  // Fixed column order; floats at 17 significant digits (round-trip safe);
  // missing mechanisms emit empty cells.
  std::string to_csv() const;
  static TradeoffCurve from_csv(const std::string& text);
  nlohmann::json to_json() const;
};

// Builds a space from a JSON spec: {"path": file} loads the space JSON;
// {"gallery": kind, ...params} invokes a gallery constructor. Gallery kinds:
// ball, hamming, baire, fg, measures, lipschitz, random.
FiniteBimetricSpace space_from_spec(const nlohmann::json& spec);

// One row per alpha; deterministic given config.seed; writes the CSV/JSON
// files when paths are configured.
TradeoffCurve run_sweep(const SweepConfig& config);

struct SuiteCheck {
  std::string name;
  std::optional<double> alpha;
  bool pass = true;
  bool informational = false;
  std::string details;
};

struct SuiteReport {
  std::vector<SuiteCheck> checks;
  bool aborted = false;

  bool ok() const;
  nlohmann::json to_json() const;
};

// Named verification properties: metric validation, packing facts,
// inter-scale relations, privacy audits (including the non-private
// counterexample, which must fail), accuracy lower bounds, the exponential
// upper bound with explicit constants, and the relaxed-mechanism lemmas on
// ultrametric spaces. Aborts cleanly when the space fails validation.
SuiteReport run_verification_suite(const FiniteBimetricSpace& space,
                                   const std::vector<double>& alphas,
                                   std::uint64_t seed);

// Individual property groups, reused by the suite and the acceptance tests.
std::vector<SuiteCheck> lower_bound_checks(const FiniteBimetricSpace& space,
                                           const Mechanism& mech,
                                           ScaleEngine& engine, double alpha,
                                           const std::string& tag);
std::optional<SuiteCheck> exp_upper_bound_check(const FiniteBimetricSpace& space,
                                                const Mechanism& mech,
                                                double alpha);
std::vector<SuiteCheck> relaxed_lemma_checks(const FiniteBimetricSpace& space,
                                             const Mechanism& mech,
                                             ScaleEngine& engine,
                                             bool default_relax_scale);

}  // namespace mplab
