#include "mplab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mplab/gallery.hpp"
#include "mplab/packing.hpp"
#include "mplab/rng.hpp"

namespace mplab {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? fmt17(*v) : std::string();
}

const char* kCsvHeader =
    "alpha,s_entropic,s_entropic_2a,s_diametric_2a,s_doubling,s_outer,"
    "lower_bound,acc_exp_exact,acc_exp_mc,acc_exp_stderr,acc_ultra_exact,"
    "acc_ultra_mc,acc_ultra_stderr,audit_slope_exp,audit_slope_ultra";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::optional<double> parse_cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

nlohmann::json opt_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

}  // namespace

SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  if (!j.contains("space")) throw std::invalid_argument("sweep config: missing space");
  cfg.space_spec = j.at("space");
  if (!j.contains("alphas")) throw std::invalid_argument("sweep config: missing alphas");
  const auto& a = j.at("alphas");
  if (a.is_array()) {
    for (const auto& v : a) cfg.alphas.push_back(v.get<double>());
  } else if (a.is_object() && a.contains("geom")) {
    const auto& g = a.at("geom");
    const double start = g.at("start").get<double>();
    const double stop = g.at("stop").get<double>();
    const double factor = g.at("factor").get<double>();
    if (start <= 0 || factor <= 1) throw std::invalid_argument("sweep config: bad geometric range");
    for (double x = start; x <= stop * (1 + 1e-12); x *= factor) cfg.alphas.push_back(x);
  } else {
    throw std::invalid_argument("sweep config: alphas must be a list or {\"geom\":...}");
  }
  for (double x : cfg.alphas) {
    if (x <= 0) throw std::invalid_argument("sweep config: alphas must be positive");
  }
  if (j.contains("mechanisms")) {
    cfg.run_exponential = false;
    cfg.run_ultrametric = false;
    for (const auto& m : j.at("mechanisms")) {
      const std::string name = m.get<std::string>();
      if (name == "exponential") cfg.run_exponential = true;
      else if (name == "ultrametric") cfg.run_ultrametric = true;
      else throw std::invalid_argument("sweep config: unknown mechanism " + name);
    }
  }
  cfg.trials = j.value("trials", std::size_t{0});
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.csv_out = j.value("csv_out", std::string());
  cfg.json_out = j.value("json_out", std::string());
  return cfg;
}

FiniteBimetricSpace space_from_spec(const nlohmann::json& spec) {
  if (spec.contains("path")) {
    std::ifstream in(spec.at("path").get<std::string>());
    if (!in) throw std::runtime_error("cannot open space file: " +
                                      spec.at("path").get<std::string>());
    nlohmann::json j;
    in >> j;
    return FiniteBimetricSpace::from_json(j);
  }
  if (!spec.contains("gallery")) {
    throw std::invalid_argument("space spec needs \"path\" or \"gallery\"");
  }
  const std::string kind = spec.at("gallery").get<std::string>();
  if (kind == "ball") {
    const std::string p = spec.value("p", std::string("inf"));
    const double pv = (p == "inf") ? std::numeric_limits<double>::infinity() : std::stod(p);
    return grid_ball_space(spec.value("d", 1), spec.value("grid_n", 9), pv);
  }
  if (kind == "hamming") return hamming_cube(spec.value("d", 3));
  if (kind == "baire") {
    return fg_ultrametric_cube(
        UltrametricProfile::baire(spec.value("r", 2.0), spec.value("L", std::size_t{4})));
  }
  if (kind == "fg") {
    UltrametricProfile prof;
    for (const auto& v : spec.at("f")) prof.f.push_back(v.get<double>());
    for (const auto& v : spec.at("g")) prof.g.push_back(v.get<double>());
    return fg_ultrametric_cube(prof);
  }
  if (kind == "measures") {
    return lattice_measure_space(spec.value("d", 1), spec.value("n", 4),
                                 spec.value("denom", 4));
  }
  if (kind == "lipschitz") {
    return lipschitz_net_space(spec.value("grid_n", 3),
                               spec.value("value_step", 1.0 / 3.0));
  }
  if (kind == "random") {
    return random_closure_space(spec.value("n", std::size_t{12}),
                                spec.value("seed", std::uint64_t{0}));
  }
  throw std::invalid_argument("unknown gallery kind: " + kind);
}

std::string TradeoffCurve::to_csv() const {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& r : rows) {
    os << fmt17(r.alpha) << "," << fmt17(r.s_entropic) << ","
       << fmt17(r.s_entropic_2a) << "," << fmt17(r.s_diametric_2a) << ","
       << opt_cell(r.s_doubling) << "," << opt_cell(r.s_outer) << ","
       << fmt17(r.lower_bound) << "," << opt_cell(r.acc_exp_exact) << ","
       << opt_cell(r.acc_exp_mc) << "," << opt_cell(r.acc_exp_stderr) << ","
       << opt_cell(r.acc_ultra_exact) << "," << opt_cell(r.acc_ultra_mc) << ","
       << opt_cell(r.acc_ultra_stderr) << "," << opt_cell(r.audit_slope_exp)
       << "," << opt_cell(r.audit_slope_ultra) << "\n";
  }
  return os.str();
}

TradeoffCurve TradeoffCurve::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("tradeoff csv: unexpected header");
  }
  TradeoffCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 15) throw std::invalid_argument("tradeoff csv: bad row");
    TradeoffRow r;
    r.alpha = std::stod(cells[0]);
    r.s_entropic = std::stod(cells[1]);
    r.s_entropic_2a = std::stod(cells[2]);
    r.s_diametric_2a = std::stod(cells[3]);
    r.s_doubling = parse_cell(cells[4]);
    r.s_outer = parse_cell(cells[5]);
    r.lower_bound = std::stod(cells[6]);
    r.acc_exp_exact = parse_cell(cells[7]);
    r.acc_exp_mc = parse_cell(cells[8]);
    r.acc_exp_stderr = parse_cell(cells[9]);
    r.acc_ultra_exact = parse_cell(cells[10]);
    r.acc_ultra_mc = parse_cell(cells[11]);
    r.acc_ultra_stderr = parse_cell(cells[12]);
    r.audit_slope_exp = parse_cell(cells[13]);
    r.audit_slope_ultra = parse_cell(cells[14]);
    curve.rows.push_back(r);
  }
  return curve;
}

nlohmann::json TradeoffCurve::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"alpha", r.alpha},
                   {"s_entropic", r.s_entropic},
                   {"s_entropic_2a", r.s_entropic_2a},
                   {"s_diametric_2a", r.s_diametric_2a},
                   {"s_doubling", opt_json(r.s_doubling)},
                   {"s_outer", opt_json(r.s_outer)},
                   {"lower_bound", r.lower_bound},
                   {"acc_exp_exact", opt_json(r.acc_exp_exact)},
                   {"acc_exp_mc", opt_json(r.acc_exp_mc)},
                   {"acc_exp_stderr", opt_json(r.acc_exp_stderr)},
                   {"acc_ultra_exact", opt_json(r.acc_ultra_exact)},
                   {"acc_ultra_mc", opt_json(r.acc_ultra_mc)},
                   {"acc_ultra_stderr", opt_json(r.acc_ultra_stderr)},
                   {"audit_slope_exp", opt_json(r.audit_slope_exp)},
                   {"audit_slope_ultra", opt_json(r.audit_slope_ultra)}});
  }
  return {{"rows", arr}};
}

TradeoffCurve run_sweep(const SweepConfig& config) {
  const FiniteBimetricSpace space = space_from_spec(config.space_spec);
  const ValidationReport val = space.validate();
  if (!val.ok()) {
    throw std::invalid_argument("sweep: space failed validation: " +
                                val.violations.front().describe());
  }
  ScaleEngine engine(space);
  TradeoffCurve curve;
  for (std::size_t idx = 0; idx < config.alphas.size(); ++idx) {
    const double alpha = config.alphas[idx];
    TradeoffRow row;
    row.alpha = alpha;
    row.s_entropic = engine.entropic(alpha).value;
    row.s_entropic_2a = engine.entropic(2.0 * alpha).value;
    row.s_diametric_2a = engine.diametric(2.0 * alpha).value;
    if (space.single_metric()) {
      row.s_doubling = engine.doubling(alpha).value;
      row.s_outer = engine.outer(alpha).value;
    }
    row.lower_bound = std::max(row.s_entropic_2a / 8.0, row.s_diametric_2a / 5.0);

    if (config.run_exponential && space.single_metric()) {
      const double net_s = engine.entropic(alpha / 3.0).value;
      const Mechanism mech = build_exponential(space, alpha, net_s);
      row.acc_exp_exact = exact_accuracy(mech, space).sup_error;
      row.audit_slope_exp = audit_privacy(mech, space).max_slope;
      if (config.trials > 0) {
        const AccuracyResult mc =
            accuracy_mc(mech, space, config.trials, derive_seed(config.seed, 2 * idx, 0));
        row.acc_exp_mc = mc.sup_error;
        if (mc.sup_stderr) row.acc_exp_stderr = *mc.sup_stderr;
      }
    }
    if (config.run_ultrametric && space.ultrametric2_claimed()) {
      const double relax_s = engine.entropic(alpha / 3.0).value;
      const Mechanism mech = build_ultrametric_relaxed(space, alpha, relax_s);
      row.acc_ultra_exact = exact_accuracy(mech, space).sup_error;
      row.audit_slope_ultra = audit_privacy(mech, space).max_slope;
      if (config.trials > 0) {
        const AccuracyResult mc = accuracy_mc(mech, space, config.trials,
                                              derive_seed(config.seed, 2 * idx + 1, 0));
        row.acc_ultra_mc = mc.sup_error;
        if (mc.sup_stderr) row.acc_ultra_stderr = *mc.sup_stderr;
      }
    }
    curve.rows.push_back(row);
  }
  if (!config.csv_out.empty()) write_file(config.csv_out, curve.to_csv());
  if (!config.json_out.empty()) write_file(config.json_out, curve.to_json().dump(2) + "\n");
  return curve;
}

bool SuiteReport::ok() const {
  if (aborted) return false;
  for (const auto& c : checks) {
    if (!c.informational && !c.pass) return false;
  }
  return true;
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"alpha", c.alpha ? nlohmann::json(*c.alpha) : nlohmann::json()},
                   {"pass", c.pass},
                   {"informational", c.informational},
                   {"details", c.details}});
  }
  return {{"ok", ok()}, {"aborted", aborted}, {"checks", arr}};
}

std::vector<SuiteCheck> lower_bound_checks(const FiniteBimetricSpace& space,
                                           const Mechanism& mech,
                                           ScaleEngine& engine, double alpha,
                                           const std::string& tag) {
  const double acc = exact_accuracy(mech, space).sup_error;
  const double s2a = engine.entropic(2.0 * alpha).value;
  const double sd2a = engine.diametric(2.0 * alpha).value;
  std::vector<SuiteCheck> out;
  const auto admit = [&](double bound) {
    return acc + 1e-12 + 1e-9 * bound >= bound;
  };
  std::ostringstream d1;
  d1 << tag << ": accuracy=" << acc << " >= s(2a)/8=" << s2a / 8.0;
  out.push_back({"lower-bound-entropic[" + tag + "]", alpha, admit(s2a / 8.0), false, d1.str()});
  std::ostringstream d2;
  d2 << tag << ": accuracy=" << acc << " >= s_circ(2a)/5=" << sd2a / 5.0;
  out.push_back({"lower-bound-diametric[" + tag + "]", alpha, admit(sd2a / 5.0), false, d2.str()});
  return out;
}

std::optional<SuiteCheck> exp_upper_bound_check(const FiniteBimetricSpace& space,
                                                const Mechanism& mech,
                                                double alpha) {
  if (!space.single_metric() || mech.kind != MechanismKind::exponential) {
    return std::nullopt;
  }
  const double s = mech.net_s;
  const double acc = exact_accuracy(mech, space).sup_error;
  const double bound =
      6.0 * s + std::exp(-alpha * s / 2.0) * (34.0 * s + 40.0 / alpha);
  std::ostringstream d;
  d << "accuracy=" << acc << " <= 6s + e^(-as/2)(34s + 40/a)=" << bound
    << " at s=" << s;
  SuiteCheck c{"exp-upper-bound", alpha, acc <= bound * (1.0 + 1e-9), false, d.str()};
  return c;
}

std::vector<SuiteCheck> relaxed_lemma_checks(const FiniteBimetricSpace& space,
                                             const Mechanism& mech,
                                             ScaleEngine& engine,
                                             bool default_relax_scale) {
  if (mech.kind != MechanismKind::ultrametric_relaxed) {
    throw std::invalid_argument("relaxed_lemma_checks: wrong mechanism kind");
  }
  const double alpha = mech.alpha;
  const double s = mech.relax_s;
  const std::size_t n = space.size();
  const std::size_t m = mech.net.size();
  std::vector<SuiteCheck> out;

  // sigma(x, j), recomputed from the definition.
  std::vector<double> sigma(n * m);
  for (PointId x = 0; x < n; ++x) {
    for (std::size_t j = 0; j < m; ++j) {
      sigma[x * m + j] = relaxed_distance(space, x, mech.net[j], s);
    }
  }

  // Normalizer at least one.
  bool norm_ok = true;
  for (PointId x = 0; x < n && norm_ok; ++x) {
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) total += std::exp(-alpha * sigma[x * m + j] / 2.0);
    norm_ok = total >= 1.0 - 1e-12;
  }
  out.push_back({"relaxed-normalizer>=1", alpha, norm_ok, false, ""});

  // Relaxed ball: |{y in net : sigma(x,y) <= c}| <= N2(B1(x,c), s) at every
  // threshold where either side can change, and (with the default net
  // scale) <= e^(alpha c / 3).
  const std::vector<double> spec1 = distance_spectrum(space, 1).values;
  bool ball_ok = true, ball_exp_ok = true;
  std::string ball_details;
  for (PointId x = 0; x < n && ball_ok; ++x) {
    std::vector<double> cands;
    for (std::size_t j = 0; j < m; ++j) {
      if (sigma[x * m + j] > 0) cands.push_back(sigma[x * m + j]);
    }
    cands.insert(cands.end(), spec1.begin(), spec1.end());
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    for (double c : cands) {
      std::size_t cnt = 0;
      for (std::size_t j = 0; j < m; ++j) cnt += (sigma[x * m + j] <= c);
      const std::size_t pack = engine.packing_count(2, ball(space, 1, x, c), s);
      if (cnt > pack) {
        ball_ok = false;
        std::ostringstream d;
        d << "x=" << x << " c=" << c << " count=" << cnt << " packing=" << pack;
        ball_details = d.str();
        break;
      }
      if (default_relax_scale &&
          std::log(static_cast<double>(pack)) > alpha * c / 3.0 + 1e-9) {
        ball_exp_ok = false;
      }
    }
  }
  out.push_back({"relaxed-ball-packing", alpha, ball_ok, false, ball_details});
  if (default_relax_scale) {
    out.push_back({"relaxed-ball-exponential", alpha, ball_exp_ok, false, ""});
  }

  // Tail bound with explicit constant C = 2 / (1 - e^(-1/6)).
  if (default_relax_scale) {
    const double C = 2.0 / (1.0 - std::exp(-1.0 / 6.0));
    bool tail_ok = true;
    std::string tail_details;
    for (PointId x = 0; x < n && tail_ok; ++x) {
      const OutputDistribution dist = output_distribution(mech, x);
      std::vector<double> svals;
      for (std::size_t j = 0; j < m; ++j) {
        if (sigma[x * m + j] > 0) svals.push_back(sigma[x * m + j]);
      }
      std::sort(svals.begin(), svals.end());
      svals.erase(std::unique(svals.begin(), svals.end()), svals.end());
      for (double r : svals) {
        double tail = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          if (sigma[x * m + j] >= r) tail += dist.support[j].second;
        }
        if (tail > C * std::exp(-alpha * r / 6.0) * (1.0 + 1e-9)) {
          tail_ok = false;
          std::ostringstream d;
          d << "x=" << x << " r=" << r << " tail=" << tail;
          tail_details = d.str();
          break;
        }
      }
    }
    out.push_back({"relaxed-accuracy-tail", alpha, tail_ok, false, tail_details});
  }

  // Unrelaxation: rho2(x,y) <= s + e^(alpha sigma / 7) * s_circ(alpha/7).
  const double s_circ = engine.diametric(alpha / 7.0).value;
  bool unrelax_ok = true;
  std::string unrelax_details;
  for (PointId x = 0; x < n && unrelax_ok; ++x) {
    const double* row2 = space.row(2, x);
    for (std::size_t j = 0; j < m; ++j) {
      const double bound = s + std::exp(alpha * sigma[x * m + j] / 7.0) * s_circ;
      if (row2[mech.net[j]] > bound * (1.0 + 1e-9) + 1e-15) {
        unrelax_ok = false;
        std::ostringstream d;
        d << "x=" << x << " y=" << mech.net[j] << " rho2=" << row2[mech.net[j]]
          << " bound=" << bound;
        unrelax_details = d.str();
        break;
      }
    }
  }
  out.push_back({"unrelaxation", alpha, unrelax_ok, false, unrelax_details});
  return out;
}

SuiteReport run_verification_suite(const FiniteBimetricSpace& space,
                                   const std::vector<double>& alphas,
                                   std::uint64_t seed) {
  SuiteReport rep;
  const ValidationReport val = space.validate();
  if (!val.ok()) {
    std::size_t shown = 0;
    for (const auto& v : val.violations) {
      rep.checks.push_back({"validation", std::nullopt, false, false, v.describe()});
      if (++shown >= 20) break;
    }
    rep.aborted = true;
    return rep;
  }
  rep.checks.push_back({"validation", std::nullopt, true, false, ""});

  {
    const FactReport fr = verify_packing_facts(space, 1, 6, seed);
    std::ostringstream d;
    d << fr.checks.size() << " sampled checks (rho1)";
    rep.checks.push_back({"packing-facts", std::nullopt, fr.all_pass(), false, d.str()});
    if (!space.single_metric()) {
      const FactReport fr2 = verify_packing_facts(space, 2, 6, seed + 1);
      std::ostringstream d2;
      d2 << fr2.checks.size() << " sampled checks (rho2)";
      rep.checks.push_back({"packing-facts-rho2", std::nullopt, fr2.all_pass(), false, d2.str()});
    }
  }

  ScaleEngine engine(space);
  const std::vector<double> spec1 = distance_spectrum(space, 1).values;
  const double diam1 = spec1.empty() ? 0.0 : spec1.back();

  for (double alpha : alphas) {
    if (space.single_metric()) {
      const RelationReport rr = verify_scale_relations(space, alpha);
      for (const auto& c : rr.checks) {
        rep.checks.push_back({"relation:" + c.relation, alpha,
                              !c.applicable || c.pass, !c.applicable, c.note});
      }
    }

    // Constant mechanism: zero slope, lower bounds still apply.
    {
      const Mechanism cm = build_constant(space, 0);
      const PrivacyAudit audit = audit_privacy(cm, space);
      rep.checks.push_back({"audit[constant]", alpha, audit.max_slope <= 1e-12, false, ""});
      for (auto& c : lower_bound_checks(space, cm, engine, alpha, "constant")) {
        rep.checks.push_back(std::move(c));
      }
    }

    if (space.single_metric()) {
      const double net_s = engine.entropic(alpha / 3.0).value;
      const Mechanism mech = build_exponential(space, alpha, net_s);
      const PrivacyAudit audit = audit_privacy(mech, space);
      std::ostringstream d;
      d << "slope=" << audit.max_slope << " alpha=" << alpha << " net=" << mech.net.size();
      rep.checks.push_back({"audit[exponential]", alpha, audit.pass, false, d.str()});
      for (auto& c : lower_bound_checks(space, mech, engine, alpha, "exponential")) {
        rep.checks.push_back(std::move(c));
      }
      if (auto c = exp_upper_bound_check(space, mech, alpha)) {
        rep.checks.push_back(std::move(*c));
      }
    }

    if (space.ultrametric2_claimed()) {
      const double relax_s = engine.entropic(alpha / 3.0).value;
      const Mechanism mech = build_ultrametric_relaxed(space, alpha, relax_s);
      const PrivacyAudit audit = audit_privacy(mech, space);
      std::ostringstream d;
      d << "slope=" << audit.max_slope << " alpha=" << alpha << " net=" << mech.net.size();
      rep.checks.push_back({"audit[ultrametric_relaxed]", alpha, audit.pass, false, d.str()});
      for (auto& c : lower_bound_checks(space, mech, engine, alpha, "ultrametric_relaxed")) {
        rep.checks.push_back(std::move(c));
      }
      for (auto& c : relaxed_lemma_checks(space, mech, engine, true)) {
        rep.checks.push_back(std::move(c));
      }
    }

    // Deterministic rounding with a floor far below the private envelope
    // must fail the audit (only meaningful with at least two inputs).
    if (space.size() >= 2) {
      const double floor =
          std::max(std::min(1e-12, std::exp(-4.0 * alpha * diam1)), 1e-300);
      const Mechanism bad = build_nearest_floor(space, alpha, 0.0, floor);
      const PrivacyAudit audit = audit_privacy(bad, space);
      std::ostringstream d;
      d << "slope=" << audit.max_slope << " alpha=" << alpha;
      rep.checks.push_back({"audit-fails[nearest_floor]", alpha, !audit.pass, false, d.str()});
    }
  }
  return rep;
}

}  // namespace mplab
