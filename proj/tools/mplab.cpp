// mplab: metric privacy laboratory CLI.
//
// Subcommands: validate, scales, packing, mech, audit, sweep, verify,
// gallery. Exit codes: 0 success, 1 property failure, 2 usage or
// structural error. All randomized output is determined by --seed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mplab/gallery.hpp"
#include "mplab/harness.hpp"
#include "mplab/mechanism.hpp"
#include "mplab/packing.hpp"
#include "mplab/scales.hpp"
#include "mplab/space.hpp"

namespace {

using namespace mplab;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

FiniteBimetricSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open space file: " + path);
  nlohmann::json j;
  in >> j;
  return FiniteBimetricSpace::from_json(j);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

std::vector<double> parse_alpha_list(const std::string& csv) {
  std::vector<double> out;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (out.empty()) throw std::invalid_argument("empty alpha list");
  for (double a : out) {
    if (a <= 0) throw std::invalid_argument("alphas must be positive");
  }
  return out;
}

Mechanism build_mech(const FiniteBimetricSpace& space, const std::string& kind,
                     double alpha, std::optional<double> scale, PointId y0) {
  if (kind == "exponential") return build_exponential(space, alpha, scale);
  if (kind == "ultrametric") return build_ultrametric_relaxed(space, alpha, scale);
  if (kind == "constant") return build_constant(space, y0);
  if (kind == "nearest_floor") return build_nearest_floor(space, alpha, scale);
  throw std::invalid_argument("unknown mechanism kind: " + kind);
}

void warn_if_collapsed(const Mechanism& mech, std::size_t n) {
  if (n > 1 && mech.net.size() == 1) {
    std::cerr << "warning: net collapsed to a single point; output is constant\n";
  }
}

int cmd_validate(const std::string& path) {
  const FiniteBimetricSpace space = load_space(path);
  const ValidationReport report = space.validate();
  std::cout << report.to_json().dump(2) << "\n";
  return report.ok() ? 0 : 1;
}

int cmd_scales(const std::string& path, double alpha, const std::string& json_out) {
  const FiniteBimetricSpace space = load_space(path);
  const ValidationReport report = space.validate();
  if (!report.ok()) {
    std::cerr << "space failed validation: " << report.violations.front().describe() << "\n";
    return 2;
  }
  ScaleEngine engine(space);
  const ScaleReport rep = engine.report(alpha);
  std::cout << "alpha=" << fmt17(alpha) << " entropic=" << fmt17(rep.entropic.value)
            << " diametric=" << fmt17(rep.diametric.value);
  if (rep.doubling) std::cout << " doubling=" << fmt17(rep.doubling->value);
  if (rep.outer) std::cout << " outer=" << fmt17(rep.outer->value);
  std::cout << "\n";
  if (!json_out.empty()) write_text(json_out, rep.to_json().dump(2) + "\n");
  return 0;
}

int cmd_packing(const std::string& path, int metric, double epsilon,
                const std::string& mode, std::size_t cap) {
  const FiniteBimetricSpace space = load_space(path);
  std::vector<PointId> full(space.size());
  for (PointId i = 0; i < space.size(); ++i) full[i] = i;
  PackingOptions opts;
  opts.mode = (mode == "greedy") ? PackingMode::greedy : PackingMode::exact;
  opts.exact_cap = cap;
  const PackingResult res = packing_number(space, metric, full, epsilon, opts);
  nlohmann::json j{{"count", res.count},
                   {"exact", res.exact},
                   {"witness", res.witness.points},
                   {"epsilon", epsilon},
                   {"metric", metric}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_mech(const std::string& path, const std::string& kind, double alpha,
             std::optional<double> scale, PointId y0, const std::string& out) {
  const FiniteBimetricSpace space = load_space(path);
  const Mechanism mech = build_mech(space, kind, alpha, scale, y0);
  warn_if_collapsed(mech, space.size());
  const std::string text = mech.summary_json().dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return 0;
}

int cmd_audit(const std::string& path, const std::string& kind, double alpha,
              std::optional<double> scale, PointId y0, const std::string& out) {
  const FiniteBimetricSpace space = load_space(path);
  const Mechanism mech = build_mech(space, kind, alpha, scale, y0);
  warn_if_collapsed(mech, space.size());
  const PrivacyAudit audit = audit_privacy(mech, space);
  const std::string text = audit.to_json().dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return audit.pass ? 0 : 1;
}

int cmd_sweep(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config: " + config_path);
  nlohmann::json j;
  in >> j;
  const SweepConfig config = SweepConfig::from_json(j);
  const TradeoffCurve curve = run_sweep(config);
  if (config.csv_out.empty() && config.json_out.empty()) {
    std::cout << curve.to_csv();
  } else {
    std::cout << "sweep: " << curve.rows.size() << " rows";
    if (!config.csv_out.empty()) std::cout << " csv=" << config.csv_out;
    if (!config.json_out.empty()) std::cout << " json=" << config.json_out;
    std::cout << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& path, const std::string& alphas,
               std::uint64_t seed, const std::string& out) {
  const FiniteBimetricSpace space = load_space(path);
  const SuiteReport report =
      run_verification_suite(space, parse_alpha_list(alphas), seed);
  const std::string text = report.to_json().dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  if (report.aborted) return 2;
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric privacy laboratory"};
  app.require_subcommand(1);

  std::string space_path, out_path, json_out, mode = "exact", kind = "exponential";
  std::string alphas = "1";
  std::string config_path;
  double alpha = 1.0, epsilon = 1.0;
  int metric = 1;
  std::size_t cap = 40;
  std::uint64_t seed = 0;
  PointId y0 = 0;
  double scale_value = 0.0;
  bool scale_set = false;

  auto* validate = app.add_subcommand("validate", "check metric axioms of a space file");
  validate->add_option("space", space_path)->required();

  auto* scales = app.add_subcommand("scales", "compute the four scales at one alpha");
  scales->add_option("space", space_path)->required();
  scales->add_option("--alpha", alpha)->required();
  scales->add_option("--json-out", json_out);

  auto* packing = app.add_subcommand("packing", "packing number of the whole space");
  packing->add_option("space", space_path)->required();
  packing->add_option("--metric", metric)->check(CLI::Range(1, 2));
  packing->add_option("--epsilon", epsilon)->required();
  packing->add_option("--mode", mode)->check(CLI::IsMember({"exact", "greedy"}));
  packing->add_option("--cap", cap);

  auto* mech = app.add_subcommand("mech", "build a mechanism and print its summary");
  mech->add_option("space", space_path)->required();
  mech->add_option("--kind", kind)
      ->check(CLI::IsMember({"exponential", "ultrametric", "constant", "nearest_floor"}));
  mech->add_option("--alpha", alpha);
  auto* mech_scale = mech->add_option("--net-s", scale_value, "net separation / relax radius");
  mech->add_option("--y0", y0);
  mech->add_option("--out", out_path);

  auto* audit = app.add_subcommand("audit", "brute-force privacy audit of a mechanism");
  audit->add_option("space", space_path)->required();
  audit->add_option("--kind", kind)
      ->check(CLI::IsMember({"exponential", "ultrametric", "constant", "nearest_floor"}));
  audit->add_option("--alpha", alpha);
  auto* audit_scale = audit->add_option("--net-s", scale_value);
  audit->add_option("--y0", y0);
  audit->add_option("--out", out_path);

  auto* sweep = app.add_subcommand("sweep", "run a tradeoff sweep from a config file");
  sweep->add_option("--config", config_path)->required();

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("space", space_path)->required();
  verify->add_option("--alphas", alphas);
  verify->add_option("--seed", seed);
  verify->add_option("--out", out_path);

  auto* gallery = app.add_subcommand("gallery", "construct a gallery space");
  std::string gkind, p_norm = "inf";
  int gd = 1, grid_n = 9, gn = 4, denom = 4;
  std::size_t L = 4, rn = 12;
  double base = 2.0, value_step = 1.0 / 3.0, gamma = 0.5;
  std::string f_list, g_list;
  gallery->add_option("kind", gkind)
      ->required()
      ->check(CLI::IsMember({"ball", "hamming", "baire", "fg", "measures",
                             "lipschitz", "random", "cover"}));
  gallery->add_option("--d", gd);
  gallery->add_option("--grid-n", grid_n);
  gallery->add_option("--p", p_norm);
  gallery->add_option("--L", L);
  gallery->add_option("--r", base);
  gallery->add_option("--f", f_list, "comma list of f values");
  gallery->add_option("--g", g_list, "comma list of g values");
  gallery->add_option("--n", gn);
  gallery->add_option("--denom", denom);
  gallery->add_option("--value-step", value_step);
  gallery->add_option("--gamma", gamma);
  gallery->add_option("--rn", rn, "random space size");
  gallery->add_option("--seed", seed);
  gallery->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(space_path);
    if (scales->parsed()) return cmd_scales(space_path, alpha, json_out);
    if (packing->parsed()) return cmd_packing(space_path, metric, epsilon, mode, cap);
    if (mech->parsed() || audit->parsed()) {
      scale_set = mech->parsed() ? mech_scale->count() > 0 : audit_scale->count() > 0;
      const std::optional<double> scale =
          scale_set ? std::optional<double>(scale_value) : std::nullopt;
      if (mech->parsed()) return cmd_mech(space_path, kind, alpha, scale, y0, out_path);
      return cmd_audit(space_path, kind, alpha, scale, y0, out_path);
    }
    if (sweep->parsed()) return cmd_sweep(config_path);
    if (verify->parsed()) return cmd_verify(space_path, alphas, seed, out_path);
    if (gallery->parsed()) {
      nlohmann::json j;
      if (gkind == "cover") {
        j = wasserstein_cover(gd, gamma).to_json();
      } else {
        nlohmann::json spec{{"gallery", gkind}};
        if (gkind == "ball") spec.update({{"d", gd}, {"grid_n", grid_n}, {"p", p_norm}});
        if (gkind == "hamming") spec.update({{"d", gd}});
        if (gkind == "baire") spec.update({{"L", L}, {"r", base}});
        if (gkind == "fg") {
          const auto parse_list = [](const std::string& s) {
            nlohmann::json arr = nlohmann::json::array();
            std::string cur;
            for (char c : s + ",") {
              if (c == ',') {
                if (!cur.empty()) arr.push_back(std::stod(cur));
                cur.clear();
              } else {
                cur += c;
              }
            }
            return arr;
          };
          spec["f"] = parse_list(f_list);
          spec["g"] = parse_list(g_list);
        }
        if (gkind == "measures") spec.update({{"d", gd}, {"n", gn}, {"denom", denom}});
        if (gkind == "lipschitz") spec.update({{"grid_n", grid_n}, {"value_step", value_step}});
        if (gkind == "random") spec.update({{"n", rn}, {"seed", seed}});
        j = space_from_spec(spec).to_json();
      }
      const std::string text = j.dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_text(out_path, text);
        std::cout << "wrote " << out_path << "\n";
      }
      return 0;
    }
  } catch (const CapExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
