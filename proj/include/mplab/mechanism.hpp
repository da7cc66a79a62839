#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mplab/scales.hpp"
#include "mplab/space.hpp"

namespace mplab {

enum class MechanismKind { exponential, ultrametric_relaxed, constant, nearest_floor };

std::string to_string(MechanismKind kind);

// A privatization rule: for every input point, an explicit categorical
// output distribution over a net. Weights are kept as unnormalized
// log-probabilities; normalization always happens in the log domain with a
// max shift, so huge alpha*distance products never overflow.
struct Mechanism {
  MechanismKind kind = MechanismKind::constant;
  double alpha = 0.0;
  std::vector<PointId> net;
  double net_s = 0.0;    // net separation (exponential / nearest_floor)
  double relax_s = 0.0;  // ball radius of the relaxed distance
  PointId fixed_output = 0;
  std::size_t n = 0;
  std::vector<double> log_weights;  // n x net.size(), row-major

  double log_weight(PointId x, std::size_t j) const {
    return log_weights[x * net.size() + j];
  }
  nlohmann::json summary_json() const;
};

struct OutputDistribution {
  PointId input = 0;
  std::vector<std::pair<PointId, double>> support;  // (net point, probability)
};

struct PrivacyAudit {
  double alpha_claimed = 0.0;
  double max_slope = 0.0;
  PointId x = 0, x_prime = 0, y = 0;  // ln p_x(y) - ln p_x'(y) attains the max
  bool pass = false;

  nlohmann::json to_json() const;
};

struct AccuracyResult {
  std::vector<double> per_input;  // expected rho2 error per input
  double sup_error = 0.0;
  PointId argmax = 0;
  std::size_t trials = 0;  // 0 = exact evaluation
  std::vector<double> per_input_stderr;  // empty when exact or trials < 2
  std::optional<double> sup_stderr;      // stderr at the sup-attaining input
};

// rho1-distance from x to the closed rho2-ball of radius s around y.
double relaxed_distance(const FiniteBimetricSpace& space, PointId x, PointId y,
                        double s);

// Exponential mechanism over a greedy maximal net_s-separated net in rho1,
// with log-weights -alpha * rho1(x,y) / 2. Default net_s is the entropic
// scale at alpha/3.
Mechanism build_exponential(const FiniteBimetricSpace& space, double alpha,
                            std::optional<double> net_s = std::nullopt,
                            const ScaleOptions& options = {});

// Relaxed mechanism for an ultrametric rho2: net is relax_s-separated in
// rho2 and log-weights are -alpha * sigma(x,y) / 2 where sigma is the
// relaxed distance. Requires the space's ultrametric claim.
Mechanism build_ultrametric_relaxed(const FiniteBimetricSpace& space, double alpha,
                                    std::optional<double> relax_s = std::nullopt,
                                    const ScaleOptions& options = {});

// Point mass at y0 for every input.
Mechanism build_constant(const FiniteBimetricSpace& space, PointId y0);

// Deterministic nearest-net rounding smoothed to a tiny probability floor.
// Intentionally not metrically private; audits must fail it.
Mechanism build_nearest_floor(const FiniteBimetricSpace& space, double alpha,
                              std::optional<double> net_s = std::nullopt,
                              double floor = 1e-12,
                              const ScaleOptions& options = {});

OutputDistribution output_distribution(const Mechanism& mech, PointId x);

// Deterministic categorical draw: inverse CDF driven by mix64(seed).
// Same (mechanism, x, seed) gives the same output on every platform.
PointId sample(const Mechanism& mech, PointId x, std::uint64_t seed);

// Exact worst-case log-ratio slope over all ordered input pairs and all
// net atoms. Pointwise atoms suffice: a ratio over any output event is a
// ratio of sums of atom masses.
PrivacyAudit audit_privacy(const Mechanism& mech, const FiniteBimetricSpace& space);

AccuracyResult exact_accuracy(const Mechanism& mech, const FiniteBimetricSpace& space);

// Monte-Carlo accuracy with per-trial seeds derived from
// (master_seed, input, trial); results do not depend on evaluation order.
AccuracyResult accuracy_mc(const Mechanism& mech, const FiniteBimetricSpace& space,
                           std::size_t trials, std::uint64_t master_seed);

}  // namespace mplab
