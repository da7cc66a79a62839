#include "mplab/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mplab/packing.hpp"
#include "mplab/rng.hpp"

namespace mplab {

namespace {

std::vector<PointId> all_points(const FiniteBimetricSpace& space) {
  std::vector<PointId> pts(space.size());
  for (PointId i = 0; i < space.size(); ++i) pts[i] = i;
  return pts;
}

double log_sum_exp(const double* v, std::size_t m) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) mx = std::max(mx, v[j]);
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) sum += std::exp(v[j] - mx);
  return mx + std::log(sum);
}

// Normalized log-probability matrix, n x m.
std::vector<double> log_prob_matrix(const Mechanism& mech) {
  const std::size_t m = mech.net.size();
  std::vector<double> out(mech.log_weights.size());
  for (std::size_t x = 0; x < mech.n; ++x) {
    const double* row = mech.log_weights.data() + x * m;
    const double lse = log_sum_exp(row, m);
    for (std::size_t j = 0; j < m; ++j) out[x * m + j] = row[j] - lse;
  }
  return out;
}

double default_net_scale(const FiniteBimetricSpace& space, double alpha,
                         const ScaleOptions& options) {
  return entropic_scale(space, alpha / 3.0, options).value;
}

}  // namespace

std::string to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::exponential: return "exponential";
    case MechanismKind::ultrametric_relaxed: return "ultrametric_relaxed";
    case MechanismKind::constant: return "constant";
    case MechanismKind::nearest_floor: return "nearest_floor";
  }
  return "?";
}

nlohmann::json Mechanism::summary_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["alpha"] = alpha;
  j["net"] = net;
  switch (kind) {
    case MechanismKind::exponential:
    case MechanismKind::nearest_floor:
      j["net_s"] = net_s;
      break;
    case MechanismKind::ultrametric_relaxed:
      j["relax_s"] = relax_s;
      break;
    case MechanismKind::constant:
      j["fixed_output"] = fixed_output;
      break;
  }
  return j;
}

nlohmann::json PrivacyAudit::to_json() const {
  return {{"alpha_claimed", alpha_claimed},
          {"max_slope", max_slope},
          {"witness", {{"x", x}, {"x_prime", x_prime}, {"y", y}}},
          {"pass", pass}};
}

double relaxed_distance(const FiniteBimetricSpace& space, PointId x, PointId y,
                        double s) {
  const double* row2 = space.row(2, y);
  const double* row1 = space.row(1, x);
  double best = std::numeric_limits<double>::infinity();
  for (PointId v = 0; v < space.size(); ++v) {
    if (row2[v] <= s) best = std::min(best, row1[v]);
  }
  return best;
}

Mechanism build_exponential(const FiniteBimetricSpace& space, double alpha,
                            std::optional<double> net_s,
                            const ScaleOptions& options) {
  if (alpha <= 0) throw std::domain_error("alpha must be positive");
  Mechanism mech;
  mech.kind = MechanismKind::exponential;
  mech.alpha = alpha;
  mech.n = space.size();
  mech.net_s = net_s ? *net_s : default_net_scale(space, alpha, options);
  mech.net = greedy_maximal_separated(space, 1, all_points(space), mech.net_s).points;
  const std::size_t m = mech.net.size();
  mech.log_weights.resize(mech.n * m);
  for (PointId x = 0; x < mech.n; ++x) {
    const double* row = space.row(1, x);
    for (std::size_t j = 0; j < m; ++j) {
      mech.log_weights[x * m + j] = -alpha * row[mech.net[j]] / 2.0;
    }
  }
  return mech;
}

Mechanism build_ultrametric_relaxed(const FiniteBimetricSpace& space, double alpha,
                                    std::optional<double> relax_s,
                                    const ScaleOptions& options) {
  if (alpha <= 0) throw std::domain_error("alpha must be positive");
  if (!space.ultrametric2_claimed()) {
    throw std::invalid_argument(
        "ultrametric_relaxed mechanism requires ultrametric2");
  }
  Mechanism mech;
  mech.kind = MechanismKind::ultrametric_relaxed;
  mech.alpha = alpha;
  mech.n = space.size();
  mech.relax_s = relax_s ? *relax_s : default_net_scale(space, alpha, options);
  mech.net = greedy_maximal_separated(space, 2, all_points(space), mech.relax_s).points;
  const std::size_t m = mech.net.size();

  // Precompute the rho2-ball of every net point once.
  std::vector<std::vector<PointId>> balls(m);
  for (std::size_t j = 0; j < m; ++j) {
    balls[j] = ball(space, 2, mech.net[j], mech.relax_s);
  }
  mech.log_weights.resize(mech.n * m);
  for (PointId x = 0; x < mech.n; ++x) {
    const double* row1 = space.row(1, x);
    for (std::size_t j = 0; j < m; ++j) {
      double sigma = std::numeric_limits<double>::infinity();
      for (PointId v : balls[j]) sigma = std::min(sigma, row1[v]);
      mech.log_weights[x * m + j] = -alpha * sigma / 2.0;
    }
    // The net covers in rho2, so some sigma(x, y) is zero and the
    // normalizer is at least one.
    const double lse = log_sum_exp(mech.log_weights.data() + x * m, m);
    if (!(lse >= -1e-12)) {
      throw std::logic_error("relaxed mechanism: normalizer below one");
    }
  }
  return mech;
}

Mechanism build_constant(const FiniteBimetricSpace& space, PointId y0) {
  if (y0 >= space.size()) throw std::domain_error("build_constant: y0 out of range");
  Mechanism mech;
  mech.kind = MechanismKind::constant;
  mech.alpha = 0.0;
  mech.n = space.size();
  mech.net = {y0};
  mech.fixed_output = y0;
  mech.log_weights.assign(mech.n, 0.0);
  return mech;
}

Mechanism build_nearest_floor(const FiniteBimetricSpace& space, double alpha,
                              std::optional<double> net_s, double floor,
                              const ScaleOptions& options) {
  if (alpha <= 0) throw std::domain_error("alpha must be positive");
  Mechanism mech;
  mech.kind = MechanismKind::nearest_floor;
  mech.alpha = alpha;
  mech.n = space.size();
  mech.net_s = net_s ? *net_s : default_net_scale(space, alpha, options);
  mech.net = greedy_maximal_separated(space, 1, all_points(space), mech.net_s).points;
  const std::size_t m = mech.net.size();
  mech.log_weights.assign(mech.n * m, std::log(floor));
  for (PointId x = 0; x < mech.n; ++x) {
    const double* row = space.row(1, x);
    std::size_t nearest = 0;
    for (std::size_t j = 1; j < m; ++j) {
      if (row[mech.net[j]] < row[mech.net[nearest]]) nearest = j;
    }
    mech.log_weights[x * m + nearest] = 0.0;
  }
  return mech;
}

OutputDistribution output_distribution(const Mechanism& mech, PointId x) {
  if (x >= mech.n) throw std::domain_error("output_distribution: x out of range");
  const std::size_t m = mech.net.size();
  const double* row = mech.log_weights.data() + x * m;
  const double lse = log_sum_exp(row, m);
  OutputDistribution dist;
  dist.input = x;
  dist.support.reserve(m);
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double p = std::exp(row[j] - lse);
    total += p;
    dist.support.emplace_back(mech.net[j], p);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::logic_error("output_distribution: probabilities do not normalize");
  }
  return dist;
}

PointId sample(const Mechanism& mech, PointId x, std::uint64_t seed) {
  const OutputDistribution dist = output_distribution(mech, x);
  const double u = uniform01(mix64(seed));
  double cum = 0.0;
  for (const auto& [point, p] : dist.support) {
    cum += p;
    if (u < cum) return point;
  }
  return dist.support.back().first;
}

PrivacyAudit audit_privacy(const Mechanism& mech, const FiniteBimetricSpace& space) {
  if (mech.n != space.size()) {
    throw std::invalid_argument("audit_privacy: mechanism/space size mismatch");
  }
  const std::size_t m = mech.net.size();
  const std::vector<double> logp = log_prob_matrix(mech);

  PrivacyAudit audit;
  audit.alpha_claimed = mech.alpha;
  audit.max_slope = 0.0;
  for (PointId a = 0; a < mech.n; ++a) {
    const double* pa = logp.data() + a * m;
    const double* row1 = space.row(1, a);
    for (PointId b = a + 1; b < mech.n; ++b) {
      const double* pb = logp.data() + b * m;
      double best = 0.0;
      std::size_t besty = 0;
      for (std::size_t j = 0; j < m; ++j) {
        const double d = std::abs(pa[j] - pb[j]);
        if (d > best) {
          best = d;
          besty = j;
        }
      }
      const double slope = best / row1[b];
      if (slope > audit.max_slope) {
        audit.max_slope = slope;
        const bool forward = logp[a * m + besty] >= logp[b * m + besty];
        audit.x = forward ? a : b;
        audit.x_prime = forward ? b : a;
        audit.y = mech.net[besty];
      }
    }
  }
  audit.pass = audit.max_slope <= mech.alpha * (1.0 + 1e-9);
  return audit;
}

AccuracyResult exact_accuracy(const Mechanism& mech, const FiniteBimetricSpace& space) {
  if (mech.n != space.size()) {
    throw std::invalid_argument("exact_accuracy: mechanism/space size mismatch");
  }
  AccuracyResult res;
  res.per_input.resize(mech.n);
  for (PointId x = 0; x < mech.n; ++x) {
    const OutputDistribution dist = output_distribution(mech, x);
    const double* row2 = space.row(2, x);
    double e = 0.0;
    for (const auto& [point, p] : dist.support) e += p * row2[point];
    res.per_input[x] = e;
    if (e > res.sup_error) {
      res.sup_error = e;
      res.argmax = x;
    }
  }
  return res;
}

AccuracyResult accuracy_mc(const Mechanism& mech, const FiniteBimetricSpace& space,
                           std::size_t trials, std::uint64_t master_seed) {
  if (trials < 1) throw std::domain_error("accuracy_mc: trials must be >= 1");
  AccuracyResult res;
  res.trials = trials;
  res.per_input.resize(mech.n);
  if (trials >= 2) res.per_input_stderr.resize(mech.n);
  for (PointId x = 0; x < mech.n; ++x) {
    const double* row2 = space.row(2, x);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const PointId y = sample(mech, x, derive_seed(master_seed, x, t));
      const double e = row2[y];
      sum += e;
      sumsq += e * e;
    }
    const double mean = sum / static_cast<double>(trials);
    res.per_input[x] = mean;
    if (trials >= 2) {
      const double var =
          std::max(0.0, (sumsq - sum * mean) / static_cast<double>(trials - 1));
      res.per_input_stderr[x] = std::sqrt(var / static_cast<double>(trials));
    }
    if (mean > res.sup_error) {
      res.sup_error = mean;
      res.argmax = x;
    }
  }
  if (trials >= 2) res.sup_stderr = res.per_input_stderr[res.argmax];
  return res;
}

}  // namespace mplab
