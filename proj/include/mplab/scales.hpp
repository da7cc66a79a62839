#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mplab/packing.hpp"
#include "mplab/space.hpp"

namespace mplab {

// All four scales are computed exactly by scanning the finitely many radii
// and separation thresholds at which balls and packing numbers change,
// rather than by numeric search. Thresholds are always compared in the log
// domain (ln N <= alpha * r) so large alpha*r never overflows.

struct ScaleOptions {
  // Branch-and-bound component cap used by the scale scans. Larger than the
  // default packing cap because structured gallery balls routinely exceed
  // 40 points yet reduce to easy instances.
  std::size_t packing_cap = 4096;
  double spectrum_rel_tol = 1e-12;
};

struct ScaleWitness {
  std::string kind;      // "binding-constraint", "sup-attained", ...
  PointId center = 0;
  double radius = 0.0;   // rho1 radius, gamma for outer, interval start for doubling
  double threshold = 0.0;  // largest failing separation candidate (entropic)
  double quantity = 0.0;   // packing count or diameter pinning the value
  std::string note;

  nlohmann::json to_json() const;
};

struct ScaleValue {
  double value = 0.0;
  ScaleWitness witness;
  // Guard for the impossible "no valid separation" case; value is then the
  // rho2 diameter.
  bool valid_set_empty = false;
};

struct ScaleReport {
  double alpha = 0.0;
  ScaleValue entropic;
  ScaleValue diametric;
  std::optional<ScaleValue> doubling;  // single-metric only
  std::optional<ScaleValue> outer;     // single-metric only

  nlohmann::json to_json() const;
};

// Per-space engine. Caches spectra, per-center distance orderings, ball
// diameters and packing bounds, so repeated scale queries at different
// alphas stay cheap. Not thread-safe (internal memo tables).
class ScaleEngine {
 public:
  explicit ScaleEngine(const FiniteBimetricSpace& space, ScaleOptions options = {});
  ~ScaleEngine();

  ScaleEngine(const ScaleEngine&) = delete;
  ScaleEngine& operator=(const ScaleEngine&) = delete;

  const FiniteBimetricSpace& space() const;

  // inf{s > 0 : N2(B1(x,r), s) <= e^(alpha r) for all x, r}.
  ScaleValue entropic(double alpha);
  // sup over x, r of diam2(B1(x,r)) e^(-alpha r).
  ScaleValue diametric(double alpha);
  // inf{s > 0 : N(B(x,2s), s) <= e^(2 alpha s) for all x}; single metric.
  ScaleValue doubling(double alpha);
  // inf over gamma of gamma + ln N(Z,gamma) / alpha; single metric.
  ScaleValue outer(double alpha);

  ScaleReport report(double alpha);

  // Exact packing number of a subset, memoized. Used by the scans and by
  // the mechanism-side lemma checks.
  std::size_t packing_count(int metric_index, const std::vector<PointId>& subset,
                            double epsilon);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot conveniences.
ScaleValue entropic_scale(const FiniteBimetricSpace& space, double alpha,
                          const ScaleOptions& options = {});
ScaleValue diametric_scale(const FiniteBimetricSpace& space, double alpha,
                           const ScaleOptions& options = {});
ScaleValue doubling_scale(const FiniteBimetricSpace& space, double alpha,
                          const ScaleOptions& options = {});
ScaleValue outer_scale(const FiniteBimetricSpace& space, double alpha,
                       const ScaleOptions& options = {});

struct RelationCheck {
  std::string relation;
  bool applicable = false;
  bool pass = false;
  double lhs = 0.0, rhs = 0.0;
  std::string note;
};

struct RelationReport {
  double alpha = 0.0;
  std::vector<RelationCheck> checks;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

// Universally valid inter-scale relations (single metric):
//   (a) doubling <= entropic,
//   (b) entropic <= 2 * outer,
//   (c) 1/alpha >= 2 diam  implies  entropic >= diam/2,
//   (d) N(Z,s) >= N(Z,ks)^2  implies  s/2 <= outer <= 2ks, for tested k.
// A failure signals an implementation bug.
RelationReport verify_scale_relations(const FiniteBimetricSpace& space,
                                      double alpha,
                                      const ScaleOptions& options = {});

}  // namespace mplab
