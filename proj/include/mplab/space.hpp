#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace mplab {

using PointId = std::size_t;

// One violated metric axiom, with the witnessing points.
struct MetricViolation {
  std::string axiom;  // "diagonal", "positivity", "symmetry", "triangle", "ultrametric"
  int metric_index = 0;
  PointId i = 0, j = 0, k = 0;
  double lhs = 0.0, rhs = 0.0;

  std::string describe() const;
};

struct ValidationReport {
  std::vector<MetricViolation> violations;

  bool ok() const { return violations.empty(); }
  nlohmann::json to_json() const;
};

// A finite point set carrying two metrics, stored as dense symmetric
// matrices. rho1 is the privacy metric, rho2 the accuracy metric.
// Immutable after construction; safe for concurrent reads.
//
// The constructor enforces structure only (square matrices of matching
// size, finite nonnegative entries). Metric axioms are checked by
// validate(), which reports every violation instead of throwing.
class FiniteBimetricSpace {
 public:
  FiniteBimetricSpace(std::vector<std::string> labels,
                      std::vector<double> rho1_row_major,
                      std::vector<double> rho2_row_major,
                      bool ultrametric2_claimed);

  std::size_t size() const { return n_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool ultrametric2_claimed() const { return ultrametric2_claimed_; }
  // True when the two matrices are elementwise identical.
  bool single_metric() const { return single_metric_; }

  // metric_index is 1 or 2.
  double dist(int metric_index, PointId a, PointId b) const {
    return matrix(metric_index)[a * n_ + b];
  }
  const std::vector<double>& matrix(int metric_index) const;
  const double* row(int metric_index, PointId a) const {
    return matrix(metric_index).data() + a * n_;
  }

  ValidationReport validate() const;

  // Schema: {"labels":[...], "rho1":[[...]], "rho2":[[...]], "ultrametric2": bool}.
  // "rho2" may be absent, in which case rho2 := rho1.
  static FiniteBimetricSpace from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  std::size_t n_;
  std::vector<std::string> labels_;
  std::vector<double> rho1_, rho2_;
  bool ultrametric2_claimed_;
  bool single_metric_;
};

// Closed ball {y : rho_m(center, y) <= r}, ids ascending. Requires r >= 0.
std::vector<PointId> ball(const FiniteBimetricSpace& space, int metric_index,
                          PointId center, double r);

// Max pairwise distance within subset; 0 for singletons. Throws
// std::domain_error on an empty subset.
double diameter(const FiniteBimetricSpace& space, int metric_index,
                const std::vector<PointId>& subset);

// Sorted distinct positive off-diagonal distances of one metric. Adjacent
// values closer than rel_tol (relative) are merged; gallery spaces emit
// exact dyadic distances so merging never fires there.
struct DistanceSpectrum {
  std::vector<double> values;
};

DistanceSpectrum distance_spectrum(const FiniteBimetricSpace& space,
                                   int metric_index, double rel_tol = 1e-12);

// Exhaustive max-triangle check: rho(x,z) <= max(rho(x,y), rho(y,z)).
bool is_ultrametric(const FiniteBimetricSpace& space, int metric_index);

}  // namespace mplab
