#pragma once

// Test-only brute-force oracles. Deliberately independent of the library's
// branch-and-bound packing and candidate-set scale scans: packing numbers
// come from exhaustive subset enumeration, scale values from dense grids.

#include <cstddef>
#include <vector>

#include "mplab/space.hpp"

namespace mplab::oracle {

// Max cardinality of a strictly-epsilon-separated subset, by enumerating
// all 2^|subset| subsets. Requires |subset| <= 20.
std::size_t packing_brute_force(const FiniteBimetricSpace& space, int metric_index,
                                const std::vector<PointId>& subset, double epsilon);

// Step-function view of the packing number of one subset: N(eps) for any
// eps, precomputed from the exhaustive enumeration.
class PackingTable {
 public:
  PackingTable(const FiniteBimetricSpace& space, int metric_index,
               const std::vector<PointId>& subset);
  std::size_t at(double epsilon) const;

 private:
  // (min pairwise distance, size) per subset, condensed to a step function:
  // thresholds_ sorted ascending, count_at_[i] = N for eps < thresholds_[i].
  std::vector<double> thresholds_;
  std::vector<std::size_t> counts_;
};

struct GridScales {
  double entropic = 0.0;
  double diametric = 0.0;
  double doubling = 0.0;
  double outer = 0.0;
  double step = 0.0;
};

// Dense-grid scan: grid_points values of s over [0, diam2]; for each s the
// defining constraints are checked with brute-force packing numbers, using
// every center and every ball-changing radius. The reported value is the
// smallest grid-valid candidate (for the infima) or the grid minimum of
// the objective (outer). Requires n <= 12.
GridScales grid_scale_oracle(const FiniteBimetricSpace& space, double alpha,
                             std::size_t grid_points = 10000);

}  // namespace mplab::oracle
