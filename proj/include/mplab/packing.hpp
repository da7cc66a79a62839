#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mplab/space.hpp"

namespace mplab {

// Separation is strict: a set is epsilon-separated when all pairwise
// distances are strictly greater than epsilon. Balls stay closed; the
// asymmetry is deliberate and shared by every consumer of this module.

struct SeparatedSet {
  std::vector<PointId> points;
  double epsilon = 0.0;
  int metric_index = 1;
  bool maximal = false;
};

struct PackingResult {
  std::size_t count = 0;
  SeparatedSet witness;
  bool exact = false;  // true = proved optimal, false = greedy lower bound
};

enum class PackingMode { exact, greedy };

struct PackingOptions {
  PackingMode mode = PackingMode::exact;
  // Exact mode refuses branch-and-bound on any residual component larger
  // than this after reductions (component split, pendant/isolated removal,
  // clique detection).
  std::size_t exact_cap = 40;
};

// Raised when exact mode hits the component cap. Callers may fall back to
// greedy mode.
class CapExceededError : public std::runtime_error {
 public:
  CapExceededError(std::size_t component, std::size_t cap)
      : std::runtime_error("exact packing cap exceeded: component of " +
                           std::to_string(component) + " points exceeds cap " +
                           std::to_string(cap)),
        component_size(component) {}
  std::size_t component_size;
};

// Greedy maximal epsilon-separated subset, scanning `order` (default:
// ascending PointId). The result is maximal, hence also an epsilon-cover
// of the subset; that is re-checked before returning.
SeparatedSet greedy_maximal_separated(
    const FiniteBimetricSpace& space, int metric_index,
    const std::vector<PointId>& subset, double epsilon,
    const std::optional<std::vector<PointId>>& order = std::nullopt);

// Packing number of `subset` at scale epsilon. Exact mode solves max
// independent set of the conflict graph (edges = pairs at distance
// <= epsilon) by branch-and-bound with greedy seeding and clique-cover
// bounds.
PackingResult packing_number(const FiniteBimetricSpace& space, int metric_index,
                             const std::vector<PointId>& subset, double epsilon,
                             const PackingOptions& options = {});

// A set C within subset such that every point of subset lies within
// epsilon of C. Produced as a greedy maximal separated set, so |C| is
// also a packing lower bound.
std::vector<PointId> covering_witness(const FiniteBimetricSpace& space,
                                      int metric_index,
                                      const std::vector<PointId>& subset,
                                      double epsilon);

struct FactCheck {
  std::string fact;
  std::string params;
  double lhs = 0.0, rhs = 0.0;
  bool pass = false;
};

struct FactReport {
  std::vector<FactCheck> checks;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

// Spot-checks packing facts on sampled subsets and scales:
// - a maximal separated set covers,
// - N(B,s) <= N(B,r) * sup_a N(B(a,r),s),
// - sup_x N(B(x,s 2^k0),s) <= prod_k sup_x N(B(x,s 2^k), s 2^(k-1)).
// Any failure indicates an implementation bug.
FactReport verify_packing_facts(const FiniteBimetricSpace& space,
                                int metric_index, std::size_t samples,
                                std::uint64_t seed);

namespace detail {

// Exact/bounded max-independent-set outcome over a conflict graph.
struct MisOutcome {
  std::size_t lower = 0;                  // size of a found independent set
  std::size_t upper = 0;                  // proved upper bound
  std::vector<PointId> witness;           // achieves `lower`
  bool exact = false;                     // lower == upper
};

// Conflict graph: vertices = subset, edges = pairs at distance <= epsilon.
// stop_above: abandon the search as soon as an independent set larger
// than the threshold is found (outcome is then a valid lower bound only).
MisOutcome max_independent_set(const FiniteBimetricSpace& space,
                               int metric_index,
                               const std::vector<PointId>& subset,
                               double epsilon, std::size_t cap,
                               std::optional<std::size_t> stop_above);

}  // namespace detail

}  // namespace mplab
