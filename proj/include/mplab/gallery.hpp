#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mplab/space.hpp"
#include "mplab/transport.hpp"

namespace mplab {

// Example spaces with known geometry, used as test beds for the scales and
// mechanisms. Constructors emit exact dyadic distances wherever the
// construction allows (cubes, l1/l-infinity grids), so spectra and scale
// comparisons never hinge on tolerances.

// Uniform grid on [-1,1]^d intersected with the unit p-ball, both metrics
// the p-norm. p_norm is 1, 2, or infinity. grid_n must be odd, >= 3.
// The l2 variant runs a shortest-path closure over the point set to absorb
// ulp-level triangle slack on collinear triples.
FiniteBimetricSpace grid_ball_space(int d, int grid_n, double p_norm,
                                    std::size_t max_points = 5000);

// {0,1}^d with Hamming distance on both metrics. d <= 12.
FiniteBimetricSpace hamming_cube(int d);

// Strictly decreasing positive level values f, g on depths 1..L.
struct UltrametricProfile {
  std::vector<double> f, g;

  std::size_t depth() const { return f.size(); }
  // f(k) = g(k) = base^-k.
  static UltrametricProfile baire(double base, std::size_t L);
  // f(k) = f_base^-k, g(k) = g_base^-k.
  static UltrametricProfile geometric(double f_base, double g_base, std::size_t L);
};

// {0,1}^L with rho1(x,y) = f(first differing index), rho2 likewise with g.
// Both metrics are ultrametrics; the rho2 claim is set. L <= 12.
FiniteBimetricSpace fg_ultrametric_cube(const UltrametricProfile& profile);

// Closed-form entropic and diametric scales of the (untruncated) f-g cube,
// evaluated over depths 1..L. entropic = g(floor(inf_k (k + alpha f(k)/ln 2)))
// when the floor lands within 1..L; diametric = sup_k g(k) e^(-alpha f(k)).
// truncation_safe is set only when no optimum sits at the boundary k = L,
// so the truncated evaluation provably agrees with the full cube.
struct ClosedForms {
  std::optional<double> entropic;
  double diametric = 0.0;
  std::size_t entropic_k0 = 0;     // floor of the infimum
  std::size_t entropic_argmin = 0; // k achieving the infimum
  std::size_t diametric_argmax = 0;
  bool truncation_safe = false;
};

ClosedForms theorem64_closed_forms(const UltrametricProfile& profile, double alpha);

// All measures with weights in multiples of 1/denom on the grid
// {1/n,...,n/n}^d, both metrics the exact 1-Wasserstein distance with
// l-infinity ground metric. Point count is capped at max_points.
FiniteBimetricSpace lattice_measure_space(int d, int n, int denom,
                                          std::size_t max_points = 5000);
// The measures themselves, in the same order as the space's points.
std::vector<LatticeMeasure> lattice_measure_list(int d, int n, int denom,
                                                 std::size_t max_points = 5000);

// Rounding cover of the space of measures: grid S with n = ceil(2/gamma),
// the count of grid measures with weights in multiples of 1/|S|, and a
// boustrophedon path through S whose total l-infinity length is at most
// n^(d-1).
struct CoverStructure {
  double gamma = 0.0;
  int d = 1;
  int n = 1;
  std::vector<std::size_t> salesman_path;  // permutation of cell indices
  double path_length = 0.0;
  std::optional<std::uint64_t> lambda_count;  // binom(2|S|-1, |S|-1) when it fits
  std::string lambda_count_str;               // always set (decimal)

  std::size_t cells() const { return salesman_path.size(); }
  nlohmann::json to_json() const;
};

CoverStructure wasserstein_cover(int d, double gamma);

// Walks the salesman path pushing fractional weight forward so that every
// output weight is a multiple of 1/|S|. The result is within 1/n of nu in
// 1-Wasserstein distance.
LatticeMeasure round_to_cover(const LatticeMeasure& nu, const CoverStructure& cover);

// Discrete 1-Lipschitz functions on {0, 1/grid_n, ..., 1} with f(0) = 0,
// values in value_step * Z and |f(t_{i+1}) - f(t_i)| <= 1/grid_n; both
// metrics the sup distance over the grid.
FiniteBimetricSpace lipschitz_net_space(int grid_n, double value_step,
                                        std::size_t max_points = 5000);

// Random metric space: complete-graph weights uniform on [0.5, 1.5],
// closed under shortest paths. Used by the property suites.
FiniteBimetricSpace random_closure_space(std::size_t n, std::uint64_t seed);

// exact binomial C(n, k) as a decimal string (stepwise exact division).
std::string binomial_string(std::uint64_t n, std::uint64_t k);

}  // namespace mplab
