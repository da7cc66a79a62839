#pragma once

#include <cstdint>
#include <vector>

namespace mplab {

// A probability measure on the grid S = {1/n, ..., n/n}^d with exact
// rational weights nums[i] / den. Cells are indexed row-major with the
// last dimension fastest.
struct LatticeMeasure {
  int d = 1;
  int n = 1;
  std::int64_t den = 1;
  std::vector<std::int64_t> nums;  // size n^d, sums to den

  std::size_t cells() const { return nums.size(); }
  // Coordinate of cell `idx` along dimension `dim`, as (index+1)/n.
  double coord(std::size_t idx, int dim) const;
  // Integer coordinate in 1..n.
  int icoord(std::size_t idx, int dim) const;
};

LatticeMeasure make_lattice_measure(int d, int n, std::int64_t den,
                                    std::vector<std::int64_t> nums);

// Exact 1-Wasserstein distance under the l-infinity ground metric, as the
// reduced fraction num/den. Computed by integer successive-shortest-path
// min-cost flow over the bipartite support graph; a reduced-cost
// complementary-slackness check runs on the final flow.
struct W1Result {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

W1Result w1_distance(const LatticeMeasure& mu, const LatticeMeasure& nu);

}  // namespace mplab
