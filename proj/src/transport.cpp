#include "mplab/transport.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mplab {

namespace {

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

double LatticeMeasure::coord(std::size_t idx, int dim) const {
  return static_cast<double>(icoord(idx, dim)) / static_cast<double>(n);
}

int LatticeMeasure::icoord(std::size_t idx, int dim) const {
  // Last dimension fastest.
  std::size_t div = 1;
  for (int t = d - 1; t > dim; --t) div *= static_cast<std::size_t>(n);
  return static_cast<int>((idx / div) % static_cast<std::size_t>(n)) + 1;
}

LatticeMeasure make_lattice_measure(int d, int n, std::int64_t den,
                                    std::vector<std::int64_t> nums) {
  if (d < 1 || n < 1 || den < 1) throw std::domain_error("lattice measure: bad shape");
  if (nums.size() != static_cast<std::size_t>(ipow(n, d))) {
    throw std::domain_error("lattice measure: weight count does not match grid");
  }
  std::int64_t total = 0;
  for (std::int64_t v : nums) {
    if (v < 0) throw std::domain_error("lattice measure: negative weight");
    total += v;
  }
  if (total != den) throw std::domain_error("lattice measure: weights do not sum to one");
  LatticeMeasure m;
  m.d = d;
  m.n = n;
  m.den = den;
  m.nums = std::move(nums);
  return m;
}

W1Result w1_distance(const LatticeMeasure& mu, const LatticeMeasure& nu) {
  if (mu.d != nu.d || mu.n != nu.n) {
    throw std::invalid_argument("w1_distance: measures live on different grids");
  }
  std::size_t support = 0;
  for (std::int64_t v : mu.nums) support += (v > 0);
  for (std::int64_t v : nu.nums) support += (v > 0);
  if (support > 400) throw std::domain_error("w1_distance: combined support exceeds 400 atoms");

  const std::int64_t common = std::lcm(mu.den, nu.den);
  const std::int64_t fa = common / mu.den;
  const std::int64_t fb = common / nu.den;

  // Shared mass moves at zero cost; keep only the difference.
  std::vector<std::size_t> sidx, didx;
  std::vector<std::int64_t> supply, demand;
  for (std::size_t i = 0; i < mu.nums.size(); ++i) {
    const std::int64_t a = mu.nums[i] * fa;
    const std::int64_t b = nu.nums[i] * fb;
    if (a > b) {
      sidx.push_back(i);
      supply.push_back(a - b);
    } else if (b > a) {
      didx.push_back(i);
      demand.push_back(b - a);
    }
  }

  W1Result res;
  res.den = common * mu.n;
  if (sidx.empty()) {
    res.num = 0;
    res.den = 1;
    return res;
  }

  const std::size_t S = sidx.size(), T = didx.size();
  // Integer ground costs: l-infinity distance times n.
  std::vector<std::int64_t> cost(S * T);
  for (std::size_t i = 0; i < S; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      std::int64_t c = 0;
      for (int t = 0; t < mu.d; ++t) {
        c = std::max<std::int64_t>(
            c, std::abs(mu.icoord(sidx[i], t) - mu.icoord(didx[j], t)));
      }
      cost[i * T + j] = c;
    }
  }

  // Successive shortest paths with potentials. Node 0..S-1 = supplies,
  // S..S+T-1 = demands. Residual backward arcs exist where flow > 0.
  std::vector<std::int64_t> flow(S * T, 0);
  std::vector<std::int64_t> pot(S + T, 0);
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  std::int64_t remaining = std::accumulate(supply.begin(), supply.end(), std::int64_t{0});
  while (remaining > 0) {
    // Dijkstra from all supplies with remaining mass (dense graph).
    std::vector<std::int64_t> dist(S + T, kInf);
    std::vector<int> parent(S + T, -1);
    std::vector<bool> done(S + T, false);
    for (std::size_t i = 0; i < S; ++i) {
      if (supply[i] > 0) dist[i] = 0;
    }
    for (;;) {
      std::size_t u = S + T;
      std::int64_t best = kInf;
      for (std::size_t v = 0; v < S + T; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == S + T) break;
      done[u] = true;
      if (u < S) {
        for (std::size_t j = 0; j < T; ++j) {
          const std::int64_t rc = cost[u * T + j] + pot[u] - pot[S + j];
          if (dist[u] + rc < dist[S + j]) {
            dist[S + j] = dist[u] + rc;
            parent[S + j] = static_cast<int>(u);
          }
        }
      } else {
        const std::size_t j = u - S;
        for (std::size_t i = 0; i < S; ++i) {
          if (flow[i * T + j] > 0) {
            const std::int64_t rc = -cost[i * T + j] + pot[u] - pot[i];
            if (dist[u] + rc < dist[i]) {
              dist[i] = dist[u] + rc;
              parent[i] = static_cast<int>(u);
            }
          }
        }
      }
    }

    // Cheapest reachable demand with remaining need.
    std::size_t target = S + T;
    std::int64_t best = kInf;
    for (std::size_t j = 0; j < T; ++j) {
      if (demand[j] > 0 && dist[S + j] < best) {
        best = dist[S + j];
        target = S + j;
      }
    }
    if (target == S + T) throw std::logic_error("w1_distance: no augmenting path");

    // Bottleneck along the path.
    std::int64_t push = demand[target - S];
    for (std::size_t v = target; parent[v] != -1;) {
      const std::size_t u = static_cast<std::size_t>(parent[v]);
      if (u < S && v >= S) {
        // forward arc: no capacity
      } else {
        push = std::min(push, flow[v * T + (u - S)]);
      }
      v = u;
    }
    {
      // Path root is a supply node.
      std::size_t v = target;
      while (parent[v] != -1) v = static_cast<std::size_t>(parent[v]);
      push = std::min(push, supply[v]);
    }

    for (std::size_t v = target; parent[v] != -1;) {
      const std::size_t u = static_cast<std::size_t>(parent[v]);
      if (u < S && v >= S) {
        flow[u * T + (v - S)] += push;
      } else {
        flow[v * T + (u - S)] -= push;
      }
      v = u;
    }
    {
      std::size_t v = target;
      while (parent[v] != -1) v = static_cast<std::size_t>(parent[v]);
      supply[v] -= push;
    }
    demand[target - S] -= push;
    remaining -= push;

    for (std::size_t v = 0; v < S + T; ++v) {
      if (dist[v] < kInf) pot[v] += dist[v];
    }
  }

  std::int64_t total = 0;
  for (std::size_t i = 0; i < S; ++i) {
    for (std::size_t j = 0; j < T; ++j) total += flow[i * T + j] * cost[i * T + j];
  }

  // Complementary slackness on the final potentials certifies optimality.
  for (std::size_t i = 0; i < S; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      const std::int64_t rc = cost[i * T + j] + pot[i] - pot[S + j];
      if (rc < 0 || (flow[i * T + j] > 0 && rc != 0)) {
        throw std::logic_error("w1_distance: reduced-cost optimality check failed");
      }
    }
  }

  res.num = total;
  const std::int64_t g = std::gcd(res.num, res.den);
  if (g > 1) {
    res.num /= g;
    res.den /= g;
  }
  return res;
}

}  // namespace mplab
