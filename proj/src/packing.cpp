#include "mplab/packing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mplab/rng.hpp"

namespace mplab {

namespace {

// Fixed-width bitset over dynamically sized vertex sets.
struct Bits {
  std::vector<std::uint64_t> w;

  explicit Bits(std::size_t n = 0) : w((n + 63) / 64, 0) {}
  void set(std::size_t i) { w[i >> 6] |= 1ull << (i & 63); }
  void reset(std::size_t i) { w[i >> 6] &= ~(1ull << (i & 63)); }
  bool test(std::size_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  bool empty() const {
    for (auto x : w) if (x) return false;
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : w) c += static_cast<std::size_t>(__builtin_popcountll(x));
    return c;
  }
  void and_not(const Bits& o) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] &= ~o.w[i];
  }
  std::size_t count_and(const Bits& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      c += static_cast<std::size_t>(__builtin_popcountll(w[i] & o.w[i]));
    return c;
  }
  // Lowest set bit index, or npos.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t first() const {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i]) return (i << 6) + static_cast<std::size_t>(__builtin_ctzll(w[i]));
    }
    return npos;
  }
};

struct ConflictGraph {
  std::size_t n = 0;
  std::vector<Bits> adj;  // closed off-diagonal adjacency

  explicit ConflictGraph(std::size_t n_) : n(n_), adj(n_, Bits(n_)) {}
};

ConflictGraph build_conflict_graph(const FiniteBimetricSpace& space,
                                   int metric_index,
                                   const std::vector<PointId>& subset,
                                   double epsilon) {
  ConflictGraph g(subset.size());
  for (std::size_t a = 0; a < subset.size(); ++a) {
    const double* row = space.row(metric_index, subset[a]);
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      if (row[subset[b]] <= epsilon) {
        g.adj[a].set(b);
        g.adj[b].set(a);
      }
    }
  }
  return g;
}

// Greedy independent set, ascending vertex order within mask.
std::vector<std::size_t> greedy_independent(const ConflictGraph& g, const Bits& mask) {
  std::vector<std::size_t> out;
  Bits blocked(g.n);
  for (std::size_t v = 0; v < g.n; ++v) {
    if (mask.test(v) && !blocked.test(v)) {
      out.push_back(v);
      blocked.set(v);
      for (std::size_t i = 0; i < blocked.w.size(); ++i) blocked.w[i] |= g.adj[v].w[i];
    }
  }
  return out;
}

// Greedy clique cover of mask; the number of cliques bounds the
// independence number from above.
std::size_t greedy_clique_cover(const ConflictGraph& g, const Bits& mask) {
  // common[c] = vertices adjacent to every member of clique c (within mask).
  std::vector<Bits> common;
  for (std::size_t v = 0; v < g.n; ++v) {
    if (!mask.test(v)) continue;
    bool placed = false;
    for (auto& c : common) {
      if (c.test(v)) {
        for (std::size_t i = 0; i < c.w.size(); ++i) c.w[i] &= g.adj[v].w[i];
        placed = true;
        break;
      }
    }
    if (!placed) {
      Bits c = g.adj[v];
      for (std::size_t i = 0; i < c.w.size(); ++i) c.w[i] &= mask.w[i];
      common.push_back(std::move(c));
    }
  }
  return common.size();
}

struct BnbState {
  const ConflictGraph* g = nullptr;
  std::size_t best = 0;
  std::vector<std::size_t> best_set;
  std::vector<std::size_t> stack;
  std::optional<std::size_t> stop_above;
  bool stopped = false;
};

void bnb(BnbState& st, Bits cand, std::size_t cur) {
  if (st.stopped) return;
  const std::size_t remaining = cand.count();
  if (cur + remaining <= st.best) return;
  if (remaining == 0) {
    st.best = cur;
    st.best_set = st.stack;
    if (st.stop_above && st.best > *st.stop_above) st.stopped = true;
    return;
  }
  if (cur + greedy_clique_cover(*st.g, cand) <= st.best) return;

  // Branch on a maximum-degree vertex (lowest id on ties).
  std::size_t v = Bits::npos, vdeg = 0;
  for (std::size_t u = 0; u < st.g->n; ++u) {
    if (!cand.test(u)) continue;
    const std::size_t d = st.g->adj[u].count_and(cand);
    if (v == Bits::npos || d > vdeg) {
      v = u;
      vdeg = d;
    }
  }

  // Include v.
  Bits inc = cand;
  inc.reset(v);
  inc.and_not(st.g->adj[v]);
  st.stack.push_back(v);
  bnb(st, std::move(inc), cur + 1);
  st.stack.pop_back();
  if (st.stopped) return;

  // Exclude v.
  cand.reset(v);
  bnb(st, std::move(cand), cur);
}

// Solves one connected component (given as a vertex mask). Applies
// reductions first: isolated and degree-1 vertices are always taken,
// clique components contribute one vertex.
void solve_component(const ConflictGraph& g, Bits mask, std::size_t cap,
                     std::optional<std::size_t> stop_above,
                     std::size_t& lower, std::size_t& upper_gap,
                     std::vector<std::size_t>& chosen, bool& exact) {
  bool reduced = true;
  while (reduced) {
    reduced = false;
    for (std::size_t v = 0; v < g.n && !reduced; ++v) {
      if (!mask.test(v)) continue;
      const std::size_t d = g.adj[v].count_and(mask);
      if (d == 0) {
        chosen.push_back(v);
        ++lower;
        mask.reset(v);
        reduced = true;
      } else if (d == 1) {
        // Taking a pendant vertex is always optimal.
        std::size_t u = Bits::npos;
        for (std::size_t x = 0; x < g.n; ++x) {
          if (mask.test(x) && g.adj[v].test(x)) { u = x; break; }
        }
        chosen.push_back(v);
        ++lower;
        mask.reset(v);
        mask.reset(u);
        reduced = true;
      }
    }
  }
  const std::size_t k = mask.count();
  if (k == 0) return;

  // Clique component: exactly one vertex fits.
  std::size_t edges2 = 0;
  for (std::size_t v = 0; v < g.n; ++v) {
    if (mask.test(v)) edges2 += g.adj[v].count_and(mask);
  }
  if (edges2 == k * (k - 1)) {
    chosen.push_back(mask.first());
    ++lower;
    return;
  }

  // Pendant removal may have disconnected the residual graph; re-split.
  Bits seen(g.n);
  std::vector<Bits> comps;
  for (std::size_t v = 0; v < g.n; ++v) {
    if (!mask.test(v) || seen.test(v)) continue;
    Bits comp(g.n);
    std::vector<std::size_t> queue{v};
    comp.set(v);
    seen.set(v);
    while (!queue.empty()) {
      const std::size_t u = queue.back();
      queue.pop_back();
      for (std::size_t x = 0; x < g.n; ++x) {
        if (mask.test(x) && !seen.test(x) && g.adj[u].test(x)) {
          seen.set(x);
          comp.set(x);
          queue.push_back(x);
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  if (comps.size() > 1) {
    for (auto& c : comps) {
      solve_component(g, std::move(c), cap, stop_above, lower, upper_gap, chosen, exact);
      if (!exact) return;
    }
    return;
  }

  if (k > cap) throw CapExceededError(k, cap);

  BnbState st;
  st.g = &g;
  st.stop_above = stop_above;
  const auto seed = greedy_independent(g, mask);
  st.best = seed.size();
  st.best_set = seed;
  if (!(stop_above && st.best > *stop_above)) {
    bnb(st, mask, 0);
  }
  lower += st.best;
  for (auto v : st.best_set) chosen.push_back(v);
  if (st.stopped) {
    exact = false;
    upper_gap = 1;  // upper bound unknown beyond stop_above
  }
}

bool is_separated(const FiniteBimetricSpace& space, int metric_index,
                  const std::vector<PointId>& pts, double epsilon) {
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      if (space.dist(metric_index, pts[a], pts[b]) <= epsilon) return false;
    }
  }
  return true;
}

}  // namespace

namespace detail {

MisOutcome max_independent_set(const FiniteBimetricSpace& space,
                               int metric_index,
                               const std::vector<PointId>& subset,
                               double epsilon, std::size_t cap,
                               std::optional<std::size_t> stop_above) {
  const ConflictGraph g = build_conflict_graph(space, metric_index, subset, epsilon);
  Bits all(g.n);
  for (std::size_t v = 0; v < g.n; ++v) all.set(v);

  std::size_t lower = 0, upper_gap = 0;
  std::vector<std::size_t> chosen;
  bool exact = true;
  solve_component(g, std::move(all), cap, stop_above, lower, upper_gap, chosen, exact);

  MisOutcome out;
  out.lower = lower;
  out.exact = exact;
  out.upper = exact ? lower : static_cast<std::size_t>(-1);
  out.witness.reserve(chosen.size());
  for (auto v : chosen) out.witness.push_back(subset[v]);
  std::sort(out.witness.begin(), out.witness.end());
  return out;
}

}  // namespace detail

SeparatedSet greedy_maximal_separated(
    const FiniteBimetricSpace& space, int metric_index,
    const std::vector<PointId>& subset, double epsilon,
    const std::optional<std::vector<PointId>>& order) {
  if (subset.empty()) throw std::domain_error("greedy_maximal_separated: empty subset");
  const std::vector<PointId>* scan = &subset;
  std::vector<PointId> default_order;
  if (order) {
    if (order->size() != subset.size()) {
      throw std::invalid_argument("order must be a permutation of subset");
    }
    scan = &*order;
  } else {
    default_order = subset;
    std::sort(default_order.begin(), default_order.end());
    scan = &default_order;
  }

  SeparatedSet result;
  result.epsilon = epsilon;
  result.metric_index = metric_index;
  result.maximal = true;
  for (PointId p : *scan) {
    bool ok = true;
    for (PointId q : result.points) {
      if (space.dist(metric_index, p, q) <= epsilon) {
        ok = false;
        break;
      }
    }
    if (ok) result.points.push_back(p);
  }

  // Maximality doubles as covering; re-check both before returning.
  for (PointId p : subset) {
    double nearest = std::numeric_limits<double>::infinity();
    for (PointId q : result.points) {
      nearest = std::min(nearest, space.dist(metric_index, p, q));
    }
    if (nearest > epsilon) {
      throw std::logic_error("greedy_maximal_separated: result is not a cover");
    }
  }
  return result;
}

PackingResult packing_number(const FiniteBimetricSpace& space, int metric_index,
                             const std::vector<PointId>& subset, double epsilon,
                             const PackingOptions& options) {
  if (subset.empty()) throw std::domain_error("packing_number: empty subset");
  PackingResult res;
  if (options.mode == PackingMode::greedy) {
    SeparatedSet s = greedy_maximal_separated(space, metric_index, subset, epsilon);
    res.count = s.points.size();
    res.witness = std::move(s);
    res.exact = false;
    return res;
  }
  detail::MisOutcome mis = detail::max_independent_set(
      space, metric_index, subset, epsilon, options.exact_cap, std::nullopt);
  res.count = mis.lower;
  res.exact = true;
  res.witness.points = std::move(mis.witness);
  res.witness.epsilon = epsilon;
  res.witness.metric_index = metric_index;
  res.witness.maximal = false;
  if (!is_separated(space, metric_index, res.witness.points, epsilon)) {
    throw std::logic_error("packing_number: witness is not separated");
  }
  return res;
}

std::vector<PointId> covering_witness(const FiniteBimetricSpace& space,
                                      int metric_index,
                                      const std::vector<PointId>& subset,
                                      double epsilon) {
  return greedy_maximal_separated(space, metric_index, subset, epsilon).points;
}

bool FactReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

nlohmann::json FactReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"fact", c.fact},
                   {"params", c.params},
                   {"lhs", c.lhs},
                   {"rhs", c.rhs},
                   {"pass", c.pass}});
  }
  return {{"all_pass", all_pass()}, {"checks", arr}};
}

FactReport verify_packing_facts(const FiniteBimetricSpace& space,
                                int metric_index, std::size_t samples,
                                std::uint64_t seed) {
  FactReport report;
  const std::size_t n = space.size();
  std::vector<PointId> full(n);
  for (PointId i = 0; i < n; ++i) full[i] = i;
  const DistanceSpectrum spec = distance_spectrum(space, metric_index);
  if (spec.values.empty()) return report;

  CounterRng rng(seed);
  const PackingOptions exact{PackingMode::exact, 4096};

  const auto pick_scale = [&]() {
    // Spectrum values, midpoints between them, and a sub-minimum value.
    const std::size_t m = spec.values.size();
    const std::uint64_t r = rng.next_below(2 * m + 1);
    if (r == 0) return spec.values.front() / 2.0;
    if (r <= m) return spec.values[r - 1];
    const std::size_t k = static_cast<std::size_t>(r - m - 1);
    const double hi = (k + 1 < m) ? spec.values[k + 1] : spec.values[k] * 1.5;
    return (spec.values[k] + hi) / 2.0;
  };

  for (std::size_t it = 0; it < samples; ++it) {
    // Sample B: full set, a ball, or a random subset.
    std::vector<PointId> B;
    const std::uint64_t mode = rng.next_below(3);
    if (mode == 0) {
      B = full;
    } else if (mode == 1) {
      B = ball(space, metric_index, rng.next_below(n), pick_scale());
    } else {
      for (PointId i = 0; i < n; ++i) {
        if (rng.next_uniform() < 0.5) B.push_back(i);
      }
      if (B.empty()) B.push_back(rng.next_below(n));
    }
    double r = pick_scale(), s = pick_scale();
    if (r < s) std::swap(r, s);

    // Chain rule with one term.
    const std::size_t lhs = packing_number(space, metric_index, B, s, exact).count;
    const std::size_t nr = packing_number(space, metric_index, B, r, exact).count;
    std::size_t sup_inner = 0;
    for (PointId a : B) {
      const std::vector<PointId> ba = ball(space, metric_index, a, r);
      sup_inner = std::max(sup_inner,
                           packing_number(space, metric_index, ba, s, exact).count);
    }
    std::ostringstream params;
    params << "|B|=" << B.size() << " r=" << r << " s=" << s;
    report.checks.push_back({"chain-rule", params.str(),
                             static_cast<double>(lhs),
                             static_cast<double>(nr) * static_cast<double>(sup_inner),
                             lhs <= nr * sup_inner});

    // Covering property of a greedy maximal set.
    const SeparatedSet sep = greedy_maximal_separated(space, metric_index, B, s);
    bool covers = true;
    for (PointId p : B) {
      double nearest = std::numeric_limits<double>::infinity();
      for (PointId q : sep.points) {
        nearest = std::min(nearest, space.dist(metric_index, p, q));
      }
      covers = covers && nearest <= s;
    }
    report.checks.push_back({"packing-implies-covering", params.str(),
                             static_cast<double>(sep.points.size()), s, covers});
  }

  // Chain rule with many terms, on the full space.
  for (std::size_t k0 = 1; k0 <= 3; ++k0) {
    const double s = spec.values.front() * 0.75;
    std::size_t lhs = 0;
    double rhs = 1.0;
    for (PointId x = 0; x < n; ++x) {
      const auto bx = ball(space, metric_index, x, s * std::pow(2.0, static_cast<double>(k0)));
      lhs = std::max(lhs, packing_number(space, metric_index, bx, s, exact).count);
    }
    for (std::size_t k = 1; k <= k0; ++k) {
      std::size_t factor = 0;
      for (PointId x = 0; x < n; ++x) {
        const auto bx = ball(space, metric_index, x, s * std::pow(2.0, static_cast<double>(k)));
        factor = std::max(factor,
                          packing_number(space, metric_index, bx,
                                         s * std::pow(2.0, static_cast<double>(k - 1)), exact)
                              .count);
      }
      rhs *= static_cast<double>(factor);
    }
    std::ostringstream params;
    params << "s=" << s << " k0=" << k0;
    report.checks.push_back({"chain-rule-many-terms", params.str(),
                             static_cast<double>(lhs), rhs,
                             static_cast<double>(lhs) <= rhs});
  }
  return report;
}

}  // namespace mplab
