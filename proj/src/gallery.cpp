#include "mplab/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mplab/rng.hpp"

namespace mplab {

namespace {

constexpr double kLn2 = 0.6931471805599453;

std::string join_coords(const std::vector<double>& c) {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) os << ",";
    os << c[i];
  }
  return os.str();
}

double p_distance(const std::vector<double>& a, const std::vector<double>& b, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Big-decimal helpers for the cover count (base 1e9 limbs, little endian).
using BigDec = std::vector<std::uint32_t>;

void big_mul(BigDec& x, std::uint64_t m) {
  std::uint64_t carry = 0;
  for (auto& limb : x) {
    const std::uint64_t v = static_cast<std::uint64_t>(limb) * m + carry;
    limb = static_cast<std::uint32_t>(v % 1000000000ull);
    carry = v / 1000000000ull;
  }
  while (carry) {
    x.push_back(static_cast<std::uint32_t>(carry % 1000000000ull));
    carry /= 1000000000ull;
  }
}

void big_div(BigDec& x, std::uint64_t d) {
  std::uint64_t rem = 0;
  for (std::size_t i = x.size(); i-- > 0;) {
    const std::uint64_t v = rem * 1000000000ull + x[i];
    x[i] = static_cast<std::uint32_t>(v / d);
    rem = v % d;
  }
  if (rem != 0) throw std::logic_error("binomial_string: non-exact division");
  while (x.size() > 1 && x.back() == 0) x.pop_back();
}

std::string big_to_string(const BigDec& x) {
  std::ostringstream os;
  os << x.back();
  for (std::size_t i = x.size() - 1; i-- > 0;) {
    os.width(9);
    os.fill('0');
    os << x[i];
  }
  return os.str();
}

}  // namespace

std::string binomial_string(std::uint64_t n, std::uint64_t k) {
  if (k > n) return "0";
  k = std::min(k, n - k);
  BigDec acc{1};
  for (std::uint64_t i = 1; i <= k; ++i) {
    big_mul(acc, n - k + i);
    big_div(acc, i);
  }
  return big_to_string(acc);
}

FiniteBimetricSpace grid_ball_space(int d, int grid_n, double p_norm,
                                    std::size_t max_points) {
  if (d < 1 || d > 3) throw std::domain_error("grid_ball_space: d must be 1..3");
  if (grid_n < 3 || grid_n % 2 == 0) {
    throw std::domain_error("grid_ball_space: grid_n must be odd and >= 3");
  }
  if (!(p_norm == 1.0 || p_norm == 2.0 || std::isinf(p_norm))) {
    throw std::domain_error("grid_ball_space: p_norm must be 1, 2 or inf");
  }
  std::vector<double> axis(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    axis[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid_n - 1);
  }
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(d, 0);
  for (;;) {
    std::vector<double> c(d);
    for (int t = 0; t < d; ++t) c[t] = axis[idx[t]];
    std::vector<double> origin(d, 0.0);
    if (p_distance(c, origin, p_norm) <= 1.0) pts.push_back(std::move(c));
    int t = d - 1;
    while (t >= 0 && ++idx[t] == grid_n) idx[t--] = 0;
    if (t < 0) break;
  }
  if (pts.size() > max_points) {
    throw std::domain_error("grid_ball_space: point cap exceeded");
  }
  const std::size_t n = pts.size();
  std::vector<std::string> labels(n);
  std::vector<double> rho(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = join_coords(pts[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = p_distance(pts[i], pts[j], p_norm);
      rho[i * n + j] = dij;
      rho[j * n + i] = dij;
    }
  }
  if (p_norm == 2.0) {
    // Shortest-path closure absorbs ulp-level triangle slack on collinear
    // triples of the square-root distances.
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double dik = rho[i * n + k];
        for (std::size_t j = 0; j < n; ++j) {
          rho[i * n + j] = std::min(rho[i * n + j], dik + rho[k * n + j]);
        }
      }
    }
  }
  return FiniteBimetricSpace(std::move(labels), rho, rho, false);
}

FiniteBimetricSpace hamming_cube(int d) {
  if (d < 1 || d > 12) throw std::domain_error("hamming_cube: d must be 1..12");
  const std::size_t n = std::size_t{1} << d;
  std::vector<std::string> labels(n);
  for (std::size_t x = 0; x < n; ++x) {
    std::string s(static_cast<std::size_t>(d), '0');
    for (int b = 0; b < d; ++b) {
      if (x & (std::size_t{1} << b)) s[static_cast<std::size_t>(b)] = '1';
    }
    labels[x] = s;
  }
  std::vector<double> rho(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = static_cast<double>(__builtin_popcountll(i ^ j));
      rho[i * n + j] = dij;
      rho[j * n + i] = dij;
    }
  }
  return FiniteBimetricSpace(std::move(labels), rho, rho, false);
}

UltrametricProfile UltrametricProfile::baire(double base, std::size_t L) {
  return geometric(base, base, L);
}

UltrametricProfile UltrametricProfile::geometric(double f_base, double g_base,
                                                 std::size_t L) {
  if (f_base <= 1.0 || g_base <= 1.0) {
    throw std::domain_error("geometric profile: bases must exceed 1");
  }
  UltrametricProfile p;
  for (std::size_t k = 1; k <= L; ++k) {
    p.f.push_back(std::pow(f_base, -static_cast<double>(k)));
    p.g.push_back(std::pow(g_base, -static_cast<double>(k)));
  }
  return p;
}

FiniteBimetricSpace fg_ultrametric_cube(const UltrametricProfile& profile) {
  const std::size_t L = profile.depth();
  if (L < 1 || L > 12) throw std::domain_error("fg_ultrametric_cube: L must be 1..12");
  if (profile.g.size() != L) throw std::domain_error("fg_ultrametric_cube: f,g length mismatch");
  for (std::size_t k = 0; k < L; ++k) {
    if (profile.f[k] <= 0 || profile.g[k] <= 0) {
      throw std::domain_error("fg_ultrametric_cube: level values must be positive");
    }
    if (k > 0 && (profile.f[k] >= profile.f[k - 1] || profile.g[k] >= profile.g[k - 1])) {
      throw std::domain_error("fg_ultrametric_cube: level values must strictly decrease");
    }
  }
  const std::size_t n = std::size_t{1} << L;
  std::vector<std::string> labels(n);
  for (std::size_t x = 0; x < n; ++x) {
    std::string s(L, '0');
    for (std::size_t b = 0; b < L; ++b) {
      // Coordinate 1 is the most significant bit of the label.
      if (x & (std::size_t{1} << (L - 1 - b))) s[b] = '1';
    }
    labels[x] = s;
  }
  std::vector<double> rho1(n * n, 0.0), rho2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t diff = i ^ j;
      // First differing coordinate (1-based from the most significant bit).
      std::size_t k = L - 1 - static_cast<std::size_t>(63 - __builtin_clzll(diff));
      rho1[i * n + j] = rho1[j * n + i] = profile.f[k];
      rho2[i * n + j] = rho2[j * n + i] = profile.g[k];
    }
  }
  return FiniteBimetricSpace(std::move(labels), std::move(rho1), std::move(rho2), true);
}

ClosedForms theorem64_closed_forms(const UltrametricProfile& profile, double alpha) {
  if (alpha <= 0) throw std::domain_error("alpha must be positive");
  const std::size_t L = profile.depth();
  ClosedForms out;

  double inf_val = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= L; ++k) {
    const double v = static_cast<double>(k) + (alpha / kLn2) * profile.f[k - 1];
    if (v < inf_val) {
      inf_val = v;
      out.entropic_argmin = k;
    }
  }
  const double floored = std::floor(inf_val);
  out.entropic_k0 = static_cast<std::size_t>(floored);
  if (out.entropic_k0 >= 1 && out.entropic_k0 <= L) {
    out.entropic = profile.g[out.entropic_k0 - 1];
  }

  double sup_val = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= L; ++k) {
    const double v = profile.g[k - 1] * std::exp(-alpha * profile.f[k - 1]);
    if (v > sup_val) {
      sup_val = v;
      out.diametric_argmax = k;
    }
  }
  out.diametric = sup_val;

  out.truncation_safe = out.entropic_argmin < L && out.diametric_argmax < L &&
                        out.entropic_k0 <= L && out.entropic.has_value();
  return out;
}

namespace {

void enumerate_compositions(std::int64_t remaining, std::size_t cell,
                            std::vector<std::int64_t>& current,
                            std::vector<std::vector<std::int64_t>>& out,
                            std::size_t cap) {
  if (cell + 1 == current.size()) {
    current[cell] = remaining;
    out.push_back(current);
    if (out.size() > cap) throw std::domain_error("lattice_measure_space: point cap exceeded");
    return;
  }
  for (std::int64_t v = 0; v <= remaining; ++v) {
    current[cell] = v;
    enumerate_compositions(remaining - v, cell + 1, current, out, cap);
  }
}

}  // namespace

std::vector<LatticeMeasure> lattice_measure_list(int d, int n, int denom,
                                                 std::size_t max_points) {
  if (d < 1 || n < 1 || denom < 1) throw std::domain_error("lattice_measure_list: bad shape");
  std::size_t cells = 1;
  for (int t = 0; t < d; ++t) cells *= static_cast<std::size_t>(n);
  std::vector<std::vector<std::int64_t>> combos;
  std::vector<std::int64_t> current(cells, 0);
  enumerate_compositions(denom, 0, current, combos, max_points);
  std::vector<LatticeMeasure> out;
  out.reserve(combos.size());
  for (auto& c : combos) out.push_back(make_lattice_measure(d, n, denom, std::move(c)));
  return out;
}

FiniteBimetricSpace lattice_measure_space(int d, int n, int denom,
                                          std::size_t max_points) {
  const std::vector<LatticeMeasure> measures = lattice_measure_list(d, n, denom, max_points);
  const std::size_t m = measures.size();
  std::vector<std::string> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::ostringstream os;
    for (std::size_t c = 0; c < measures[i].nums.size(); ++c) {
      if (c) os << ",";
      os << measures[i].nums[c];
    }
    os << "/" << denom;
    labels[i] = os.str();
  }
  std::vector<double> rho(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double dij = w1_distance(measures[i], measures[j]).value();
      rho[i * m + j] = dij;
      rho[j * m + i] = dij;
    }
  }
  return FiniteBimetricSpace(std::move(labels), rho, rho, false);
}

nlohmann::json CoverStructure::to_json() const {
  nlohmann::json j;
  j["gamma"] = gamma;
  j["d"] = d;
  j["n"] = n;
  j["cells"] = cells();
  j["salesman_path"] = salesman_path;
  j["path_length"] = path_length;
  j["lambda_count"] = lambda_count_str;
  return j;
}

CoverStructure wasserstein_cover(int d, double gamma) {
  if (d < 1 || d > 2) throw std::domain_error("wasserstein_cover: d must be 1 or 2");
  if (gamma <= 0.0 || gamma >= 1.0) {
    throw std::domain_error("wasserstein_cover: gamma must be in (0,1)");
  }
  CoverStructure cover;
  cover.gamma = gamma;
  cover.d = d;
  cover.n = static_cast<int>(std::ceil(2.0 / gamma));
  const std::size_t n = static_cast<std::size_t>(cover.n);
  std::size_t cells = 1;
  for (int t = 0; t < d; ++t) cells *= n;
  if (cells > 4096) throw std::domain_error("wasserstein_cover: grid too large");

  // Boustrophedon over the grid, dimension-major: consecutive cells differ
  // by one grid step, so each move costs 1/n in the l-infinity metric.
  cover.salesman_path.reserve(cells);
  if (d == 1) {
    for (std::size_t i = 0; i < cells; ++i) cover.salesman_path.push_back(i);
  } else {
    for (std::size_t row = 0; row < n; ++row) {
      if (row % 2 == 0) {
        for (std::size_t col = 0; col < n; ++col) cover.salesman_path.push_back(row * n + col);
      } else {
        for (std::size_t col = n; col-- > 0;) cover.salesman_path.push_back(row * n + col);
      }
    }
  }
  // Total length (all steps are 1/n).
  cover.path_length =
      static_cast<double>(cells - 1) / static_cast<double>(cover.n);

  cover.lambda_count_str = binomial_string(2 * cells - 1, cells - 1);
  if (cover.lambda_count_str.size() <= 19) {
    try {
      cover.lambda_count = std::stoull(cover.lambda_count_str);
    } catch (const std::out_of_range&) {
      cover.lambda_count.reset();
    }
  }
  return cover;
}

LatticeMeasure round_to_cover(const LatticeMeasure& nu, const CoverStructure& cover) {
  if (nu.d != cover.d || nu.n != cover.n) {
    throw std::domain_error("round_to_cover: measure does not live on the cover grid");
  }
  const std::int64_t cells = static_cast<std::int64_t>(cover.cells());
  if (nu.den > std::numeric_limits<std::int64_t>::max() / cells) {
    throw std::domain_error("round_to_cover: denominator too large");
  }
  // Work in units of 1/(den*|S|): weight (m + w)/|S| has m = v / den and
  // fractional carry v % den, which moves intact to the next path cell.
  std::vector<std::int64_t> out(nu.nums.size(), 0);
  std::int64_t carry = 0;
  for (std::size_t k = 0; k < cover.salesman_path.size(); ++k) {
    const std::size_t cell = cover.salesman_path[k];
    const std::int64_t v = nu.nums[cell] * cells + carry;
    if (k + 1 == cover.salesman_path.size()) {
      if (v % nu.den != 0) throw std::logic_error("round_to_cover: final carry not integral");
      out[cell] = v / nu.den;
    } else {
      out[cell] = v / nu.den;
      carry = v % nu.den;
    }
  }
  return make_lattice_measure(nu.d, nu.n, cells, std::move(out));
}

FiniteBimetricSpace lipschitz_net_space(int grid_n, double value_step,
                                        std::size_t max_points) {
  if (grid_n < 1) throw std::domain_error("lipschitz_net_space: grid_n must be >= 1");
  if (value_step <= 0) throw std::domain_error("lipschitz_net_space: value_step must be positive");
  // Step budget in value units: |f(t+1)-f(t)| <= 1/grid_n.
  const int K = static_cast<int>(
      std::floor(1.0 / (static_cast<double>(grid_n) * value_step) + 1e-9));
  std::vector<std::vector<int>> funcs;
  std::vector<int> current(static_cast<std::size_t>(grid_n) + 1, 0);
  const auto recurse = [&](auto&& self, std::size_t i) -> void {
    if (i == current.size()) {
      funcs.push_back(current);
      if (funcs.size() > max_points) {
        throw std::domain_error("lipschitz_net_space: point cap exceeded");
      }
      return;
    }
    for (int step = -K; step <= K; ++step) {
      current[i] = current[i - 1] + step;
      self(self, i + 1);
    }
  };
  recurse(recurse, 1);

  const std::size_t m = funcs.size();
  std::vector<std::string> labels(m);
  std::vector<double> rho(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    std::ostringstream os;
    for (std::size_t t = 0; t < funcs[i].size(); ++t) {
      if (t) os << ",";
      os << funcs[i][t];
    }
    labels[i] = os.str();
    for (std::size_t j = i + 1; j < m; ++j) {
      int diff = 0;
      for (std::size_t t = 0; t < funcs[i].size(); ++t) {
        diff = std::max(diff, std::abs(funcs[i][t] - funcs[j][t]));
      }
      const double dij = static_cast<double>(diff) * value_step;
      rho[i * m + j] = dij;
      rho[j * m + i] = dij;
    }
  }
  return FiniteBimetricSpace(std::move(labels), rho, rho, false);
}

FiniteBimetricSpace random_closure_space(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("random_closure_space: n must be >= 1");
  CounterRng rng(seed);
  std::vector<double> rho(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = rng.next_uniform(0.5, 1.5);
      rho[i * n + j] = w;
      rho[j * n + i] = w;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = rho[i * n + k];
      for (std::size_t j = 0; j < n; ++j) {
        rho[i * n + j] = std::min(rho[i * n + j], dik + rho[k * n + j]);
      }
    }
  }
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return FiniteBimetricSpace(std::move(labels), rho, rho, false);
}

}  // namespace mplab
