#include "mplab/space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mplab {

namespace {

void check_structure(std::size_t n, const std::vector<double>& m, const char* name) {
  if (m.size() != n * n) {
    std::ostringstream os;
    os << name << " has " << m.size() << " entries, expected " << n * n;
    throw std::invalid_argument(os.str());
  }
  for (double v : m) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " has a non-finite entry");
    if (v < 0.0) throw std::invalid_argument(std::string(name) + " has a negative entry");
  }
}

}  // namespace

std::string MetricViolation::describe() const {
  std::ostringstream os;
  os << "rho" << metric_index << " " << axiom << " at (" << i << "," << j;
  if (axiom == "triangle" || axiom == "ultrametric") os << "," << k;
  os << "): " << lhs << " vs " << rhs;
  return os.str();
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : violations) {
    arr.push_back({{"axiom", v.axiom},
                   {"metric", v.metric_index},
                   {"i", v.i},
                   {"j", v.j},
                   {"k", v.k},
                   {"lhs", v.lhs},
                   {"rhs", v.rhs}});
  }
  return {{"ok", ok()}, {"violations", arr}};
}

FiniteBimetricSpace::FiniteBimetricSpace(std::vector<std::string> labels,
                                         std::vector<double> rho1_row_major,
                                         std::vector<double> rho2_row_major,
                                         bool ultrametric2_claimed)
    : n_(labels.size()),
      labels_(std::move(labels)),
      rho1_(std::move(rho1_row_major)),
      rho2_(std::move(rho2_row_major)),
      ultrametric2_claimed_(ultrametric2_claimed) {
  if (n_ == 0) throw std::invalid_argument("space must have at least one point");
  check_structure(n_, rho1_, "rho1");
  check_structure(n_, rho2_, "rho2");
  single_metric_ = (rho1_ == rho2_);
}

const std::vector<double>& FiniteBimetricSpace::matrix(int metric_index) const {
  if (metric_index == 1) return rho1_;
  if (metric_index == 2) return rho2_;
  throw std::invalid_argument("metric_index must be 1 or 2");
}

ValidationReport FiniteBimetricSpace::validate() const {
  ValidationReport report;
  for (int m = 1; m <= 2; ++m) {
    const std::vector<double>& d = matrix(m);
    for (PointId i = 0; i < n_; ++i) {
      if (d[i * n_ + i] != 0.0) {
        report.violations.push_back({"diagonal", m, i, i, 0, d[i * n_ + i], 0.0});
      }
      for (PointId j = i + 1; j < n_; ++j) {
        if (d[i * n_ + j] == 0.0) {
          report.violations.push_back({"positivity", m, i, j, 0, 0.0, 0.0});
        }
        if (d[i * n_ + j] != d[j * n_ + i]) {
          report.violations.push_back(
              {"symmetry", m, i, j, 0, d[i * n_ + j], d[j * n_ + i]});
        }
      }
    }
    for (PointId i = 0; i < n_; ++i) {
      const double* di = d.data() + i * n_;
      for (PointId k = i + 1; k < n_; ++k) {
        const double dik = di[k];
        for (PointId j = 0; j < n_; ++j) {
          // One orientation suffices once (i,k) runs over unordered pairs.
          if (dik > di[j] + d[j * n_ + k]) {
            report.violations.push_back(
                {"triangle", m, i, j, k, dik, di[j] + d[j * n_ + k]});
          }
        }
      }
    }
  }
  if (ultrametric2_claimed_) {
    const std::vector<double>& d = rho2_;
    for (PointId i = 0; i < n_; ++i) {
      for (PointId k = i + 1; k < n_; ++k) {
        const double dik = d[i * n_ + k];
        for (PointId j = 0; j < n_; ++j) {
          const double m2 = std::max(d[i * n_ + j], d[j * n_ + k]);
          if (dik > m2) {
            report.violations.push_back({"ultrametric", 2, i, j, k, dik, m2});
          }
        }
      }
    }
  }
  return report;
}

FiniteBimetricSpace FiniteBimetricSpace::from_json(const nlohmann::json& j) {
  std::vector<double> rho1;
  const auto read_matrix = [](const nlohmann::json& rows) {
    std::vector<double> flat;
    for (const auto& row : rows) {
      for (const auto& v : row) flat.push_back(v.get<double>());
    }
    return flat;
  };
  if (!j.contains("rho1")) throw std::invalid_argument("space json: missing rho1");
  rho1 = read_matrix(j.at("rho1"));
  std::vector<double> rho2 = j.contains("rho2") ? read_matrix(j.at("rho2")) : rho1;

  std::vector<std::string> labels;
  if (j.contains("labels")) {
    for (const auto& l : j.at("labels")) labels.push_back(l.get<std::string>());
  } else {
    const std::size_t rows = j.at("rho1").size();
    for (std::size_t i = 0; i < rows; ++i) labels.push_back(std::to_string(i));
  }
  const bool ultra = j.value("ultrametric2", false);
  const std::size_t n = labels.size();
  if (rho1.size() != n * n || rho2.size() != n * n) {
    throw std::invalid_argument("space json: matrix size does not match label count");
  }
  return FiniteBimetricSpace(std::move(labels), std::move(rho1), std::move(rho2), ultra);
}

nlohmann::json FiniteBimetricSpace::to_json() const {
  const auto matrix_json = [&](const std::vector<double>& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (PointId i = 0; i < n_; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (PointId j = 0; j < n_; ++j) row.push_back(m[i * n_ + j]);
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::json j;
  j["labels"] = labels_;
  j["rho1"] = matrix_json(rho1_);
  if (!single_metric_) j["rho2"] = matrix_json(rho2_);
  j["ultrametric2"] = ultrametric2_claimed_;
  return j;
}

std::vector<PointId> ball(const FiniteBimetricSpace& space, int metric_index,
                          PointId center, double r) {
  if (center >= space.size()) throw std::domain_error("ball: center out of range");
  if (r < 0.0) throw std::domain_error("ball: radius must be nonnegative");
  const double* row = space.row(metric_index, center);
  std::vector<PointId> out;
  for (PointId y = 0; y < space.size(); ++y) {
    if (row[y] <= r) out.push_back(y);
  }
  return out;
}

double diameter(const FiniteBimetricSpace& space, int metric_index,
                const std::vector<PointId>& subset) {
  if (subset.empty()) throw std::domain_error("diameter: empty subset");
  double best = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    const double* row = space.row(metric_index, subset[a]);
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      best = std::max(best, row[subset[b]]);
    }
  }
  return best;
}

DistanceSpectrum distance_spectrum(const FiniteBimetricSpace& space,
                                   int metric_index, double rel_tol) {
  std::vector<double> vals;
  const std::size_t n = space.size();
  for (PointId i = 0; i < n; ++i) {
    const double* row = space.row(metric_index, i);
    for (PointId j = i + 1; j < n; ++j) {
      if (row[j] > 0.0) vals.push_back(row[j]);
    }
  }
  std::sort(vals.begin(), vals.end());
  DistanceSpectrum spec;
  for (double v : vals) {
    if (spec.values.empty() || v - spec.values.back() > rel_tol * v) {
      spec.values.push_back(v);
    }
  }
  return spec;
}

bool is_ultrametric(const FiniteBimetricSpace& space, int metric_index) {
  const std::size_t n = space.size();
  for (PointId i = 0; i < n; ++i) {
    const double* di = space.row(metric_index, i);
    for (PointId k = i + 1; k < n; ++k) {
      for (PointId j = 0; j < n; ++j) {
        if (di[k] > std::max(di[j], space.dist(metric_index, j, k))) return false;
      }
    }
  }
  return true;
}

}  // namespace mplab
