#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hgroup.hpp"
#include "parallel.hpp"

namespace hlab {

inline const std::string infinity_label = "inf";

/// Symmetric matrix with zero diagonal over labeled points, not necessarily satisfying the
/// triangle inequality. `infinity_index`, when set, is the row standing for the point at infinity.
struct QuasiMetric {
  std::vector<std::string> labels;
  Eigen::MatrixXd dist;
  std::optional<Eigen::Index> infinity_index;

  Eigen::Index size() const { return dist.rows(); }
};

inline constexpr double triangle_slack = 1e-9;

/// Largest violation d(i,k) - d(i,j) - d(j,k) over all triples, with the offending triple.
struct TriangleViolation {
  double excess = 0.0;
  Eigen::Index i = 0, j = 0, k = 0;
};

inline TriangleViolation worst_triangle_violation(const Eigen::MatrixXd& d) {
  TriangleViolation w;
  const Eigen::Index n = d.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dij = d(i, j);
      for (Eigen::Index k = 0; k < n; ++k) {
        const double e = d(i, k) - dij - d(j, k);
        if (e > w.excess) w = {e, i, j, k};
      }
    }
  return w;
}

/// Labeled finite metric space. Construction validates symmetry, zero diagonal, positivity
/// off the diagonal and the triangle inequality within `triangle_slack`.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::vector<std::string> labels, Eigen::MatrixXd dist, bool contains_infinity = false,
                    bool check_triangles = true)
      : labels_(std::move(labels)), dist_(std::move(dist)), contains_infinity_(contains_infinity) {
    const Eigen::Index n = dist_.rows();
    if (dist_.cols() != n) throw std::invalid_argument("distance matrix is not square");
    if (static_cast<Eigen::Index>(labels_.size()) != n)
      throw std::invalid_argument("label count " + std::to_string(labels_.size()) + " does not match matrix size " +
                                  std::to_string(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (dist_(i, i) != 0.0) throw std::invalid_argument("nonzero diagonal entry at " + labels_[i]);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = dist_(i, j);
        if (!std::isfinite(v) || v < 0.0)
          throw std::invalid_argument("entry (" + labels_[i] + ", " + labels_[j] + ") is negative or not finite");
        if (v != dist_(j, i))
          throw std::invalid_argument("asymmetric entries (" + labels_[i] + ", " + labels_[j] + ")");
        if (i != j && v == 0.0)
          throw std::invalid_argument("distinct points " + labels_[i] + " and " + labels_[j] + " at distance 0");
      }
    }
    if (check_triangles) {
      const auto w = worst_triangle_violation(dist_);
      if (w.excess > triangle_slack * std::max(1.0, dist_(w.i, w.k)))
        throw std::invalid_argument("triangle inequality fails for (" + labels_[w.i] + ", " + labels_[w.j] + ", " +
                                    labels_[w.k] + ") by " + format_double(w.excess));
    }
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& dist() const { return dist_; }
  bool contains_infinity() const { return contains_infinity_; }
  Eigen::Index size() const { return dist_.rows(); }

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd dist_;
  bool contains_infinity_;
};

struct BasedSpace {
  const FiniteMetricSpace& space;
  Eigen::Index base_index;

  BasedSpace(const FiniteMetricSpace& s, Eigen::Index base) : space(s), base_index(base) {
    if (base < 0 || base >= s.size())
      throw std::out_of_range("base index " + std::to_string(base) + " outside 0.." + std::to_string(s.size() - 1));
  }
};

/// Gauge-distance matrix of group points labeled by their index.
inline FiniteMetricSpace from_group_sample(const Group& g, const std::vector<GroupPoint>& pts) {
  if (pts.size() < 2) throw std::invalid_argument("from_group_sample needs at least 2 points");
  Eigen::MatrixXd d = g.distance_matrix(pts);
  std::string dupes;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = i + 1; j < d.rows(); ++j)
      if (d(i, j) == 0.0) dupes += (dupes.empty() ? "" : ", ") + std::to_string(i) + "=" + std::to_string(j);
  if (!dupes.empty()) throw std::invalid_argument("duplicate points in sample: " + dupes);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < pts.size(); ++i) labels.push_back(std::to_string(i));
  // rounding can break the triangle inequality by an ulp; validation allows triangle_slack
  return FiniteMetricSpace(std::move(labels), std::move(d));
}

/// t_p(x, y) = d(x, y) / (d(x, p) d(y, p)) on X \ {p}, t_p(x, inf) = 1 / d(x, p). The point at
/// infinity is the last row.
inline QuasiMetric inversion_quasimetric(const BasedSpace& b) {
  const auto& d = b.space.dist();
  const Eigen::Index n = d.rows(), p = b.base_index;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == p) continue;
    if (!(d(i, p) > 0.0))
      throw std::domain_error("point " + b.space.labels()[i] + " is at distance 0 from the base point");
    keep.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  QuasiMetric q;
  q.dist = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (Eigen::Index a = 0; a < m; ++a) {
    q.labels.push_back(b.space.labels()[keep[a]]);
    const double da = d(keep[a], p);
    for (Eigen::Index c = a + 1; c < m; ++c) {
      const double v = d(keep[a], keep[c]) / (da * d(keep[c], p));
      q.dist(a, c) = v;
      q.dist(c, a) = v;
    }
    q.dist(a, m) = q.dist(m, a) = 1.0 / da;
  }
  q.labels.push_back(infinity_label);
  q.infinity_index = m;
  return q;
}

/// s_p(x, y) = d(x, y) / ((1 + d(x, p)) (1 + d(y, p))) on X, s_p(x, inf) = 1 / (1 + d(x, p)).
inline QuasiMetric sphericalization_quasimetric(const BasedSpace& b) {
  const auto& d = b.space.dist();
  const Eigen::Index n = d.rows(), p = b.base_index;
  QuasiMetric q;
  q.dist = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Eigen::Index a = 0; a < n; ++a) {
    q.labels.push_back(b.space.labels()[a]);
    const double da = 1.0 + d(a, p);
    for (Eigen::Index c = a + 1; c < n; ++c) {
      const double v = d(a, c) / (da * (1.0 + d(c, p)));
      q.dist(a, c) = v;
      q.dist(c, a) = v;
    }
    q.dist(a, n) = q.dist(n, a) = 1.0 / da;
  }
  q.labels.push_back(infinity_label);
  q.infinity_index = n;
  return q;
}

inline constexpr Eigen::Index default_max_chain_points = 2000;

/// Shortest-path closure of the edge weights q: the largest metric below q on the finite set.
/// Floyd-Warshall with each k-phase split over row blocks; row k and column k are fixed during
/// phase k, so the result is independent of the thread count.
inline QuasiMetric chain_metric(const QuasiMetric& q, Eigen::Index max_points = default_max_chain_points) {
  const Eigen::Index n = q.size();
  if (q.dist.cols() != n) throw std::invalid_argument("chain_metric: matrix is not square");
  if (n > max_points)
    throw std::invalid_argument("chain_metric: " + std::to_string(n) + " points exceeds the cap of " +
                                std::to_string(max_points));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (q.dist(i, i) != 0.0) throw std::invalid_argument("chain_metric: nonzero diagonal at row " + std::to_string(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (q.dist(i, j) != q.dist(j, i))
        throw std::invalid_argument("chain_metric: asymmetric input at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      if (!(q.dist(i, j) >= 0.0))
        throw std::invalid_argument("chain_metric: negative entry at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
    }
  }
  QuasiMetric out = q;
  // column-major: d(i, j) for fixed j is contiguous, so iterate i innermost
  Eigen::MatrixXd& d = out.dist;
  for (Eigen::Index k = 0; k < n; ++k) {
    for_each_chunk(static_cast<std::size_t>(n), 64, [&](std::size_t, std::size_t b, std::size_t e) {
      for (auto j = static_cast<Eigen::Index>(b); j < static_cast<Eigen::Index>(e); ++j) {
        const double dkj = d(k, j);
        double* col = &d(0, j);
        const double* colk = &d(0, k);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double via = colk[i] + dkj;
          if (via < col[i]) col[i] = via;
        }
      }
    });
  }
  return out;
}

/// Worst violation of (1/4) q <= c <= q, relative to q, over off-diagonal entries.
struct SandwichReport {
  double lower_excess = 0.0;  // max (q/4 - c) / q
  double upper_excess = 0.0;  // max (c - q) / q
  bool holds = true;
};

inline SandwichReport check_sandwich(const QuasiMetric& q, const QuasiMetric& c, double rel_slack = 1e-12) {
  SandwichReport r;
  const Eigen::Index n = q.size();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j || q.dist(i, j) == 0.0) continue;
      const double qq = q.dist(i, j), cc = c.dist(i, j);
      r.lower_excess = std::max(r.lower_excess, (0.25 * qq - cc) / qq);
      r.upper_excess = std::max(r.upper_excess, (cc - qq) / qq);
    }
  r.holds = r.lower_excess <= rel_slack && r.upper_excess <= rel_slack;
  return r;
}

// ---------------------------------------------------------------------------
// Distance-matrix files. CSV: first row labels, then the rows of the matrix.
// JSON: {"labels": [...], "dist": [[...], ...]}.

inline void write_matrix_csv(std::ostream& os, const std::vector<std::string>& labels, const Eigen::MatrixXd& d) {
  for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? "," : "") << labels[i];
  os << '\n';
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) os << (j ? "," : "") << format_double(d(i, j));
    os << '\n';
  }
}

inline nlohmann::json matrix_to_json(const std::vector<std::string>& labels, const Eigen::MatrixXd& d) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < d.cols(); ++j) row.push_back(d(i, j));
    rows.push_back(std::move(row));
  }
  return {{"labels", labels}, {"dist", rows}};
}

inline FiniteMetricSpace read_matrix_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("distance CSV: missing label row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto labels = split_csv_line(line);
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd d(n, n);
  Eigen::Index row = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= n) throw std::invalid_argument("distance CSV: more than " + std::to_string(n) + " matrix rows");
    const auto cells = split_csv_line(line);
    if (static_cast<Eigen::Index>(cells.size()) != n)
      throw std::invalid_argument("distance CSV: row " + labels[row] + " has " + std::to_string(cells.size()) +
                                  " entries, expected " + std::to_string(n));
    for (Eigen::Index j = 0; j < n; ++j)
      d(row, j) = parse_double(cells[j], "distance CSV: entry (" + labels[row] + ", " + labels[j] + ")");
    ++row;
  }
  if (row != n)
    throw std::invalid_argument("distance CSV: " + std::to_string(row) + " matrix rows, expected " + std::to_string(n));
  return FiniteMetricSpace(std::move(labels), std::move(d));
}

inline FiniteMetricSpace matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("labels") || !j.contains("dist"))
    throw std::invalid_argument("distance JSON: expected an object with 'labels' and 'dist'");
  const auto& jl = j.at("labels");
  const auto& jd = j.at("dist");
  if (!jl.is_array()) throw std::invalid_argument("distance JSON: 'labels' must be an array");
  if (!jd.is_array()) throw std::invalid_argument("distance JSON: 'dist' must be an array");
  std::vector<std::string> labels;
  for (const auto& l : jl) {
    if (!l.is_string()) throw std::invalid_argument("distance JSON: labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (static_cast<Eigen::Index>(jd.size()) != n)
    throw std::invalid_argument("distance JSON: 'dist' has " + std::to_string(jd.size()) + " rows, expected " +
                                std::to_string(n));
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = jd[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw std::invalid_argument("distance JSON: row " + labels[i] + " must have " + std::to_string(n) + " entries");
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!row[c].is_number())
        throw std::invalid_argument("distance JSON: entry (" + labels[i] + ", " + labels[c] + ") is not a number");
      d(i, c) = row[c].get<double>();
    }
  }
  return FiniteMetricSpace(std::move(labels), std::move(d));
}

/// Reads CSV or JSON by file extension.
inline FiniteMetricSpace load_metric(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open distance file '" + path + "'");
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("distance JSON '" + path + "': " + e.what());
    }
    return matrix_from_json(j);
  }
  return read_matrix_csv(in);
}

}  // namespace hlab
