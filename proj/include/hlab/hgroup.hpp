#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hlie.hpp"
#include "parallel.hpp"

namespace hlab {

/// Group element in exponential coordinates (v, z).
struct GroupPoint {
  Eigen::VectorXd v;
  Eigen::VectorXd z;

  friend bool operator==(const GroupPoint& a, const GroupPoint& b) {
    return a.v.size() == b.v.size() && a.z.size() == b.z.size() && a.v == b.v && a.z == b.z;
  }
};

/// A point of G or the point at infinity.
class ExtendedPoint {
 public:
  ExtendedPoint() = default;  // infinity
  ExtendedPoint(GroupPoint p) : point_(std::move(p)) {}

  static ExtendedPoint infinity() { return {}; }

  bool is_infinite() const { return !point_.has_value(); }
  const GroupPoint& finite() const {
    if (!point_) throw std::domain_error("expected a finite point, got infinity");
    return *point_;
  }

  friend bool operator==(const ExtendedPoint& a, const ExtendedPoint& b) {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
    return *a.point_ == *b.point_;
  }

 private:
  std::optional<GroupPoint> point_;
};

/// The simply connected step-two group with Lie algebra `alg`, group law
/// (v, z)(v', z') = (v + v', z + z' + [v, v']/2) and the Koranyi gauge
/// ||(v, z)|| = (|v|^4/16 + |z|^2)^{1/4}.
class Group {
 public:
  explicit Group(HTypeAlgebra alg) : alg_(std::make_shared<const HTypeAlgebra>(std::move(alg))) {}

  const HTypeAlgebra& algebra() const { return *alg_; }
  int dim_v() const { return alg_->dim_v(); }
  int dim_z() const { return alg_->dim_z(); }

  /// Homogeneous dimension dim_v + 2 dim_z.
  int homogeneous_dimension() const { return dim_v() + 2 * dim_z(); }

  GroupPoint identity() const { return {Eigen::VectorXd::Zero(dim_v()), Eigen::VectorXd::Zero(dim_z())}; }

  GroupPoint point(Eigen::VectorXd v, Eigen::VectorXd z) const {
    GroupPoint p{std::move(v), std::move(z)};
    require(p);
    if (!p.v.allFinite() || !p.z.allFinite()) throw std::domain_error("group point has non-finite coordinates");
    return p;
  }

  void require(const GroupPoint& p) const {
    if (p.v.size() != dim_v() || p.z.size() != dim_z())
      throw std::domain_error("point of dimensions (" + std::to_string(p.v.size()) + ", " +
                              std::to_string(p.z.size()) + ") does not belong to group '" + alg_->label() + "' (" +
                              std::to_string(dim_v()) + ", " + std::to_string(dim_z()) + ")");
  }

  GroupPoint mul(const GroupPoint& p, const GroupPoint& q) const {
    require(p);
    require(q);
    return {p.v + q.v, p.z + q.z + 0.5 * alg_->bracket(p.v, q.v)};
  }

  GroupPoint inverse(const GroupPoint& p) const {
    require(p);
    return {-p.v, -p.z};
  }

  GroupPoint dilate(double t, const GroupPoint& p) const {
    if (!(t > 0.0)) throw std::domain_error("dilation factor must be positive, got " + std::to_string(t));
    require(p);
    return {t * p.v, (t * t) * p.z};
  }

  double gauge(const GroupPoint& p) const {
    require(p);
    const double a = p.v.squaredNorm();
    return std::pow(a * a / 16.0 + p.z.squaredNorm(), 0.25);
  }

  /// ||q^{-1} p||.
  double gauge_dist(const GroupPoint& p, const GroupPoint& q) const { return gauge(mul(inverse(q), p)); }

  /// Pairwise gauge distances; rows are computed in parallel, each entry by the same
  /// sequential expression, so the result does not depend on the thread count.
  Eigen::MatrixXd distance_matrix(const std::vector<GroupPoint>& pts) const {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for_each_chunk(pts.size(), 16, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d(i, j) = gauge_dist(pts[i], pts[j]);
    });
    // mirror: gauge_dist(p, q) == gauge_dist(q, p) only up to rounding
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) d(j, i) = d(i, j);
    return d;
  }

  /// Left translation by g, x -> g x.
  auto left_translate(GroupPoint g) const {
    return [self = *this, g = std::move(g)](const GroupPoint& x) { return self.mul(g, x); };
  }

  /// Uniform (Haar) samples from the coordinate box |v_i| <= 2r, |z_k| <= r^2, which contains the
  /// gauge ball of radius r. Sequential single stream: draws v then z for every point.
  std::vector<GroupPoint> sample_points(std::size_t count, double radius, std::uint64_t seed) const {
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("sample radius must be positive");
    Rng rng(seed);
    std::uniform_real_distribution<double> uv(-2.0 * radius, 2.0 * radius);
    std::uniform_real_distribution<double> uz(-radius * radius, radius * radius);
    std::vector<GroupPoint> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
      GroupPoint p{Eigen::VectorXd(dim_v()), Eigen::VectorXd(dim_z())};
      for (int i = 0; i < dim_v(); ++i) p.v[i] = uv(rng);
      for (int k = 0; k < dim_z(); ++k) p.z[k] = uz(rng);
      out.push_back(std::move(p));
    }
    return out;
  }

  /// A random point at gauge exactly 1 (a dilated Gaussian point).
  GroupPoint random_unit_point(Rng& rng) const {
    for (;;) {
      GroupPoint p{gaussian_vector(rng, dim_v()), gaussian_vector(rng, dim_z())};
      const double g = gauge(p);
      if (g > 1e-12) return dilate(1.0 / g, p);
    }
  }

 private:
  std::shared_ptr<const HTypeAlgebra> alg_;
};

// ---------------------------------------------------------------------------
// Point-sample CSV: header v_1..v_{dim_v},z_1..z_{dim_z}; shortest round-trip decimals.

inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument(where + ": '" + std::string(s) + "' is not a number");
  if (!std::isfinite(v)) throw std::invalid_argument(where + ": value is not finite");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline void write_points_csv(std::ostream& os, const Group& g, const std::vector<GroupPoint>& pts) {
  std::string sep;
  for (int i = 0; i < g.dim_v(); ++i, sep = ",") os << sep << "v_" << i + 1;
  for (int k = 0; k < g.dim_z(); ++k, sep = ",") os << sep << "z_" << k + 1;
  os << '\n';
  for (const auto& p : pts) {
    g.require(p);
    sep.clear();
    for (int i = 0; i < g.dim_v(); ++i, sep = ",") os << sep << format_double(p.v[i]);
    for (int k = 0; k < g.dim_z(); ++k, sep = ",") os << sep << format_double(p.z[k]);
    os << '\n';
  }
}

inline std::vector<GroupPoint> read_points_csv(std::istream& is, const Group& g) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("point CSV: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  const auto width = static_cast<std::size_t>(g.dim_v() + g.dim_z());
  if (header.size() != width)
    throw std::invalid_argument("point CSV: header has " + std::to_string(header.size()) + " columns, expected " +
                                std::to_string(width));
  for (std::size_t c = 0; c < width; ++c) {
    const std::string expect = c < static_cast<std::size_t>(g.dim_v()) ? "v_" + std::to_string(c + 1)
                                                                       : "z_" + std::to_string(c - g.dim_v() + 1);
    if (header[c] != expect)
      throw std::invalid_argument("point CSV: header column " + std::to_string(c + 1) + " is '" + header[c] +
                                  "', expected '" + expect + "'");
  }
  std::vector<GroupPoint> pts;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != width)
      throw std::invalid_argument("point CSV: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                  " columns, expected " + std::to_string(width));
    GroupPoint p{Eigen::VectorXd(g.dim_v()), Eigen::VectorXd(g.dim_z())};
    for (std::size_t c = 0; c < width; ++c) {
      const double x = parse_double(cells[c], "point CSV: row " + std::to_string(row) + ", column " + header[c]);
      if (c < static_cast<std::size_t>(g.dim_v()))
        p.v[c] = x;
      else
        p.z[c - g.dim_v()] = x;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace hlab
