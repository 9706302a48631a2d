#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "algebra.hpp"
#include "parallel.hpp"

namespace hlab {

using HorizontalVector = Eigen::VectorXd;
using CenterVector = Eigen::VectorXd;

/// One nonzero structure constant B^k_{ij}, zero-based, with i < j.
struct StructureEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  double value = 0.0;
};

/// Step-two stratified Lie algebra v (+) z with orthonormal bases X_1..X_{dim_v}, Z_1..Z_{dim_z}
/// and brackets [X_i, X_j] = sum_k B^k_{ij} Z_k.
class HTypeAlgebra {
 public:
  HTypeAlgebra(std::string label, int dim_v, int dim_z, const std::vector<StructureEntry>& entries)
      : label_(std::move(label)), dim_v_(dim_v), dim_z_(dim_z) {
    if (dim_v <= 0) throw std::invalid_argument("dim_v must be positive, got " + std::to_string(dim_v));
    if (dim_z < 0) throw std::invalid_argument("dim_z must be nonnegative, got " + std::to_string(dim_z));
    structure_.assign(dim_z, Eigen::MatrixXd::Zero(dim_v, dim_v));
    for (const auto& e : entries) {
      if (e.i < 0 || e.i >= dim_v || e.j < 0 || e.j >= dim_v || e.k < 0 || e.k >= dim_z) {
        throw std::invalid_argument("structure entry (" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                                    "," + std::to_string(e.k + 1) + ") out of range");
      }
      if (e.i == e.j) {
        if (e.value != 0.0) throw std::invalid_argument("structure entry with i == j must vanish");
        continue;
      }
      if (!std::isfinite(e.value)) throw std::invalid_argument("structure entry value is not finite");
      structure_[e.k](e.i, e.j) = e.value;
      structure_[e.k](e.j, e.i) = -e.value;
    }
    for (int k = 0; k < dim_z_; ++k)
      for (int i = 0; i < dim_v_; ++i)
        for (int j = i + 1; j < dim_v_; ++j)
          if (structure_[k](i, j) != 0.0) sparse_.push_back({i, j, k, structure_[k](i, j)});
  }

  const std::string& label() const { return label_; }
  int dim_v() const { return dim_v_; }
  int dim_z() const { return dim_z_; }

  /// Antisymmetric matrix (B^k_{ij})_{ij}.
  const Eigen::MatrixXd& structure(int k) const { return structure_[k]; }

  /// Nonzero entries with i < j, zero-based.
  const std::vector<StructureEntry>& entries() const { return sparse_; }

  /// Summed over i < j as B^k_{ij} (x_i y_j - x_j y_i), so [x, x] is exactly zero in floating point.
  CenterVector bracket(const HorizontalVector& x, const HorizontalVector& y) const {
    require_v(x);
    require_v(y);
    CenterVector out = CenterVector::Zero(dim_z_);
    for (const auto& e : sparse_) out[e.k] += e.value * (x[e.i] * y[e.j] - x[e.j] * y[e.i]);
    return out;
  }

  /// J_Z defined by <J_Z X, Y> = <Z, [X, Y]>, i.e. (J_Z)_{ji} = sum_k Z_k B^k_{ij}.
  Eigen::MatrixXd j_map(const CenterVector& z) const {
    require_z(z);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim_v_, dim_v_);
    for (int k = 0; k < dim_z_; ++k)
      if (z[k] != 0.0) j.noalias() += z[k] * structure_[k].transpose();
    return j;
  }

  /// 64-bit FNV-1a hash of the dimensions and structure constants.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* p, std::size_t n) {
      const auto* b = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ULL;
      }
    };
    feed(&dim_v_, sizeof dim_v_);
    feed(&dim_z_, sizeof dim_z_);
    for (const auto& m : structure_) feed(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    return h;
  }

  void require_v(const HorizontalVector& x) const {
    if (x.size() != dim_v_)
      throw std::domain_error("horizontal vector has length " + std::to_string(x.size()) + ", algebra '" + label_ +
                              "' has dim_v = " + std::to_string(dim_v_));
  }
  void require_z(const CenterVector& z) const {
    if (z.size() != dim_z_)
      throw std::domain_error("center vector has length " + std::to_string(z.size()) + ", algebra '" + label_ +
                              "' has dim_z = " + std::to_string(dim_z_));
  }

 private:
  std::string label_;
  int dim_v_;
  int dim_z_;
  std::vector<Eigen::MatrixXd> structure_;
  std::vector<StructureEntry> sparse_;
};

// ---------------------------------------------------------------------------
// Builders

/// Heisenberg algebra over K with v = K^n (block i holds the coordinates of the i-th copy of K)
/// and z = Im(K), using the bracket tables
///   C: [X_i,Y_i] = Z
///   H: [X_i,Y_i] = Z_1 = [V_i,W_i], [X_i,V_i] = Z_2 = [W_i,Y_i], [X_i,W_i] = Z_3 = [Y_i,V_i]
///   O: [X_0,X_k] = Z_k, [X_i,X_j] = eps_{ijk} Z_k.
inline HTypeAlgebra make_heisenberg(AlgebraKind kind, int n) {
  if (n < 1) throw std::domain_error("Heisenberg algebra needs n >= 1, got " + std::to_string(n));
  if (kind == AlgebraKind::Octonion && n != 1)
    throw std::domain_error("the octonionic Heisenberg algebra exists only for n = 1");
  const int d = static_cast<int>(dim(kind));
  std::vector<StructureEntry> entries;
  auto add = [&entries](int i, int j, int k) {
    if (i < j)
      entries.push_back({i, j, k, 1.0});
    else
      entries.push_back({j, i, k, -1.0});
  };
  for (int b = 0; b < n; ++b) {
    const int o = b * d;
    switch (kind) {
      case AlgebraKind::Real: break;
      case AlgebraKind::Complex: add(o, o + 1, 0); break;
      case AlgebraKind::Quaternion: {
        const int X = o, Y = o + 1, V = o + 2, W = o + 3;
        add(X, Y, 0);
        add(V, W, 0);
        add(X, V, 1);
        add(W, Y, 1);
        add(X, W, 2);
        add(Y, V, 2);
        break;
      }
      case AlgebraKind::Octonion:
        for (int k = 1; k <= 7; ++k) add(0, k, k - 1);
        for (int i = 1; i <= 7; ++i)
          for (int j = i + 1; j <= 7; ++j)
            for (int k = 1; k <= 7; ++k)
              if (int e = epsilon(i, j, k); e != 0) entries.push_back({i, j, k - 1, static_cast<double>(e)});
        break;
    }
  }
  std::string label = "H_" + std::string(to_string(kind));
  if (kind != AlgebraKind::Octonion) label += ":" + std::to_string(n);
  return HTypeAlgebra(label, n * d, static_cast<int>(imag_dim(kind)), entries);
}

/// H_H(1) with its center cut down to span{Z_1, Z_2}: Heisenberg type, fails the J^2-condition.
inline HTypeAlgebra make_truncated_quaternionic() {
  const auto full = make_heisenberg(AlgebraKind::Quaternion, 1);
  std::vector<StructureEntry> entries;
  for (const auto& e : full.entries())
    if (e.k < 2) entries.push_back(e);
  return HTypeAlgebra("truncated_HH", 4, 2, entries);
}

/// R^2 x H_C(1): dim_v = 4, dim_z = 1, only [X_1, X_2] = Z. Not of Heisenberg type.
inline HTypeAlgebra make_degenerate_sum() {
  return HTypeAlgebra("degenerate_sum", 4, 1, {{0, 1, 0, 1.0}});
}

// ---------------------------------------------------------------------------
// Checkers

struct HTypeReport {
  bool is_h_type = false;
  double max_residual = 0.0;     // max | |J_Z X|^2 - |Z|^2 |X|^2 | / (|Z|^2 |X|^2)
  double square_residual = 0.0;  // max entry of J_Z^2 + |Z|^2 I over basis Z
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
};

inline constexpr double default_tolerance = 1e-9;

inline HTypeReport check_h_type(const HTypeAlgebra& alg, std::size_t samples, double tol = default_tolerance,
                                std::uint64_t seed = 0) {
  if (samples < 1) throw std::invalid_argument("check_h_type needs samples >= 1");
  HTypeReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.tolerance = tol;
  const int dv = alg.dim_v(), dz = alg.dim_z();
  if (dz == 0) {
    rep.is_h_type = true;
    return rep;
  }
  auto residual = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    const double lhs = (alg.j_map(z) * x).squaredNorm();
    const double rhs = z.squaredNorm() * x.squaredNorm();
    return std::abs(lhs - rhs) / rhs;
  };
  for (int k = 0; k < dz; ++k) {
    const Eigen::VectorXd z = Eigen::VectorXd::Unit(dz, k);
    const Eigen::MatrixXd j = alg.j_map(z);
    rep.square_residual =
        std::max(rep.square_residual, (j * j + Eigen::MatrixXd::Identity(dv, dv)).cwiseAbs().maxCoeff());
    for (int i = 0; i < dv; ++i) rep.max_residual = std::max(rep.max_residual, residual(Eigen::VectorXd::Unit(dv, i), z));
  }
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = gaussian_vector(rng, dv);
    const Eigen::VectorXd z = gaussian_vector(rng, dz);
    rep.max_residual = std::max(rep.max_residual, residual(x, z));
  }
  rep.is_h_type = rep.max_residual <= tol && rep.square_residual <= tol;
  return rep;
}

struct J2Witness {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd z_prime;
  double residual = 0.0;
};

struct J2Report {
  bool satisfies_j2 = false;
  double max_residual = 0.0;
  std::optional<J2Witness> witness;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
};

/// Distance from J_Z J_{Z'} X to span{J_{Z_k} X}, divided by |Z||Z'||X|.
inline double j2_residual(const HTypeAlgebra& alg, const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& z_prime) {
  const int dz = alg.dim_z();
  Eigen::MatrixXd span(alg.dim_v(), dz);
  for (int k = 0; k < dz; ++k) span.col(k) = alg.structure(k).transpose() * x;
  const Eigen::VectorXd w = alg.j_map(z) * (alg.j_map(z_prime) * x);
  const Eigen::VectorXd coeffs = span.colPivHouseholderQr().solve(w);
  return (w - span * coeffs).norm() / (z.norm() * z_prime.norm() * x.norm());
}

/// Gram-Schmidt on Gaussian vectors; resamples when the pair is nearly degenerate.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_orthonormal_pair(Rng& rng, Eigen::Index n) {
  for (;;) {
    Eigen::VectorXd a = gaussian_vector(rng, n);
    Eigen::VectorXd b = gaussian_vector(rng, n);
    const double na = a.norm();
    if (na < 1e-8) continue;
    a /= na;
    b -= b.dot(a) * a;
    const double nb = b.norm();
    if (nb < 1e-8) continue;
    return {a, b / nb};
  }
}

inline J2Report check_j2(const HTypeAlgebra& alg, std::size_t samples, double tol = default_tolerance,
                         std::uint64_t seed = 0) {
  if (!check_h_type(alg, samples, tol, seed).is_h_type)
    throw std::domain_error("check_j2 requires an algebra of Heisenberg type; '" + alg.label() + "' is not");
  J2Report rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.tolerance = tol;
  const int dv = alg.dim_v(), dz = alg.dim_z();
  if (dz <= 1) {
    rep.satisfies_j2 = true;
    return rep;
  }
  auto consider = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z, const Eigen::VectorXd& zp) {
    const double r = j2_residual(alg, x, z, zp);
    if (r > rep.max_residual || !rep.witness) {
      rep.max_residual = std::max(rep.max_residual, r);
      rep.witness = J2Witness{x, z, zp, r};
    }
  };
  for (int i = 0; i < dv; ++i)
    for (int a = 0; a < dz; ++a)
      for (int b = 0; b < dz; ++b)
        if (a != b) consider(Eigen::VectorXd::Unit(dv, i), Eigen::VectorXd::Unit(dz, a), Eigen::VectorXd::Unit(dz, b));
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = gaussian_vector(rng, dv).normalized();
    auto [z, zp] = sample_orthonormal_pair(rng, dz);
    consider(x, z, zp);
  }
  rep.satisfies_j2 = rep.max_residual <= tol;
  if (rep.satisfies_j2) rep.witness.reset();
  return rep;
}

/// Max coordinate deviation between the structure-constant bracket of make_heisenberg(kind, n)
/// and -sum_i Im(x_i conj(y_i)) with Im(K) identified with z via e_k <-> Z_k.
inline double bracket_vs_algebra_consistency(AlgebraKind kind, int n, std::size_t samples, std::uint64_t seed = 0) {
  const HTypeAlgebra alg = make_heisenberg(kind, n);
  const int d = static_cast<int>(dim(kind));
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = gaussian_vector(rng, alg.dim_v());
    const Eigen::VectorXd y = gaussian_vector(rng, alg.dim_v());
    AlgebraElement acc(kind);
    for (int b = 0; b < n; ++b) {
      AlgebraElement xb(kind), yb(kind);
      for (int c = 0; c < d; ++c) {
        xb[c] = x[b * d + c];
        yb[c] = y[b * d + c];
      }
      acc -= im(xb * conj(yb));
    }
    const Eigen::VectorXd br = alg.bracket(x, y);
    for (int k = 0; k < alg.dim_z(); ++k) worst = std::max(worst, std::abs(br[k] - acc[k + 1]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Algebra-spec files: {label, dim_v, dim_z, entries: [[i, j, k, value], ...]}, 1-based, i < j.

inline HTypeAlgebra algebra_from_json(const nlohmann::json& j) {
  auto field = [&j](const char* name) -> const nlohmann::json& {
    if (!j.contains(name)) throw std::invalid_argument(std::string("algebra spec: missing field '") + name + "'");
    return j.at(name);
  };
  if (!j.is_object()) throw std::invalid_argument("algebra spec: top level must be an object");
  const auto& label = field("label");
  const auto& dv = field("dim_v");
  const auto& dz = field("dim_z");
  const auto& entries = field("entries");
  if (!label.is_string()) throw std::invalid_argument("algebra spec: field 'label' must be a string");
  if (!dv.is_number_integer()) throw std::invalid_argument("algebra spec: field 'dim_v' must be an integer");
  if (!dz.is_number_integer()) throw std::invalid_argument("algebra spec: field 'dim_z' must be an integer");
  if (!entries.is_array()) throw std::invalid_argument("algebra spec: field 'entries' must be an array");
  const int dim_v = dv.get<int>(), dim_z = dz.get<int>();
  std::vector<StructureEntry> out;
  std::vector<std::vector<bool>> seen;
  for (std::size_t n = 0; n < entries.size(); ++n) {
    const auto& e = entries[n];
    const std::string where = "algebra spec: entries[" + std::to_string(n) + "]";
    if (!e.is_array() || e.size() != 4) throw std::invalid_argument(where + " must be [i, j, k, value]");
    for (int c = 0; c < 3; ++c)
      if (!e[c].is_number_integer()) throw std::invalid_argument(where + " indices must be integers");
    if (!e[3].is_number()) throw std::invalid_argument(where + " value must be a number");
    const int i = e[0].get<int>(), jj = e[1].get<int>(), k = e[2].get<int>();
    const double v = e[3].get<double>();
    if (i < 1 || i > dim_v || jj < 1 || jj > dim_v) throw std::invalid_argument(where + " index i or j outside 1..dim_v");
    if (k < 1 || k > dim_z) throw std::invalid_argument(where + " index k outside 1..dim_z");
    if (i >= jj) throw std::invalid_argument(where + " requires i < j");
    if (!std::isfinite(v)) throw std::invalid_argument(where + " value is not finite");
    for (const auto& prev : out)
      if (prev.i == i - 1 && prev.j == jj - 1 && prev.k == k - 1)
        throw std::invalid_argument(where + " duplicates an earlier entry");
    out.push_back({i - 1, jj - 1, k - 1, v});
  }
  return HTypeAlgebra(label.get<std::string>(), dim_v, dim_z, out);
}

inline nlohmann::json algebra_to_json(const HTypeAlgebra& alg) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : alg.entries()) entries.push_back({e.i + 1, e.j + 1, e.k + 1, e.value});
  return {{"label", alg.label()}, {"dim_v", alg.dim_v()}, {"dim_z", alg.dim_z()}, {"entries", entries}};
}

inline HTypeAlgebra load_algebra(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open algebra spec '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("algebra spec '" + path + "': " + e.what());
  }
  return algebra_from_json(j);
}

}  // namespace hlab
