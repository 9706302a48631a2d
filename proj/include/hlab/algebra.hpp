#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hlab {

/// The four real normed division algebras.
enum class AlgebraKind { Real, Complex, Quaternion, Octonion };

constexpr std::size_t dim(AlgebraKind kind) {
  switch (kind) {
    case AlgebraKind::Real: return 1;
    case AlgebraKind::Complex: return 2;
    case AlgebraKind::Quaternion: return 4;
    case AlgebraKind::Octonion: return 8;
  }
  return 0;
}

/// Dimension of the imaginary part, one of 0, 1, 3, 7.
constexpr std::size_t imag_dim(AlgebraKind kind) { return dim(kind) - 1; }

inline std::string_view to_string(AlgebraKind kind) {
  switch (kind) {
    case AlgebraKind::Real: return "R";
    case AlgebraKind::Complex: return "C";
    case AlgebraKind::Quaternion: return "H";
    case AlgebraKind::Octonion: return "O";
  }
  return "?";
}

inline AlgebraKind parse_kind(std::string_view s) {
  if (s == "R") return AlgebraKind::Real;
  if (s == "C") return AlgebraKind::Complex;
  if (s == "H") return AlgebraKind::Quaternion;
  if (s == "O") return AlgebraKind::Octonion;
  throw std::invalid_argument("unknown algebra kind '" + std::string(s) + "' (expected R, C, H or O)");
}

/// Completely antisymmetric tensor on {1..7}, +1 on the cyclic orbits of
/// 124, 137, 156, 235, 267, 346, 457.
class EpsilonTensor {
 public:
  static constexpr std::array<std::array<int, 3>, 7> positive_triples{
      {{1, 2, 4}, {1, 3, 7}, {1, 5, 6}, {2, 3, 5}, {2, 6, 7}, {3, 4, 6}, {4, 5, 7}}};

  constexpr EpsilonTensor() : entries_{} {
    for (const auto& t : positive_triples) {
      const int a = t[0], b = t[1], c = t[2];
      set(a, b, c, 1);
      set(b, c, a, 1);
      set(c, a, b, 1);
      set(b, a, c, -1);
      set(a, c, b, -1);
      set(c, b, a, -1);
    }
  }

  /// Indices are 1-based, as in the octonion basis e_1..e_7.
  constexpr int operator()(int i, int j, int k) const { return entries_[i - 1][j - 1][k - 1]; }

 private:
  constexpr void set(int i, int j, int k, int v) { entries_[i - 1][j - 1][k - 1] = v; }
  std::array<std::array<std::array<int, 7>, 7>, 7> entries_;
};

inline constexpr EpsilonTensor epsilon{};

namespace detail {

// Signed basis index: e_i e_j = sign * e_index.
struct BasisProduct {
  int sign = 0;
  int index = 0;
};

using ProductTable = std::array<std::array<BasisProduct, 8>, 8>;

// e_0 is the unit; for imaginary units e_i e_j = -delta_ij e_0 + sum_k eps(i,j,k) e_k,
// with eps the Levi-Civita symbol on {1,2,3} for the quaternions.
constexpr ProductTable make_table(AlgebraKind kind) {
  ProductTable t{};
  const int n = static_cast<int>(dim(kind));
  for (int i = 0; i < n; ++i) {
    t[0][i] = {1, i};
    t[i][0] = {1, i};
  }
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      if (i == j) {
        t[i][j] = {-1, 0};
        continue;
      }
      for (int k = 1; k < n; ++k) {
        int e = 0;
        if (kind == AlgebraKind::Octonion) {
          e = epsilon(i, j, k);
        } else if (kind == AlgebraKind::Quaternion) {
          // cyclic (1,2,3) -> +1
          if (k != i && k != j) e = ((j - i + 3) % 3 == 1) ? 1 : -1;
        }
        if (e != 0) t[i][j] = {e, k};
      }
    }
  }
  return t;
}

inline constexpr std::array<ProductTable, 4> product_tables{
    make_table(AlgebraKind::Real), make_table(AlgebraKind::Complex),
    make_table(AlgebraKind::Quaternion), make_table(AlgebraKind::Octonion)};

}  // namespace detail

/// Element of a normed division algebra, stored as coefficients over e_0..e_{dim-1}.
class AlgebraElement {
 public:
  explicit AlgebraElement(AlgebraKind kind) : kind_(kind), c_{} {}

  AlgebraElement(AlgebraKind kind, std::initializer_list<double> coeffs) : kind_(kind), c_{} {
    if (coeffs.size() != dim(kind)) {
      throw std::invalid_argument("coefficient count " + std::to_string(coeffs.size()) +
                                  " does not match algebra dimension " + std::to_string(dim(kind)));
    }
    std::size_t i = 0;
    for (double v : coeffs) c_[i++] = v;
  }

  /// The basis element e_i.
  static AlgebraElement basis(AlgebraKind kind, std::size_t i) {
    if (i >= dim(kind)) throw std::out_of_range("basis index out of range");
    AlgebraElement e(kind);
    e.c_[i] = 1.0;
    return e;
  }

  AlgebraKind kind() const { return kind_; }
  std::size_t size() const { return dim(kind_); }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }

  AlgebraElement& operator+=(const AlgebraElement& o) {
    require_same(o);
    for (std::size_t i = 0; i < size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  AlgebraElement& operator-=(const AlgebraElement& o) {
    require_same(o);
    for (std::size_t i = 0; i < size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  AlgebraElement& operator*=(double s) {
    for (std::size_t i = 0; i < size(); ++i) c_[i] *= s;
    return *this;
  }

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(double s, AlgebraElement a) { return a *= s; }
  friend AlgebraElement operator-(AlgebraElement a) { return a *= -1.0; }

  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    a.require_same(b);
    const auto& table = detail::product_tables[static_cast<int>(a.kind_)];
    AlgebraElement r(a.kind_);
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (a.c_[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const auto p = table[i][j];
        r.c_[p.index] += p.sign * a.c_[i] * b.c_[j];
      }
    }
    return r;
  }

  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
    return a.kind_ == b.kind_ && a.c_ == b.c_;
  }

 private:
  void require_same(const AlgebraElement& o) const {
    if (o.kind_ != kind_) {
      throw std::domain_error(std::string("algebra kind mismatch: ") + std::string(to_string(kind_)) +
                              " vs " + std::string(to_string(o.kind_)));
    }
  }

  AlgebraKind kind_;
  std::array<double, 8> c_;
};

inline AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) { return a * b; }

inline AlgebraElement conj(AlgebraElement a) {
  for (std::size_t i = 1; i < a.size(); ++i) a[i] = -a[i];
  return a;
}

inline double re(const AlgebraElement& a) { return a[0]; }

inline AlgebraElement im(AlgebraElement a) {
  a[0] = 0.0;
  return a;
}

inline double norm_squared(const AlgebraElement& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i];
  return s;
}

inline double norm(const AlgebraElement& a) { return std::sqrt(norm_squared(a)); }

/// Worst relative defects of the division-algebra identities over random Gaussian samples.
struct AlgebraSoundness {
  AlgebraKind kind = AlgebraKind::Real;
  std::size_t samples = 0;
  double composition = 0.0;    // | |ab| - |a||b| | / (|a||b|)
  double associativity = 0.0;  // |a(bc) - (ab)c| / (|a||b||c|); R, C, H only
  double alternativity = 0.0;  // max of |a(ab) - (aa)b|, |(ab)b - a(bb)| over |a|^2|b| resp. |a||b|^2
  double imaginary_bracket = 0.0;  // |ab - ba - 2 im(ab)| / (|a||b|) for imaginary a, b
};

inline AlgebraSoundness check_algebra(AlgebraKind kind, std::size_t samples, std::uint64_t seed) {
  AlgebraSoundness r;
  r.kind = kind;
  r.samples = samples;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] {
    AlgebraElement e(kind);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = normal(rng);
    return e;
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const AlgebraElement a = draw(), b = draw(), c = draw();
    const double na = norm(a), nb = norm(b), nc = norm(c);
    const AlgebraElement ab = a * b;
    r.composition = std::max(r.composition, std::abs(norm(ab) - na * nb) / (na * nb));
    if (kind == AlgebraKind::Octonion) {
      r.alternativity = std::max(r.alternativity, norm(a * ab - (a * a) * b) / (na * na * nb));
      r.alternativity = std::max(r.alternativity, norm(ab * b - a * (b * b)) / (na * nb * nb));
    } else {
      r.associativity = std::max(r.associativity, norm(a * (b * c) - ab * c) / (na * nb * nc));
    }
    const AlgebraElement ia = im(a), ib = im(b);
    const double nia = norm(ia), nib = norm(ib);
    if (nia > 0.0 && nib > 0.0) {
      const AlgebraElement d = ia * ib - ib * ia - 2.0 * im(ia * ib);
      r.imaginary_bracket = std::max(r.imaginary_bracket, norm(d) / (nia * nib));
    }
  }
  return r;
}

}  // namespace hlab
