#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "hgroup.hpp"
#include "hlie.hpp"
#include "parallel.hpp"

namespace hlab {

using ExtendedMap = std::function<ExtendedPoint(const ExtendedPoint&)>;

/// The inversion sigma(v, z) = ((J_z - |v|^2/4) v, -z) / ||(v, z)||^4 at the identity.
/// On Heisenberg-type algebras it is an involution with ||sigma(p)|| ||p|| = 1; under the
/// J^2-condition it satisfies d(sigma p, sigma q) = d(p, q) / (||p|| ||q||) exactly.
inline GroupPoint sigma(const Group& g, const GroupPoint& p) {
  g.require(p);
  const double a = p.v.squaredNorm() / 4.0;
  const double n4 = a * a + p.z.squaredNorm();
  if (n4 == 0.0) throw std::domain_error("sigma is undefined at the identity (it maps e to infinity)");
  GroupPoint r{(g.algebra().j_map(p.z) * p.v - a * p.v) / n4, -p.z / n4};
  return r;
}

/// sigma extended to G u {infinity} by e <-> infinity.
inline ExtendedPoint sigma_extended(const Group& g, const ExtendedPoint& p) {
  if (p.is_infinite()) return g.identity();
  const GroupPoint& q = p.finite();
  if (q.v.isZero(0.0) && q.z.isZero(0.0)) return ExtendedPoint::infinity();
  return sigma(g, q);
}

/// phi_x = l_x o sigma o l_x^{-1}, with phi_x(x) = infinity and phi_x(infinity) = x.
inline ExtendedMap phi_at(const Group& g, const GroupPoint& x) {
  g.require(x);
  return [g, x](const ExtendedPoint& p) -> ExtendedPoint {
    if (p.is_infinite()) return x;
    const GroupPoint local = g.mul(g.inverse(x), p.finite());
    if (local.v.isZero(0.0) && local.z.isZero(0.0)) return ExtendedPoint::infinity();
    return g.mul(x, sigma(g, local));
  };
}

inline ExtendedMap identity_map() {
  return [](const ExtendedPoint& p) { return p; };
}

/// Left translation extended by infinity -> infinity.
inline ExtendedMap left_translation_map(const Group& g, const GroupPoint& h) {
  g.require(h);
  return [g, h](const ExtendedPoint& p) -> ExtendedPoint {
    if (p.is_infinite()) return p;
    return g.mul(h, p.finite());
  };
}

// ---------------------------------------------------------------------------

struct InversionReport {
  std::string algebra_label;
  std::uint64_t algebra_fingerprint = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  double max_relative_deviation = 0.0;
  bool is_exact_inversion = false;
  std::size_t worst_index = 0;
  GroupPoint worst_p;
  GroupPoint worst_q;
};

/// r(p, q) = d(sigma p, sigma q) ||p|| ||q|| / d(p, q); equals 1 for a 1-metric inversion.
inline double inversion_ratio(const Group& g, const GroupPoint& p, const GroupPoint& q) {
  return g.gauge_dist(sigma(g, p), sigma(g, q)) * g.gauge(p) * g.gauge(q) / g.gauge_dist(p, q);
}

namespace detail {
inline GroupPoint uniform_box_point(const Group& g, Rng& rng, double radius) {
  std::uniform_real_distribution<double> uv(-2.0 * radius, 2.0 * radius);
  std::uniform_real_distribution<double> uz(-radius * radius, radius * radius);
  GroupPoint p{Eigen::VectorXd(g.dim_v()), Eigen::VectorXd(g.dim_z())};
  for (int i = 0; i < g.dim_v(); ++i) p.v[i] = uv(rng);
  for (int k = 0; k < g.dim_z(); ++k) p.z[k] = uz(rng);
  return p;
}
}  // namespace detail

/// Samples pairs uniformly from the unit gauge box and reports max |r(p, q) - 1|.
/// Pairs are processed in fixed chunks of 1024, chunk c drawing from stream_seed(seed, c);
/// the worst pair is the one with the largest deviation, smallest index on ties.
inline InversionReport verify_inversion(const Group& g, std::size_t samples, std::uint64_t seed,
                                        double tolerance = 1e-9) {
  if (samples < 1) throw std::invalid_argument("verify_inversion needs samples >= 1");
  if (!check_h_type(g.algebra(), 1000, default_tolerance, seed).is_h_type)
    throw std::domain_error("verify_inversion requires an algebra of Heisenberg type; '" + g.algebra().label() +
                            "' is not");
  constexpr std::size_t chunk = 1024;
  struct Partial {
    double dev = -1.0;
    std::size_t index = 0;
    GroupPoint p, q;
  };
  std::vector<Partial> partial((samples + chunk - 1) / chunk);
  for_each_chunk(samples, chunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    Rng rng(stream_seed(seed, c));
    Partial best;
    for (std::size_t i = begin; i < end; ++i) {
      GroupPoint p, q;
      do {
        p = detail::uniform_box_point(g, rng, 1.0);
        q = detail::uniform_box_point(g, rng, 1.0);
      } while (g.gauge(p) == 0.0 || g.gauge(q) == 0.0 || p == q);
      const double dev = std::abs(inversion_ratio(g, p, q) - 1.0);
      if (dev > best.dev) best = {dev, i, p, q};
    }
    partial[c] = std::move(best);
  });
  InversionReport rep;
  rep.algebra_label = g.algebra().label();
  rep.algebra_fingerprint = g.algebra().fingerprint();
  rep.samples = samples;
  rep.seed = seed;
  rep.tolerance = tolerance;
  double worst = -1.0;
  for (auto& part : partial) {
    if (part.dev > worst) {
      worst = part.dev;
      rep.worst_index = part.index;
      rep.worst_p = std::move(part.p);
      rep.worst_q = std::move(part.q);
    }
  }
  rep.max_relative_deviation = worst;
  rep.is_exact_inversion = worst <= tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Two-point transporter g = phi_{x'} o l_z o phi_x with z = phi_{x'}^{-1}(y') phi_x(y)^{-1}.

enum class TransportBranch {
  DistinctFinite,          // x != y, x and x' finite
  DistinctAtInfinity,      // x != y, x or x' is infinity: those phi are replaced by the identity
  CoincidentFinite,        // x == y, both finite: g = l_z with z = x' x^{-1}
  CoincidentAtInfinity,    // x == y, x or x' infinite: l_z dropped, infinite phi replaced by id
};

inline std::string_view to_string(TransportBranch b) {
  switch (b) {
    case TransportBranch::DistinctFinite: return "distinct_finite";
    case TransportBranch::DistinctAtInfinity: return "distinct_at_infinity";
    case TransportBranch::CoincidentFinite: return "coincident_finite";
    case TransportBranch::CoincidentAtInfinity: return "coincident_at_infinity";
  }
  return "?";
}

struct Transporter {
  TransportBranch branch;
  ExtendedMap map;

  ExtendedPoint operator()(const ExtendedPoint& p) const { return map(p); }
};

namespace detail {

using Rational = boost::multiprecision::cpp_rational;

// Group arithmetic over exact rationals. Only field operations appear in the group law and
// in sigma, so transporter compositions are evaluated without rounding.
struct ExactPoint {
  std::vector<Rational> v, z;

  bool is_identity() const {
    for (const auto& c : v)
      if (c != 0) return false;
    for (const auto& c : z)
      if (c != 0) return false;
    return true;
  }
};

using ExactExtended = std::optional<ExactPoint>;

class ExactGroup {
 public:
  explicit ExactGroup(const Group& g) : dim_v_(g.dim_v()), dim_z_(g.dim_z()) {
    for (const auto& e : g.algebra().entries()) entries_.push_back({e.i, e.j, e.k, Rational(e.value)});
  }

  ExactPoint lift(const GroupPoint& p) const {
    ExactPoint r{std::vector<Rational>(dim_v_), std::vector<Rational>(dim_z_)};
    for (int i = 0; i < dim_v_; ++i) r.v[i] = Rational(p.v[i]);
    for (int k = 0; k < dim_z_; ++k) r.z[k] = Rational(p.z[k]);
    return r;
  }

  GroupPoint round(const ExactPoint& p) const {
    GroupPoint r{Eigen::VectorXd(dim_v_), Eigen::VectorXd(dim_z_)};
    for (int i = 0; i < dim_v_; ++i) r.v[i] = p.v[i].convert_to<double>();
    for (int k = 0; k < dim_z_; ++k) r.z[k] = p.z[k].convert_to<double>();
    return r;
  }

  ExactPoint mul(const ExactPoint& a, const ExactPoint& b) const {
    ExactPoint r = a;
    for (int i = 0; i < dim_v_; ++i) r.v[i] += b.v[i];
    for (int k = 0; k < dim_z_; ++k) r.z[k] += b.z[k];
    for (const auto& e : entries_) r.z[e.k] += e.value * (a.v[e.i] * b.v[e.j] - a.v[e.j] * b.v[e.i]) / 2;
    return r;
  }

  static ExactPoint inverse(ExactPoint p) {
    for (auto& c : p.v) c = -c;
    for (auto& c : p.z) c = -c;
    return p;
  }

  ExactExtended sigma(const ExactExtended& p) const {
    if (!p) return ExactPoint{std::vector<Rational>(dim_v_), std::vector<Rational>(dim_z_)};
    if (p->is_identity()) return std::nullopt;
    Rational a = 0, zz = 0;
    for (const auto& c : p->v) a += c * c;
    a /= 4;
    for (const auto& c : p->z) zz += c * c;
    const Rational n4 = a * a + zz;
    std::vector<Rational> jv(dim_v_);
    for (const auto& e : entries_) {
      jv[e.j] += p->z[e.k] * e.value * p->v[e.i];
      jv[e.i] -= p->z[e.k] * e.value * p->v[e.j];
    }
    ExactPoint r{std::vector<Rational>(dim_v_), std::vector<Rational>(dim_z_)};
    for (int i = 0; i < dim_v_; ++i) r.v[i] = (jv[i] - a * p->v[i]) / n4;
    for (int k = 0; k < dim_z_; ++k) r.z[k] = -p->z[k] / n4;
    return r;
  }

  // phi_x = l_x o sigma o l_x^{-1}; an absent x stands for the identity map.
  ExactExtended phi(const ExactExtended& x, const ExactExtended& p) const {
    if (!x) return p;
    if (!p) return x;
    const auto s = sigma(mul(inverse(*x), *p));
    if (!s) return std::nullopt;
    return mul(*x, *s);
  }

  ExactExtended translate(const ExactPoint& t, const ExactExtended& p) const {
    if (!p) return std::nullopt;
    return mul(t, *p);
  }

  ExactExtended lift(const ExtendedPoint& p) const {
    if (p.is_infinite()) return std::nullopt;
    return lift(p.finite());
  }

  ExtendedPoint round(const ExactExtended& p) const {
    if (!p) return ExtendedPoint::infinity();
    return round(*p);
  }

 private:
  struct Entry {
    int i, j, k;
    Rational value;
  };
  int dim_v_, dim_z_;
  std::vector<Entry> entries_;
};

}  // namespace detail

/// Builds g with g(x) = x' and g(y) = y'. Requires x' == y' exactly when x == y.
/// The composite is evaluated in exact rational arithmetic and rounded once at the end,
/// so g(x) == x' and g(y) == y' hold bit for bit.
inline Transporter pair_transporter(const Group& g, const ExtendedPoint& x, const ExtendedPoint& x_prime,
                                    const ExtendedPoint& y, const ExtendedPoint& y_prime) {
  const bool same = x == y;
  if (same != (x_prime == y_prime))
    throw std::domain_error("degenerate quadruple: x == y must hold exactly when x' == y'");
  if (!x.is_infinite()) g.require(x.finite());
  if (!x_prime.is_infinite()) g.require(x_prime.finite());
  if (!y.is_infinite()) g.require(y.finite());
  if (!y_prime.is_infinite()) g.require(y_prime.finite());

  auto ex = std::make_shared<const detail::ExactGroup>(g);
  // phi_x is an involution, so phi_x^{-1} = phi_x. An infinite x makes phi_x the identity.
  const auto px = ex->lift(x), pxp = ex->lift(x_prime);
  const bool finite = px && pxp;

  if (same && !finite) {
    return {TransportBranch::CoincidentAtInfinity, [ex, px, pxp](const ExtendedPoint& p) {
              return ex->round(ex->phi(pxp, ex->phi(px, ex->lift(p))));
            }};
  }
  if (same) {
    const auto t = ex->mul(*pxp, detail::ExactGroup::inverse(*px));
    return {TransportBranch::CoincidentFinite,
            [ex, t](const ExtendedPoint& p) { return ex->round(ex->translate(t, ex->lift(p))); }};
  }
  const auto a = ex->phi(pxp, ex->lift(y_prime));
  const auto b = ex->phi(px, ex->lift(y));
  const auto t = ex->mul(*a, detail::ExactGroup::inverse(*b));
  return {finite ? TransportBranch::DistinctFinite : TransportBranch::DistinctAtInfinity,
          [ex, px, pxp, t](const ExtendedPoint& p) {
            return ex->round(ex->phi(pxp, ex->translate(t, ex->phi(px, ex->lift(p)))));
          }};
}

}  // namespace hlab
