#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hgroup.hpp"
#include "parallel.hpp"

namespace hlab {

struct Quadruple {
  Eigen::Index x, y, z, w;

  bool distinct() const { return x != y && x != z && x != w && y != z && y != w && z != w; }
};

/// d(x,y) d(z,w) / (d(x,z) d(y,w)).
inline double cross_ratio(const Eigen::MatrixXd& d, const Quadruple& q) {
  if (!q.distinct()) throw std::domain_error("cross_ratio: quadruple points must be pairwise distinct");
  const Eigen::Index n = d.rows();
  for (Eigen::Index i : {q.x, q.y, q.z, q.w})
    if (i < 0 || i >= n) throw std::out_of_range("cross_ratio: index outside the matrix");
  const double den = d(q.x, q.z) * d(q.y, q.w);
  if (den == 0.0) throw std::domain_error("cross_ratio: degenerate quadruple (zero denominator)");
  return d(q.x, q.y) * d(q.z, q.w) / den;
}

// ---------------------------------------------------------------------------
// Quasimobius control

struct EnvelopeBin {
  int bin = 0;         // floor(4 log10 t)
  double t_max = 0.0;  // largest input cross-ratio in the bin
  double t_prime_max = 0.0;
};

struct QuasimobiusReport {
  std::size_t samples = 0;  // quadruple draws; each also evaluates its (x,z,y,w) partner
  std::size_t evaluated = 0;
  std::size_t degenerate = 0;
  std::uint64_t seed = 0;
  double strong_constant = 0.0;  // max t'/t
  double min_ratio = 0.0;        // min t'/t
  std::vector<EnvelopeBin> envelope;
  std::vector<std::pair<double, double>> raw;  // (t, t') when requested
};

inline constexpr int envelope_bins_per_decade = 4;

/// Cross-ratio pairs (t, t') of sampled quadruples under d_in and d_out. Each draw also
/// evaluates the quadruple (x, z, y, w), whose cross-ratios are 1/t and 1/t', so the sample
/// is closed under that swap and the strong constant is at least 1.
inline QuasimobiusReport estimate_quasimobius(const Eigen::MatrixXd& d_in, const Eigen::MatrixXd& d_out,
                                              std::size_t samples, std::uint64_t seed, std::size_t keep_raw = 0) {
  const Eigen::Index n = d_in.rows();
  if (d_in.cols() != n || d_out.rows() != n || d_out.cols() != n)
    throw std::invalid_argument("estimate_quasimobius: matrices must be square and of the same size");
  if (n < 4) throw std::invalid_argument("estimate_quasimobius: needs at least 4 points, got " + std::to_string(n));
  if (samples < 1) throw std::invalid_argument("estimate_quasimobius: needs samples >= 1");

  constexpr std::size_t chunk = 4096;
  struct Partial {
    double cmax = 0.0, cmin = std::numeric_limits<double>::infinity();
    std::size_t evaluated = 0, degenerate = 0;
    std::map<int, std::pair<double, double>> bins;
    std::vector<std::pair<double, double>> raw;
  };
  std::vector<Partial> partial((samples + chunk - 1) / chunk);
  for_each_chunk(samples, chunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    Rng rng(stream_seed(seed, c));
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    Partial& part = partial[c];
    auto record = [&](double t, double tp) {
      const double ratio = tp / t;
      part.cmax = std::max(part.cmax, ratio);
      part.cmin = std::min(part.cmin, ratio);
      ++part.evaluated;
      const int bin = static_cast<int>(std::floor(envelope_bins_per_decade * std::log10(t)));
      auto& b = part.bins[bin];
      b.first = std::max(b.first, t);
      b.second = std::max(b.second, tp);
    };
    for (std::size_t s = begin; s < end; ++s) {
      Quadruple q{};
      do q = {pick(rng), pick(rng), pick(rng), pick(rng)};
      while (!q.distinct());
      const double a_in = d_in(q.x, q.y) * d_in(q.z, q.w), b_in = d_in(q.x, q.z) * d_in(q.y, q.w);
      const double a_out = d_out(q.x, q.y) * d_out(q.z, q.w), b_out = d_out(q.x, q.z) * d_out(q.y, q.w);
      if (a_in == 0.0 || b_in == 0.0 || a_out == 0.0 || b_out == 0.0) {
        ++part.degenerate;
        continue;
      }
      const double t = a_in / b_in, tp = a_out / b_out;
      record(t, tp);
      record(b_in / a_in, b_out / a_out);
      if (s < keep_raw) part.raw.emplace_back(t, tp);
    }
  });
  QuasimobiusReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  std::map<int, std::pair<double, double>> bins;
  for (auto& part : partial) {
    rep.strong_constant = std::max(rep.strong_constant, part.cmax);
    rep.min_ratio = std::min(rep.min_ratio, part.cmin);
    rep.evaluated += part.evaluated;
    rep.degenerate += part.degenerate;
    for (const auto& [k, v] : part.bins) {
      auto& b = bins[k];
      b.first = std::max(b.first, v.first);
      b.second = std::max(b.second, v.second);
    }
    rep.raw.insert(rep.raw.end(), part.raw.begin(), part.raw.end());
  }
  for (const auto& [k, v] : bins) rep.envelope.push_back({k, v.first, v.second});
  if (rep.evaluated == 0) rep.min_ratio = 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Metric quasiconformality ratio H(x, r) = sup{d(fx, fy) : d(x,y) <= r} / inf{d(fx, fz) : d(x,z) >= r}

template <class Point>
struct QcSetting {
  std::function<Point(const Point&)> map;
  std::function<double(const Point&, const Point&)> domain_dist;
  std::function<double(const Point&, const Point&)> range_dist;
  /// A random point at domain distance `radius` from `center`.
  std::function<Point(const Point& center, double radius, Rng&)> sample_at;
};

struct QcScale {
  double radius = 0.0;
  double ratio = 0.0;  // H(center, radius); NaN when insufficient
  double sup = 0.0;
  double inf = 0.0;
  std::size_t inner = 0;  // points with d <= r
  std::size_t outer = 0;  // points with d >= r
  bool insufficient = false;
};

struct QcReport {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double annulus_width = 0.05;
  std::vector<QcScale> scales;
};

/// For each radius r, draws `samples` points on the r-sphere and `samples` points in the
/// annulus [(1-w) r, (1+w) r], classifies them by their actual domain distance and reports
/// sup/inf of image distances. Finite-scale surrogate for the limsup.
template <class Point>
QcReport estimate_qc_ratio(const QcSetting<Point>& s, const Point& center, const std::vector<double>& radii,
                           std::size_t samples, std::uint64_t seed, double annulus_width = 0.05) {
  if (radii.empty()) throw std::invalid_argument("estimate_qc_ratio: no radii given");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw std::invalid_argument("estimate_qc_ratio: radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw std::invalid_argument("estimate_qc_ratio: radii must be decreasing");
  }
  if (samples < 1) throw std::invalid_argument("estimate_qc_ratio: needs samples >= 1");
  QcReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.annulus_width = annulus_width;
  const Point fc = s.map(center);
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    constexpr std::size_t chunk = 512;
    struct Partial {
      double sup = 0.0, inf = std::numeric_limits<double>::infinity();
      std::size_t inner = 0, outer = 0;
    };
    std::vector<Partial> partial((samples + chunk - 1) / chunk);
    for_each_chunk(samples, chunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
      Rng rng(stream_seed(stream_seed(seed, ri), c));
      std::uniform_real_distribution<double> width(1.0 - annulus_width, 1.0 + annulus_width);
      Partial& part = partial[c];
      auto consider = [&](const Point& y) {
        const double dy = s.domain_dist(center, y);
        const double img = s.range_dist(fc, s.map(y));
        if (dy <= r) {
          part.sup = std::max(part.sup, img);
          ++part.inner;
        }
        if (dy >= r) {
          part.inf = std::min(part.inf, img);
          ++part.outer;
        }
      };
      for (std::size_t k = begin; k < end; ++k) {
        consider(s.sample_at(center, r, rng));
        consider(s.sample_at(center, r * width(rng), rng));
      }
    });
    QcScale sc;
    sc.radius = r;
    sc.inf = std::numeric_limits<double>::infinity();
    for (const auto& p : partial) {
      sc.sup = std::max(sc.sup, p.sup);
      sc.inf = std::min(sc.inf, p.inf);
      sc.inner += p.inner;
      sc.outer += p.outer;
    }
    sc.insufficient = sc.inner == 0 || sc.outer == 0 || !(sc.inf > 0.0);
    sc.ratio = sc.insufficient ? std::numeric_limits<double>::quiet_NaN() : sc.sup / sc.inf;
    rep.scales.push_back(sc);
  }
  return rep;
}

/// Gauge-metric setting on a group; points at distance s from c are c * delta_s(u), ||u|| = 1.
inline QcSetting<GroupPoint> group_qc_setting(const Group& g, std::function<GroupPoint(const GroupPoint&)> f) {
  QcSetting<GroupPoint> s;
  s.map = std::move(f);
  s.domain_dist = [g](const GroupPoint& a, const GroupPoint& b) { return g.gauge_dist(a, b); };
  s.range_dist = s.domain_dist;
  s.sample_at = [g](const GroupPoint& c, double radius, Rng& rng) {
    return g.mul(c, g.dilate(radius, g.random_unit_point(rng)));
  };
  return s;
}

// ---------------------------------------------------------------------------
// Ahlfors regularity

struct RegularityScale {
  double radius = 0.0;
  std::size_t hits = 0;
  double volume = 0.0;  // Monte-Carlo Lebesgue measure of B(center, radius)
};

struct RegularityReport {
  std::size_t samples = 0;  // per radius
  std::uint64_t seed = 0;
  int homogeneous_dimension = 0;
  double fitted_q = 0.0;
  double intercept = 0.0;  // log mu(B(center, 1)) from the fit
  double residual = 0.0;   // RMS of the log-log fit
  std::vector<RegularityScale> scales;
};

/// log of the volume of the Euclidean ball of radius rho in R^n.
inline double log_ball_volume(int n, double rho) {
  if (n == 0) return 0.0;
  const double h = 0.5 * n;
  return h * std::log(std::numbers::pi) - std::lgamma(h + 1.0) + n * std::log(rho);
}

/// Lebesgue (= Haar) measure of gauge balls by Monte Carlo: points uniform on the product of
/// Euclidean balls {|v| <= 2r} x {|z| <= r^2}, which contains B(e, r), translated to the center.
/// Slope of the least-squares line through (log r, log mu) estimates Q.
inline RegularityReport estimate_regularity(const Group& g, const GroupPoint& center, const std::vector<double>& radii,
                                            std::size_t samples, std::uint64_t seed) {
  g.require(center);
  if (radii.size() < 2) throw std::invalid_argument("estimate_regularity: needs at least two radii");
  const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
  if (!(*lo > 0.0)) throw std::invalid_argument("estimate_regularity: radii must be positive");
  if (*hi < 10.0 * *lo) throw std::invalid_argument("estimate_regularity: radii must span at least one decade");
  if (samples < 1) throw std::invalid_argument("estimate_regularity: needs samples >= 1");

  RegularityReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.homogeneous_dimension = g.homogeneous_dimension();
  constexpr std::size_t chunk = 8192;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    std::vector<std::size_t> hits((samples + chunk - 1) / chunk, 0);
    for_each_chunk(samples, chunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
      Rng rng(stream_seed(stream_seed(seed, ri), c));
      std::size_t h = 0;
      for (std::size_t k = begin; k < end; ++k) {
        const GroupPoint u{uniform_in_ball(rng, g.dim_v(), 2.0 * r), uniform_in_ball(rng, g.dim_z(), r * r)};
        if (g.gauge_dist(g.mul(center, u), center) <= r) ++h;
      }
      hits[c] = h;
    });
    RegularityScale sc;
    sc.radius = r;
    for (auto h : hits) sc.hits += h;
    if (sc.hits == 0) throw std::domain_error("estimate_regularity: degenerate fit, no hits at radius " + format_double(r));
    const double log_region = log_ball_volume(g.dim_v(), 2.0 * r) + log_ball_volume(g.dim_z(), r * r);
    sc.volume = std::exp(log_region + std::log(static_cast<double>(sc.hits) / static_cast<double>(samples)));
    rep.scales.push_back(sc);
  }
  const auto m = static_cast<double>(rep.scales.size());
  double mx = 0.0, my = 0.0;
  for (const auto& sc : rep.scales) {
    mx += std::log(sc.radius);
    my += std::log(sc.volume);
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& sc : rep.scales) {
    const double dx = std::log(sc.radius) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(sc.volume) - my);
  }
  rep.fitted_q = sxy / sxx;
  rep.intercept = my - rep.fitted_q * mx;
  double ss = 0.0;
  for (const auto& sc : rep.scales) {
    const double e = std::log(sc.volume) - (rep.intercept + rep.fitted_q * std::log(sc.radius));
    ss += e * e;
  }
  rep.residual = std::sqrt(ss / m);
  return rep;
}

}  // namespace hlab
