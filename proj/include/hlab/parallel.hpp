#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace hlab {

using Rng = std::mt19937_64;

namespace detail {
inline std::atomic<unsigned>& max_threads_slot() {
  static std::atomic<unsigned> n{0};
  return n;
}
}  // namespace detail

/// Caps the worker count of batch kernels. 0 means hardware concurrency.
inline void set_max_threads(unsigned n) { detail::max_threads_slot() = n; }

inline unsigned max_threads() {
  unsigned n = detail::max_threads_slot();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under master seed `seed`.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix_seed(mix_seed(seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

/// Runs body(chunk_index, begin, end) over [0, count) split into fixed-size chunks.
/// Chunk boundaries do not depend on the thread count, so any per-chunk RNG stream
/// or partial result is reproducible. Chunks are handed out round-robin.
template <class Body>
void for_each_chunk(std::size_t count, std::size_t chunk, Body&& body) {
  if (count == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (count + chunk - 1) / chunk;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(max_threads(), chunks));
  auto run = [&](unsigned w) {
    for (std::size_t c = w; c < chunks; c += workers) {
      body(c, c * chunk, std::min(count, (c + 1) * chunk));
    }
  };
  if (workers <= 1) {
    run(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
}

/// Standard normal vector of length n.
inline Eigen::VectorXd gaussian_vector(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

/// Uniform on the Euclidean ball of radius r in R^n.
inline Eigen::VectorXd uniform_in_ball(Rng& rng, Eigen::Index n, double r) {
  if (n == 0) return Eigen::VectorXd(0);
  Eigen::VectorXd v;
  double len = 0.0;
  do {
    v = gaussian_vector(rng, n);
    len = v.norm();
  } while (len < 1e-300);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double s = r * std::pow(unit(rng), 1.0 / static_cast<double>(n));
  return v * (s / len);
}

}  // namespace hlab
