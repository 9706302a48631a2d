#include <gtest/gtest.h>

#include <atomic>
#include <set>

#include <hlab/distortion.hpp>
#include <hlab/finite_metric.hpp>
#include <hlab/inversion.hpp>

namespace {

using hlab::AlgebraKind;
using hlab::Group;

class ThreadCount : public ::testing::Test {
 protected:
  void TearDown() override { hlab::set_max_threads(0); }

  template <class F>
  static auto with_threads(unsigned n, F&& f) {
    hlab::set_max_threads(n);
    return f();
  }
};

TEST_F(ThreadCount, StreamSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(hlab::stream_seed(s, i));
  EXPECT_EQ(seen.size(), 4000u);
}

TEST_F(ThreadCount, EveryChunkRunsOnce) {
  for (unsigned t : {1u, 2u, 7u}) {
    hlab::set_max_threads(t);
    std::vector<std::atomic<int>> hits(1003);
    hlab::for_each_chunk(1003, 10, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST_F(ThreadCount, DistanceMatrix) {
  const Group g(hlab::make_heisenberg(AlgebraKind::Octonion, 1));
  const auto pts = g.sample_points(150, 1.0, 1);
  const auto a = with_threads(1, [&] { return g.distance_matrix(pts); });
  const auto b = with_threads(5, [&] { return g.distance_matrix(pts); });
  EXPECT_EQ(a, b);
}

TEST_F(ThreadCount, ChainMetric) {
  const Group g(hlab::make_heisenberg(AlgebraKind::Complex, 1));
  const auto s = hlab::from_group_sample(g, g.sample_points(300, 1.0, 2));
  const auto q = hlab::inversion_quasimetric(hlab::BasedSpace(s, 0));
  const auto a = with_threads(1, [&] { return hlab::chain_metric(q).dist; });
  const auto b = with_threads(4, [&] { return hlab::chain_metric(q).dist; });
  EXPECT_EQ(a, b);
}

TEST_F(ThreadCount, VerifyInversion) {
  const Group g(hlab::make_truncated_quaternionic());
  const auto a = with_threads(1, [&] { return hlab::verify_inversion(g, 30000, 3); });
  const auto b = with_threads(4, [&] { return hlab::verify_inversion(g, 30000, 3); });
  EXPECT_EQ(a.max_relative_deviation, b.max_relative_deviation);
  EXPECT_EQ(a.worst_index, b.worst_index);
  EXPECT_EQ(a.worst_p, b.worst_p);
}

TEST_F(ThreadCount, QuasimobiusQcAndRegularity) {
  const Group g(hlab::make_heisenberg(AlgebraKind::Complex, 1));
  const auto d = g.distance_matrix(g.sample_points(50, 1.0, 4));
  const auto dd = d.array().sqrt().matrix().eval();
  const auto a = with_threads(1, [&] { return hlab::estimate_quasimobius(d, dd, 50000, 5); });
  const auto b = with_threads(6, [&] { return hlab::estimate_quasimobius(d, dd, 50000, 5); });
  EXPECT_EQ(a.strong_constant, b.strong_constant);
  EXPECT_EQ(a.min_ratio, b.min_ratio);
  ASSERT_EQ(a.envelope.size(), b.envelope.size());
  for (std::size_t i = 0; i < a.envelope.size(); ++i) EXPECT_EQ(a.envelope[i].t_prime_max, b.envelope[i].t_prime_max);

  const auto set = hlab::group_qc_setting(g, [g](const hlab::GroupPoint& p) { return hlab::sigma(g, p); });
  const auto c = g.sample_points(1, 1.0, 6).front();
  const auto qa = with_threads(1, [&] { return hlab::estimate_qc_ratio(set, c, {0.1, 0.01}, 3000, 7); });
  const auto qb = with_threads(3, [&] { return hlab::estimate_qc_ratio(set, c, {0.1, 0.01}, 3000, 7); });
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(qa.scales[i].ratio, qb.scales[i].ratio);

  const auto ra = with_threads(1, [&] { return hlab::estimate_regularity(g, c, {0.1, 1.0}, 50000, 8); });
  const auto rb = with_threads(4, [&] { return hlab::estimate_regularity(g, c, {0.1, 1.0}, 50000, 8); });
  EXPECT_EQ(ra.fitted_q, rb.fitted_q);
}

}  // namespace
