#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>
#include <hlab/hlie.hpp>

namespace {

using hlab::AlgebraKind;
using hlab::HTypeAlgebra;
using Eigen::VectorXd;

VectorXd unit(int n, int i) { return VectorXd::Unit(n, i); }

std::vector<HTypeAlgebra> heisenberg_family() {
  return {hlab::make_heisenberg(AlgebraKind::Real, 5),       hlab::make_heisenberg(AlgebraKind::Complex, 1),
          hlab::make_heisenberg(AlgebraKind::Complex, 3),    hlab::make_heisenberg(AlgebraKind::Quaternion, 1),
          hlab::make_heisenberg(AlgebraKind::Quaternion, 2), hlab::make_heisenberg(AlgebraKind::Octonion, 1)};
}

TEST(Hlie, ComplexBracket) {
  const auto a = hlab::make_heisenberg(AlgebraKind::Complex, 1);
  EXPECT_EQ(a.bracket(unit(2, 0), unit(2, 1)), unit(1, 0));
  const VectorXd x = VectorXd::Random(2);
  EXPECT_EQ(a.bracket(x, x), VectorXd::Zero(1));
}

TEST(Hlie, QuaternionBrackets) {
  const auto a = hlab::make_heisenberg(AlgebraKind::Quaternion, 1);
  const int X = 0, Y = 1, V = 2, W = 3;
  EXPECT_EQ(a.dim_v(), 4);
  EXPECT_EQ(a.dim_z(), 3);
  EXPECT_EQ(a.bracket(unit(4, X), unit(4, Y)), unit(3, 0));
  EXPECT_EQ(a.bracket(unit(4, V), unit(4, W)), unit(3, 0));
  EXPECT_EQ(a.bracket(unit(4, X), unit(4, V)), unit(3, 1));
  EXPECT_EQ(a.bracket(unit(4, W), unit(4, Y)), unit(3, 1));
  EXPECT_EQ(a.bracket(unit(4, X), unit(4, W)), unit(3, 2));
  EXPECT_EQ(a.bracket(unit(4, Y), unit(4, V)), unit(3, 2));
}

TEST(Hlie, RealIsAbelian) {
  const auto a = hlab::make_heisenberg(AlgebraKind::Real, 5);
  EXPECT_EQ(a.dim_v(), 5);
  EXPECT_EQ(a.dim_z(), 0);
  EXPECT_TRUE(a.entries().empty());
}

TEST(Hlie, OctonionBrackets) {
  const auto a = hlab::make_heisenberg(AlgebraKind::Octonion, 1);
  EXPECT_EQ(a.dim_v(), 8);
  EXPECT_EQ(a.dim_z(), 7);
  EXPECT_EQ(a.bracket(unit(8, 1), unit(8, 2)), unit(7, 3));  // [X_1, X_2] = Z_4
  for (int k = 1; k <= 7; ++k) EXPECT_EQ(a.bracket(unit(8, 0), unit(8, k)), unit(7, k - 1));
  EXPECT_THROW(hlab::make_heisenberg(AlgebraKind::Octonion, 2), std::domain_error);
}

TEST(Hlie, JMapExamples) {
  const auto c = hlab::make_heisenberg(AlgebraKind::Complex, 1);
  const auto j = c.j_map(unit(1, 0));
  EXPECT_EQ(VectorXd(j * unit(2, 0)), unit(2, 1));
  EXPECT_EQ(VectorXd(j * unit(2, 1)), VectorXd(-unit(2, 0)));
  EXPECT_TRUE(c.j_map(VectorXd::Zero(1)).isZero(0.0));
  const auto o = hlab::make_heisenberg(AlgebraKind::Octonion, 1);
  EXPECT_EQ(VectorXd(o.j_map(unit(7, 0)) * unit(8, 0)), unit(8, 1));
}

TEST(Hlie, JMapSkewAndDefiningIdentity) {
  std::mt19937_64 rng(1);
  for (const auto& a : heisenberg_family()) {
    for (int k = 0; k < a.dim_z(); ++k) {
      const auto j = a.j_map(unit(a.dim_z(), k));
      EXPECT_LE((j + j.transpose()).cwiseAbs().maxCoeff(), 1e-14) << a.label();
    }
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
      const VectorXd x = hlab::gaussian_vector(rng, a.dim_v()), y = hlab::gaussian_vector(rng, a.dim_v());
      const VectorXd z = hlab::gaussian_vector(rng, a.dim_z());
      worst = std::max(worst, std::abs((a.j_map(z) * x).dot(y) - z.dot(a.bracket(x, y))));
    }
    EXPECT_LE(worst, 1e-12) << a.label();
  }
}

TEST(Hlie, AnticommutingJForOrthogonalCenter) {
  std::mt19937_64 rng(2);
  for (const auto& a : heisenberg_family()) {
    if (a.dim_z() < 2) continue;
    for (int s = 0; s < 200; ++s) {
      auto [z, zp] = hlab::sample_orthonormal_pair(rng, a.dim_z());
      const auto j = a.j_map(z), jp = a.j_map(zp);
      EXPECT_LE((j * jp + jp * j).cwiseAbs().maxCoeff(), 1e-12) << a.label();
    }
  }
}

TEST(Hlie, HeisenbergFamilyPassesBothChecks) {
  for (const auto& a : heisenberg_family()) {
    const auto h = hlab::check_h_type(a, 2000, 1e-9, 3);
    EXPECT_TRUE(h.is_h_type) << a.label();
    EXPECT_LE(h.max_residual, 1e-12) << a.label();
    const auto j = hlab::check_j2(a, 2000, 1e-9, 3);
    EXPECT_TRUE(j.satisfies_j2) << a.label();
    EXPECT_LE(j.max_residual, 1e-12) << a.label();
    EXPECT_FALSE(j.witness.has_value());
  }
}

TEST(Hlie, RealIsVacuouslyHTypeAndJ2) {
  const auto a = hlab::make_heisenberg(AlgebraKind::Real, 3);
  EXPECT_TRUE(hlab::check_h_type(a, 1).is_h_type);
  EXPECT_TRUE(hlab::check_j2(a, 1).satisfies_j2);
}

TEST(Hlie, DegenerateSumIsNotHType) {
  const auto r = hlab::check_h_type(hlab::make_degenerate_sum(), 100);
  EXPECT_FALSE(r.is_h_type);
  EXPECT_GE(r.max_residual, 0.5);
  EXPECT_THROW(hlab::check_j2(hlab::make_degenerate_sum(), 100), std::domain_error);
}

TEST(Hlie, TruncatedQuaternionic) {
  const auto t = hlab::make_truncated_quaternionic();
  const auto full = hlab::make_heisenberg(AlgebraKind::Quaternion, 1);
  EXPECT_EQ(t.structure(0), full.structure(0));
  EXPECT_EQ(t.structure(1), full.structure(1));
  EXPECT_TRUE(hlab::check_h_type(t, 1000).is_h_type);
  const auto j = hlab::check_j2(t, 1000, 1e-9, 4);
  EXPECT_FALSE(j.satisfies_j2);
  ASSERT_TRUE(j.witness.has_value());
  EXPECT_NEAR(j.max_residual, 1.0, 1e-12);
  EXPECT_NEAR(hlab::j2_residual(t, unit(4, 0), unit(2, 0), unit(2, 1)), 1.0, 1e-14);
}

// Rank oracle: X_1, Z_1, Z_2 gives a J_Z J_Z' X outside span{J_{Z_k} X}, so appending it raises the rank.
TEST(Hlie, TruncatedWitnessRaisesRank) {
  const auto t = hlab::make_truncated_quaternionic();
  const VectorXd x = unit(4, 0);
  Eigen::MatrixXd m(4, 3);
  m.col(0) = t.j_map(unit(2, 0)) * x;
  m.col(1) = t.j_map(unit(2, 1)) * x;
  m.col(2) = t.j_map(unit(2, 0)) * (t.j_map(unit(2, 1)) * x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  EXPECT_EQ(svd.rank(), 3);
  Eigen::JacobiSVD<Eigen::MatrixXd> span(m.leftCols(2));
  EXPECT_EQ(span.rank(), 2);
}

TEST(Hlie, SpanOfJImagesHasFullRank) {
  std::mt19937_64 rng(5);
  for (const auto& a : heisenberg_family()) {
    if (a.dim_z() == 0) continue;
    const VectorXd x = hlab::gaussian_vector(rng, a.dim_v()).normalized();
    Eigen::MatrixXd m(a.dim_v(), a.dim_z());
    for (int k = 0; k < a.dim_z(); ++k) m.col(k) = a.j_map(unit(a.dim_z(), k)) * x;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    svd.setThreshold(1e-9);
    EXPECT_EQ(svd.rank(), a.dim_z()) << a.label();
  }
}

TEST(Hlie, BracketMatchesDivisionAlgebra) {
  // H_C(1): -Im(1 * conj(e_1)) = e_1, i.e. [X_1, Y_1] = Z.
  const auto c = AlgebraKind::Complex;
  const auto rhs = -hlab::im(hlab::AlgebraElement::basis(c, 0) * hlab::conj(hlab::AlgebraElement::basis(c, 1)));
  EXPECT_EQ(rhs, hlab::AlgebraElement::basis(c, 1));
  EXPECT_EQ(hlab::make_heisenberg(c, 1).bracket(unit(2, 0), unit(2, 1))[0], rhs[1]);
  EXPECT_LE(hlab::bracket_vs_algebra_consistency(c, 1, 1000, 1), 1e-12);
  EXPECT_LE(hlab::bracket_vs_algebra_consistency(AlgebraKind::Complex, 3, 1000, 2), 1e-12);
  EXPECT_LE(hlab::bracket_vs_algebra_consistency(AlgebraKind::Quaternion, 2, 1000, 3), 1e-12);
  EXPECT_LE(hlab::bracket_vs_algebra_consistency(AlgebraKind::Octonion, 1, 10000, 4), 1e-12);
  EXPECT_EQ(hlab::bracket_vs_algebra_consistency(AlgebraKind::Real, 4, 100, 5), 0.0);
}

TEST(Hlie, JsonRoundTripAndValidation) {
  const auto o = hlab::make_heisenberg(AlgebraKind::Octonion, 1);
  const auto back = hlab::algebra_from_json(hlab::algebra_to_json(o));
  EXPECT_EQ(back.fingerprint(), o.fingerprint());
  EXPECT_EQ(back.label(), "H_O");

  const auto spec = nlohmann::json::parse(R"({"label":"c","dim_v":2,"dim_z":1,"entries":[[1,2,1,1.0]]})");
  EXPECT_EQ(hlab::algebra_from_json(spec).fingerprint(), hlab::make_heisenberg(AlgebraKind::Complex, 1).fingerprint());

  auto bad = spec;
  bad["entries"] = nlohmann::json::parse("[[2,1,1,1.0]]");
  EXPECT_THROW(hlab::algebra_from_json(bad), std::invalid_argument);
  bad["entries"] = nlohmann::json::parse("[[1,3,1,1.0]]");
  EXPECT_THROW(hlab::algebra_from_json(bad), std::invalid_argument);
  bad["entries"] = nlohmann::json::parse("[[1,2,1,1.0],[1,2,1,2.0]]");
  EXPECT_THROW(hlab::algebra_from_json(bad), std::invalid_argument);
  bad = spec;
  bad.erase("dim_z");
  EXPECT_THROW(hlab::algebra_from_json(bad), std::invalid_argument);
}

TEST(Hlie, DimensionMismatchThrows) {
  const auto a = hlab::make_heisenberg(AlgebraKind::Complex, 1);
  EXPECT_THROW(a.bracket(VectorXd::Zero(3), VectorXd::Zero(2)), std::domain_error);
  EXPECT_THROW(a.j_map(VectorXd::Zero(2)), std::domain_error);
}

}  // namespace
