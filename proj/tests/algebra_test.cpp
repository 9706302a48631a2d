#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <hlab/algebra.hpp>

namespace {

using hlab::AlgebraElement;
using hlab::AlgebraKind;

constexpr AlgebraKind kAllKinds[] = {AlgebraKind::Real, AlgebraKind::Complex, AlgebraKind::Quaternion,
                                     AlgebraKind::Octonion};

AlgebraElement e(AlgebraKind k, std::size_t i) { return AlgebraElement::basis(k, i); }

AlgebraElement random_element(AlgebraKind k, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  AlgebraElement a(k);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = n(rng);
  return a;
}

TEST(Algebra, OctonionBasisProductFromEpsilon) {
  const auto p = e(AlgebraKind::Octonion, 1) * e(AlgebraKind::Octonion, 2);
  EXPECT_EQ(p, e(AlgebraKind::Octonion, 4));
}

TEST(Algebra, UnitIsNeutral) {
  std::mt19937_64 rng(3);
  for (auto k : kAllKinds) {
    const auto a = random_element(k, rng);
    EXPECT_EQ(e(k, 0) * a, a);
    EXPECT_EQ(a * e(k, 0), a);
  }
}

TEST(Algebra, BilinearExpansionOfSumTimesBasis) {
  // e1 e4 = eps_{142} e2 = -e2, e2 e4 = eps_{241} e1 = +e1
  const auto o = AlgebraKind::Octonion;
  const auto p = (e(o, 1) + e(o, 2)) * e(o, 4);
  EXPECT_EQ(p, e(o, 1) - e(o, 2));
  EXPECT_DOUBLE_EQ(hlab::norm_squared(p), 2.0);
}

// Oracle: e_i e_j read straight off the epsilon formula, compared with the precomputed table.
TEST(Algebra, TableMatchesEpsilonFormula) {
  const auto o = AlgebraKind::Octonion;
  for (int i = 1; i <= 7; ++i)
    for (int j = 1; j <= 7; ++j) {
      AlgebraElement want(o);
      if (i == j) want[0] = -1.0;
      for (int k = 1; k <= 7; ++k) want[k] += hlab::epsilon(i, j, k);
      EXPECT_EQ(e(o, i) * e(o, j), want) << i << "," << j;
    }
}

TEST(Algebra, QuaternionUnits) {
  const auto h = AlgebraKind::Quaternion;
  EXPECT_EQ(e(h, 1) * e(h, 2), e(h, 3));
  EXPECT_EQ(e(h, 2) * e(h, 3), e(h, 1));
  EXPECT_EQ(e(h, 3) * e(h, 1), e(h, 2));
  EXPECT_EQ(e(h, 2) * e(h, 1), -e(h, 3));
  EXPECT_EQ(e(h, 1) * e(h, 1), -e(h, 0));
}

TEST(Algebra, ConjugateRealImaginaryNorm) {
  const auto h = AlgebraKind::Quaternion;
  EXPECT_EQ(hlab::conj(e(h, 0) + e(h, 3)), e(h, 0) - e(h, 3));
  EXPECT_EQ(hlab::im(e(h, 0)), AlgebraElement(h));
  EXPECT_DOUBLE_EQ(hlab::re(AlgebraElement(h, {2, 1, 0, 0})), 2.0);
  EXPECT_DOUBLE_EQ(hlab::norm(e(AlgebraKind::Octonion, 1) + e(AlgebraKind::Octonion, 2)), std::sqrt(2.0));
}

TEST(Algebra, TimesConjugateIsSquaredNorm) {
  std::mt19937_64 rng(5);
  for (auto k : kAllKinds)
    for (int s = 0; s < 1000; ++s) {
      const auto a = random_element(k, rng);
      const auto p = a * hlab::conj(a);
      EXPECT_NEAR(p[0], hlab::norm_squared(a), 1e-12 * hlab::norm_squared(a));
      EXPECT_LE(hlab::norm(hlab::im(p)), 1e-12 * hlab::norm_squared(a));
    }
}

TEST(Algebra, CompositionLaw) {
  for (auto k : kAllKinds) {
    const auto r = hlab::check_algebra(k, 100000, 11);
    EXPECT_LE(r.composition, 1e-12) << hlab::to_string(k);
  }
}

TEST(Algebra, AssociativeUpToQuaternions) {
  for (auto k : {AlgebraKind::Real, AlgebraKind::Complex, AlgebraKind::Quaternion}) {
    const auto r = hlab::check_algebra(k, 100000, 12);
    EXPECT_LE(r.associativity, 1e-14) << hlab::to_string(k);
  }
}

TEST(Algebra, OctonionsAlternativeButNotAssociative) {
  const auto r = hlab::check_algebra(AlgebraKind::Octonion, 100000, 13);
  EXPECT_LE(r.alternativity, 1e-14);
  const auto o = AlgebraKind::Octonion;
  const auto lhs = e(o, 1) * (e(o, 2) * e(o, 3));
  const auto rhs = (e(o, 1) * e(o, 2)) * e(o, 3);
  EXPECT_NE(lhs, rhs);
}

TEST(Algebra, ImaginaryBracket) {
  for (auto k : kAllKinds) EXPECT_LE(hlab::check_algebra(k, 10000, 14).imaginary_bracket, 1e-14);
}

TEST(Algebra, EpsilonAntisymmetry) {
  int positive = 0;
  for (int i = 1; i <= 7; ++i)
    for (int j = 1; j <= 7; ++j)
      for (int k = 1; k <= 7; ++k) {
        const int v = hlab::epsilon(i, j, k);
        EXPECT_EQ(v, -hlab::epsilon(j, i, k));
        EXPECT_EQ(v, -hlab::epsilon(i, k, j));
        if (v == 1) ++positive;
      }
  // 7 lines of the Fano plane, 3 cyclic rotations each
  EXPECT_EQ(positive, 21);
  EXPECT_EQ(hlab::epsilon(1, 2, 4), 1);
  EXPECT_EQ(hlab::epsilon(4, 5, 7), 1);
  EXPECT_EQ(hlab::epsilon(7, 1, 3), 1);
  EXPECT_EQ(hlab::epsilon(1, 2, 3), 0);
}

TEST(Algebra, KindMismatchThrows) {
  EXPECT_THROW(e(AlgebraKind::Complex, 1) * e(AlgebraKind::Quaternion, 1), std::domain_error);
  EXPECT_THROW(AlgebraElement(AlgebraKind::Complex, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(hlab::parse_kind("Q"), std::invalid_argument);
}

}  // namespace
