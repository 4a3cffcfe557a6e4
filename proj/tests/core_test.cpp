#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rkwf/core.hpp"
#include "test_support.hpp"

using namespace rkwf;

namespace {

ComplexVector vec(std::initializer_list<Complex> v) {
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto c : v) out[i++] = c;
  return out;
}

HermitianApply dense_apply(const ComplexMatrix& m) {
  return [m](const ComplexVector& v) { return ComplexVector(m * v); };
}

}  // namespace

TEST(Dist, IdentityAndGlobalPhase) {
  Rng rng(1);
  const ComplexVector x = test::random_cvec(7, rng);
  EXPECT_NEAR(dist_up_to_phase(x, x), 0.0, 1e-14);
  EXPECT_NEAR(dist_up_to_phase(x, std::polar(1.0, std::numbers::pi / 3) * x), 0.0, 1e-13);
}

TEST(Dist, OrthogonalUnitVectors) {
  EXPECT_NEAR(dist_up_to_phase(vec({1, 0}), vec({0, 1})), std::sqrt(2.0), 1e-15);
}

TEST(Dist, LengthMismatchThrows) {
  EXPECT_THROW(dist_up_to_phase(vec({1, 0}), vec({1})), std::invalid_argument);
}

TEST(Dist, MatchesBruteForcePhaseGrid) {
  for (const auto& p : test::oracle()["dist"]) {
    const ComplexVector x = test::cvec(p["x"]);
    const ComplexVector z = test::cvec(p["z"]);
    EXPECT_NEAR(dist_up_to_phase(x, z), p["dist"].get<double>(), 1e-8);
  }
}

TEST(Dist, LocalPhaseGridOracle) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 1 + rng.below(16);
    const ComplexVector x = test::random_cvec(n, rng);
    const ComplexVector z = test::random_cvec(n, rng);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 100000; ++k) {
      const double phi = 2 * std::numbers::pi * k / 100000.0;
      best = std::min(best, (std::polar(1.0, phi) * x - z).norm());
    }
    EXPECT_NEAR(dist_up_to_phase(x, z), best, 1e-8);
  }
}

TEST(Dist, InvariantUnderPhaseOfEitherArgument) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const ComplexVector x = test::random_cvec(9, rng);
    const ComplexVector z = test::random_cvec(9, rng);
    const double d = dist_up_to_phase(x, z);
    const Complex a = std::polar(1.0, rng.uniform(0, 2 * std::numbers::pi));
    const Complex b = std::polar(1.0, rng.uniform(0, 2 * std::numbers::pi));
    EXPECT_NEAR(dist_up_to_phase(a * x, z), d, 1e-12);
    EXPECT_NEAR(dist_up_to_phase(x, b * z), d, 1e-12);
  }
}

TEST(RelativeError, Examples) {
  Rng rng(4);
  const ComplexVector x = test::random_cvec(5, rng);
  EXPECT_NEAR(relative_error(x, x), 0.0, 1e-15);
  EXPECT_NEAR(relative_error(x, 2.0 * x), 1.0, 1e-14);
  EXPECT_NEAR(relative_error(vec({1, 0}), vec({0, 1})), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(relative_error(ComplexVector::Zero(3), x.head(3)), std::invalid_argument);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  Rng c(42), d(42);
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(c.normal(), d.normal());
}

TEST(Rng, DifferentSeedsDiffer) {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.next_u64() == b.next_u64();
  EXPECT_EQ(same, 0);
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(5);
  double s = 0, s2 = 0, u = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    s += v;
    s2 += v * v;
    const double w = rng.uniform();
    ASSERT_GE(w, 0.0);
    ASSERT_LT(w, 1.0);
    u += w;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
  EXPECT_NEAR(u / n, 0.5, 0.005);
}

TEST(Rng, BelowIsInRangeAndCoversAll) {
  Rng rng(6);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) hits[rng.below(7)]++;
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(DeriveSeed, KeysMatterAndOrderMatters) {
  EXPECT_NE(derive_seed(1, {1, 2}), derive_seed(1, {2, 1}));
  EXPECT_NE(derive_seed(1, {1}), derive_seed(2, {1}));
  EXPECT_EQ(derive_seed(9, {3, 4}), derive_seed(9, {3, 4}));
}

TEST(LeadingEigvec, Diagonal) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 2;
  m(1, 1) = 1;
  Rng rng(7);
  const auto r = leading_eigvec(dense_apply(m), 2, rng);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-8);
  EXPECT_NEAR(std::abs(r.vector[0]), 1.0, 1e-6);
}

TEST(LeadingEigvec, IdentityAnyUnitVector) {
  Rng rng(8);
  const auto r = leading_eigvec(dense_apply(ComplexMatrix::Identity(3, 3)), 3, rng);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_NEAR(r.vector.norm(), 1.0, 1e-12);
}

TEST(LeadingEigvec, TwoByTwoCoupled) {
  ComplexMatrix m(2, 2);
  m << 2, 1, 1, 2;
  Rng rng(9);
  const auto r = leading_eigvec(dense_apply(m), 2, rng);
  EXPECT_NEAR(r.value, 3.0, 1e-8);
  ComplexVector e(2);
  e << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_NEAR(dist_up_to_phase(e, r.vector), 0.0, 1e-4);
}

TEST(LeadingEigvec, DominatesRayleighQuotientsOfPsdMatrices) {
  Rng rng(10);
  for (int t = 0; t < 10; ++t) {
    ComplexMatrix b(6, 6);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.complex_normal();
    const ComplexMatrix m = b.adjoint() * b;
    const auto r = leading_eigvec(dense_apply(m), 6, rng);
    for (int k = 0; k < 20; ++k) {
      ComplexVector v = test::random_cvec(6, rng);
      v.normalize();
      EXPECT_GE(r.value, (v.dot(m * v)).real() - 1e-9 * r.value);
    }
  }
}

TEST(LeadingEigvec, AlgebraicallyLargestWithNegativeSpectrum) {
  // Dominant magnitude is negative; the largest algebraic eigenvalue is 1.
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 0) = -5;
  m(1, 1) = 1;
  m(2, 2) = -2;
  Rng rng(11);
  const auto r = leading_eigvec(dense_apply(m), 3, rng);
  EXPECT_NEAR(r.value, 1.0, 1e-8);
  EXPECT_NEAR(std::abs(r.vector[1]), 1.0, 1e-6);
}

TEST(LeadingEigvec, UnconvergedIsFlaggedNotThrown) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0 - 1e-9;
  Rng rng(12);
  const auto r = leading_eigvec(dense_apply(m), 2, rng, {3, 1e-14});
  EXPECT_FALSE(r.converged);
  EXPECT_NEAR(r.vector.norm(), 1.0, 1e-12);
}
