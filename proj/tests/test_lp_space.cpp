#include "banachproj/lp_space.hpp"
#include "banachproj/numdiff.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace banachproj;

namespace {

LpVector vec(std::initializer_list<double> c, double p) { return LpVector(c, p); }

LpVector random_vector(std::mt19937_64& rng, std::size_t n, double p) {
  std::normal_distribution<double> N;
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& c : v) c = N(rng);
  return LpVector(std::move(v), Exponent(p));
}

}  // namespace

TEST(Exponent, RejectsEndpointsAndNonFinite) {
  EXPECT_THROW(Exponent(1.0), DomainError);
  EXPECT_THROW(Exponent(0.5), DomainError);
  EXPECT_THROW(Exponent(std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(Exponent(std::nan("")), DomainError);
  EXPECT_NO_THROW(Exponent(1.0001));
  EXPECT_DOUBLE_EQ(Exponent(3.0).conjugate(), 1.5);
}

TEST(Exponent, ConjugateRoundTripComparesEqual) {
  for (double p : {1.1, 1.5, 3.0, 7.3}) {
    const double q = Exponent(p).conjugate();
    EXPECT_TRUE(Exponent(q / (q - 1.0)) == Exponent(p)) << p;
  }
}

TEST(LpNorm, Examples) {
  EXPECT_NEAR(lp_norm(vec({1, 1, 1}, 3)), 1.442249, 1e-6);
  EXPECT_NEAR(lp_norm(vec({1, 1, 1}, 3)), static_cast<double>(oracle::norm(Eigen::Vector3d(1, 1, 1), 3)), 1e-15);
  EXPECT_EQ(lp_norm(LpVector::zero(4, Exponent(1.7))), 0.0);
  EXPECT_DOUBLE_EQ(lp_norm(vec({3, 4}, 2)), 5.0);
}

TEST(LpNorm, MatchesNaiveSumAcrossScales) {
  std::mt19937_64 rng(11);
  for (double p : {1.2, 1.5, 2.0, 3.0, 6.0})
    for (double scale : {1e-120, 1e-3, 1.0, 1e5}) {
      const LpVector x = scale * random_vector(rng, 5, p);
      const long double ref = oracle::norm(x.coords() / scale, p) * scale;
      EXPECT_NEAR(lp_norm(x) / static_cast<double>(ref), 1.0, 1e-13) << p << " " << scale;
    }
}

TEST(LpNorm, ScalingAvoidsOverflowAndUnderflow) {
  EXPECT_NEAR(lp_norm(vec({1e300, 1e300}, 3)) / (1e300 * std::cbrt(2.0)), 1.0, 1e-14);
  EXPECT_NEAR(lp_norm(vec({1e-300, 1e-300}, 3)) / (1e-300 * std::cbrt(2.0)), 1.0, 1e-14);
}

TEST(DualNorm, Examples) {
  EXPECT_NEAR(dual_norm(DualVector::with_q(Eigen::Vector3d(1, 1, 1), 1.5)), 2.080084, 1e-6);
  EXPECT_EQ(dual_norm(DualVector::with_q(Eigen::Vector3d::Zero(), 1.5)), 0.0);
  EXPECT_DOUBLE_EQ(dual_norm(DualVector::with_q(Eigen::Vector2d(1, 1), 2.0)), std::sqrt(2.0));
}

TEST(Pairing, Examples) {
  const LpVector x = vec({2, 5, 7}, 3);
  EXPECT_EQ(pairing(DualVector(Eigen::Vector3d(1, 0, 0), Exponent(3)), x), 2.0);
  EXPECT_EQ(pairing(DualVector(Eigen::Vector3d::Zero(), Exponent(3)), x), 0.0);
  const LpVector ones = vec({1, 1, 1}, 3);
  const double n = static_cast<double>(oracle::norm(ones.coords(), 3));
  EXPECT_NEAR(pairing(duality_map(ones), ones), n * n, 1e-14);
  EXPECT_NEAR(pairing(duality_map(ones), ones), std::pow(3.0, 2.0 / 3.0), 1e-14);
}

TEST(Pairing, RejectsMixedSpaces) {
  EXPECT_THROW(pairing(DualVector(Eigen::Vector3d(1, 0, 0), Exponent(3)), vec({1, 2, 3}, 2)), SpaceMismatch);
  EXPECT_THROW(pairing(DualVector(Eigen::Vector2d(1, 0), Exponent(3)), vec({1, 2, 3}, 3)), SpaceMismatch);
  EXPECT_THROW(vec({1, 2}, 3) + vec({1, 2}, 2), SpaceMismatch);
}

TEST(DualityMap, Examples) {
  const DualVector j = duality_map(vec({1, 1, 1}, 3));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(j.coords()[i], 0.693361, 1e-6);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(j.coords()[i], std::pow(3.0, -1.0 / 3.0), 1e-15);
  EXPECT_TRUE(duality_map(LpVector::zero(3, Exponent(1.5))).coords().isZero());
  const DualVector h = duality_map(vec({3, 4}, 2));
  EXPECT_EQ(h.coords(), Eigen::Vector2d(3, 4));
  EXPECT_DOUBLE_EQ(j.q(), 1.5);
}

TEST(DualityMap, MatchesDefiningFormula) {
  std::mt19937_64 rng(5);
  for (double p : {1.3, 1.5, 2.0, 3.0, 4.0})
    for (int k = 0; k < 50; ++k) {
      const LpVector x = random_vector(rng, 4, p);
      const Eigen::VectorXd ref = oracle::duality(x.coords(), p);
      EXPECT_LE((duality_map(x).coords() - ref).cwiseAbs().maxCoeff(), 1e-13 * std::max(1.0, ref.norm()));
    }
}

TEST(DualityMap, ZeroCoordinatesStayZero) {
  for (double p : {1.1, 1.5, 3.0}) {
    const DualVector j = duality_map(vec({0.0, -2.0, 0.0}, p));
    EXPECT_EQ(j.coords()[0], 0.0);
    EXPECT_EQ(j.coords()[2], 0.0);
    EXPECT_TRUE(std::isfinite(j.coords()[1]));
  }
}

TEST(DualityMap, Identities) {
  std::mt19937_64 rng(7);
  for (double p : {1.5, 2.0, 3.0, 4.0})
    for (std::size_t n : {2u, 3u, 5u, 8u})
      for (int k = 0; k < 100; ++k) {
        const LpVector x = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng)) * random_vector(rng, n, p);
        const double nx = lp_norm(x);
        const DualVector jx = duality_map(x);
        EXPECT_LE(std::abs(pairing(jx, x) - nx * nx), 1e-12 * std::max(1.0, nx * nx));
        EXPECT_LE(std::abs(dual_norm(jx) - nx), 1e-12 * std::max(1.0, nx));
        EXPECT_LE(lp_norm(inverse_duality_map(jx) - x), 1e-10 * std::max(1.0, nx));
      }
}

TEST(DualityMap, PositivelyHomogeneous) {
  std::mt19937_64 rng(8);
  for (double p : {1.5, 3.0}) {
    const LpVector x = random_vector(rng, 4, p);
    for (double lambda : {0.25, 3.0, 17.0}) {
      const Eigen::VectorXd a = duality_map(lambda * x).coords();
      const Eigen::VectorXd b = lambda * duality_map(x).coords();
      EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-14 * lambda * b.cwiseAbs().maxCoeff());
    }
  }
}

TEST(DualityMap, NormToNormContinuity) {
  std::mt19937_64 rng(9);
  for (double p : {1.5, 3.0}) {
    const LpVector x = random_vector(rng, 3, p);
    const LpVector h = normalized(random_vector(rng, 3, p));
    std::vector<double> gaps;
    for (int k = 1; k <= 20; ++k) {
      const double s = std::ldexp(1.0, -k);
      gaps.push_back(dual_norm(DualVector(duality_map(x + s * h).coords() - duality_map(x).coords(), Exponent(p))));
    }
    for (std::size_t k = 3; k < gaps.size(); ++k) EXPECT_LT(gaps[k], gaps[k - 1]) << p << " step " << k;
    EXPECT_LT(gaps.back(), 1e-5);
  }
}

TEST(InverseDualityMap, Examples) {
  const LpVector e = inverse_duality_map(DualVector::with_q(Eigen::Vector3d(1, 0, 0), 1.5));
  EXPECT_EQ(e.coords(), Eigen::Vector3d(1, 0, 0));
  EXPECT_DOUBLE_EQ(e.p(), 3.0);
  EXPECT_TRUE(inverse_duality_map(DualVector::with_q(Eigen::Vector3d::Zero(), 1.5)).is_zero());
  const LpVector x = vec({2, -1, 0}, 3);
  const LpVector back = inverse_duality_map(duality_map(x));
  EXPECT_LE((back.coords() - x.coords()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(back.coords()[2], 0.0);
}

TEST(Psi, Examples) {
  EXPECT_EQ(psi_smoothness(vec({1, 0}, 2), vec({0, 1}, 2)), 0.0);
  for (double p : {1.5, 3.0}) {
    const LpVector x = normalized(vec({1, -2, 0.5}, p));
    EXPECT_NEAR(psi_smoothness(x, x), 1.0, 1e-15);
  }
  EXPECT_EQ(psi_smoothness(vec({1, 0, 0}, 3), vec({0, 1, 0}, 3)), 0.0);
}

TEST(Psi, RejectsOffSpherePoints) {
  EXPECT_THROW(psi_smoothness(vec({2, 0}, 2), vec({0, 1}, 2)), DomainError);
  EXPECT_THROW(psi_smoothness(vec({1, 0}, 2), vec({0, 3}, 2)), DomainError);
}

TEST(Psi, MatchesOneSidedNormQuotient) {
  // Oracle: (||x + tv|| - ||x||) / t in long double at small t.
  std::mt19937_64 rng(12);
  for (double p : {1.5, 2.0, 3.0, 4.0})
    for (int k = 0; k < 50; ++k) {
      const LpVector x = normalized(random_vector(rng, 3, p));
      const LpVector v = normalized(random_vector(rng, 3, p));
      const double t = 1e-7;
      const long double q = (oracle::norm(x.coords() + t * v.coords(), p) - oracle::norm(x.coords(), p)) / t;
      EXPECT_NEAR(psi_smoothness(x, v), static_cast<double>(q), 1e-5);
      EXPECT_LE(std::abs(psi_smoothness(x, v)), 1.0 + 1e-15);
    }
}

TEST(Xi, Examples) {
  const XiEstimate h = xi_smoothness(vec({1, 0}, 2), vec({0, 1}, 2));
  EXPECT_TRUE(h.converged);
  EXPECT_NEAR(h.value, 0.0, 1e-10);
  const LpVector x = normalized(vec({1, 2, -1}, 3));
  const XiEstimate self = xi_smoothness(x, x);
  EXPECT_TRUE(self.converged);
  EXPECT_NEAR(self.value, 1.0, 1e-6);
  const XiEstimate tangent = xi_smoothness(vec({1, 0, 0}, 3), vec({0, 1, 0}, 3));
  EXPECT_TRUE(tangent.converged);
  EXPECT_NEAR(tangent.value, 0.0, 1e-6);
}

TEST(Xi, CanBeNegative) {
  const LpVector x = vec({1, 0}, 2);
  const LpVector v = normalized(vec({-1, 1}, 2));
  const XiEstimate xi = xi_smoothness(x, v);
  ASSERT_TRUE(xi.converged);
  EXPECT_NEAR(xi.value, -1.0 / std::sqrt(2.0), 1e-6);
}

TEST(Xi, HilbertDegeneration) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 50; ++k) {
    const LpVector x = normalized(random_vector(rng, 4, 2.0));
    const LpVector v = normalized(random_vector(rng, 4, 2.0));
    const double inner = static_cast<double>(oracle::dot(x.coords(), v.coords()));
    EXPECT_NEAR(psi_smoothness(x, v), inner, 1e-10);
    const XiEstimate xi = xi_smoothness(x, v);
    ASSERT_TRUE(xi.converged);
    EXPECT_NEAR(xi.value, inner, 1e-10);
  }
}

TEST(Xi, SmoothnessIdentity) {
  std::mt19937_64 rng(14);
  for (double p : {1.5, 2.0, 3.0, 4.0})
    for (int k = 0; k < 100; ++k) {
      const LpVector x = normalized(random_vector(rng, 3, p));
      const LpVector v = normalized(random_vector(rng, 3, p));
      const XiEstimate xi = xi_smoothness(x, v);
      if (!xi.converged) continue;
      const double jxv = static_cast<double>(oracle::dot(oracle::duality(x.coords(), p), v.coords()));
      EXPECT_LE(std::abs(psi_smoothness(x, v) - 0.5 * (jxv + xi.value)), 1e-5);
    }
}

TEST(Xi, NonConvergenceIsReported) {
  // A two-step schedule cannot hold a window of three agreeing quotients.
  StepSchedule s;
  s.t_values = {0.5, 0.25};
  const XiEstimate xi = xi_smoothness(vec({1, 0}, 3), vec({0, 1}, 3), s);
  EXPECT_FALSE(xi.converged);
  EXPECT_EQ(xi.quotients.size(), 2u);
}
