#include "banachproj/convex_sets.hpp"
#include "banachproj/numdiff.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace banachproj;

namespace {

LpVector vec(std::initializer_list<double> c, double p) { return LpVector(c, p); }

Projector unit_ball(std::size_t n, double p) {
  return [n, p](const LpVector& z) { return project_ball(LpVector::zero(n, Exponent(p)), 1.0, z); };
}

std::vector<LpVector> random_units(std::size_t count, std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  std::vector<LpVector> out;
  while (out.size() < count) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (auto& c : v) c = N(rng);
    out.push_back(normalized(LpVector(v, Exponent(p))));
  }
  return out;
}

}  // namespace

TEST(StepSchedule, DyadicDefault) {
  const StepSchedule s = StepSchedule::dyadic();
  ASSERT_EQ(s.t_values.size(), 23u);
  EXPECT_EQ(s.t_values.front(), std::ldexp(1.0, -8));
  EXPECT_EQ(s.t_values.back(), std::ldexp(1.0, -30));
  EXPECT_EQ(s.quotient_tol, 1e-7);
  EXPECT_EQ(s.window, 3);
  EXPECT_NO_THROW(s.validate());
}

TEST(StepSchedule, ValidationRejectsBadSchedules) {
  StepSchedule s;
  EXPECT_THROW(s.validate(), DomainError);
  s.t_values = {0.5, 0.5};
  EXPECT_THROW(s.validate(), DomainError);
  s.t_values = {0.5, -0.25};
  EXPECT_THROW(s.validate(), DomainError);
  s.t_values = {0.5, 0.25};
  s.window = 1;
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(StepSchedule, TruncationKeepsFirstStep) {
  const StepSchedule s = StepSchedule::dyadic(4, 20);
  const StepSchedule cut = s.truncated(1e-3);
  EXPECT_EQ(cut.t_values.back(), std::ldexp(1.0, -9));
  EXPECT_EQ(s.truncated(10.0).t_values.size(), 1u);
}

TEST(DiffQuotient, BallExample) {
  const LpVector x = vec({2, 0}, 2), v = vec({0, 1}, 2);
  const double t = 0.01;
  const LpVector q = diff_quotient(unit_ball(2, 2.0), x, v, t);
  const Eigen::Vector2d c = Eigen::Vector2d::Zero();
  const Eigen::VectorXd ref = (oracle::ball_projection(c, 1.0, x.coords() + t * v.coords(), 2.0) -
                               oracle::ball_projection(c, 1.0, x.coords(), 2.0)) / t;
  EXPECT_NEAR(q[0], ref[0], 1e-12);
  EXPECT_NEAR(q[1], ref[1], 1e-12);
  // P(x + tv)_1 = 2 / sqrt(4 + t^2), so the first quotient is about -t/8.
  EXPECT_NEAR(q[0], -t / 8, 1e-6);
  EXPECT_NEAR(q[1], 0.5, 1e-4);
  EXPECT_LT(q[1], 0.5);
}

TEST(DiffQuotient, InteriorIsExactlyV) {
  const LpVector x = vec({0.25, 0.5}, 3), v = vec({1, -1}, 3);
  EXPECT_EQ(diff_quotient(unit_ball(2, 3.0), x, v, 1.0 / 64).coords(), v.coords());
}

TEST(DiffQuotient, SingletonIsTheta) {
  const LpVector y = vec({1, 2, 3}, 3);
  const Projector constant = [&](const LpVector&) { return y; };
  EXPECT_TRUE(diff_quotient(constant, vec({5, 5, 5}, 3), vec({1, 0, 0}, 3), 0.1).is_zero());
}

TEST(DiffQuotient, RejectsBadArguments) {
  EXPECT_THROW(diff_quotient(unit_ball(2, 2.0), vec({2, 0}, 2), vec({0, 0}, 2), 0.1), DomainError);
  EXPECT_THROW(diff_quotient(unit_ball(2, 2.0), vec({2, 0}, 2), vec({0, 1}, 2), 0.0), DomainError);
}

TEST(NumDiff, BallExample) {
  const NumDiffResult r = numdiff_derivative(unit_ball(2, 2.0), vec({2, 0}, 2), vec({0, 1}, 2));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.estimate[0], 0.0, 1e-6);
  EXPECT_NEAR(r.estimate[1], 0.5, 1e-6);
  EXPECT_EQ(r.t_values.size(), r.quotients.size());
}

TEST(NumDiff, ConeExample) {
  const NumDiffResult r = numdiff_derivative(project_positive_cone, vec({2, 3, 0}, 3), vec({1, -1, -5}, 3));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.estimate[0], 1.0, 1e-6);
  EXPECT_NEAR(r.estimate[1], -1.0, 1e-6);
  EXPECT_NEAR(r.estimate[2], 0.0, 1e-6);
}

TEST(NumDiff, InteriorConvergesAtFirstWindow) {
  const LpVector x = vec({0.25, 0.5}, 3), v = vec({1, -1}, 3);
  const NumDiffResult r = numdiff_derivative(unit_ball(2, 3.0), x, v);
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.quotients.size(), 3u);
  EXPECT_EQ(r.estimate.coords(), v.coords());
}

TEST(NumDiff, OscillatingQuotientDoesNotConverge) {
  // P(tv) = t sin(10 log t) v has no one-sided derivative at 0.
  const Projector wobble = [](const LpVector& z) {
    const double t = lp_norm(z);
    return t == 0.0 ? z : std::sin(10.0 * std::log(t)) * z;
  };
  const NumDiffResult r = numdiff_derivative(wobble, LpVector::zero(2, Exponent(2.0)), vec({1, 0}, 2));
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.quotients.size(), 23u);
}

TEST(NumDiff, ProjectorToleranceTruncatesSchedule) {
  const NumDiffResult r = numdiff_derivative(unit_ball(2, 2.0), vec({2, 0}, 2), vec({0, 1}, 2),
                                             StepSchedule::dyadic(), 1e-10);
  for (double t : r.t_values) EXPECT_GE(t, 1e-5);
}

TEST(OneSidedLimit, RichardsonRemovesLinearError) {
  const auto q = [](double t) {
    Eigen::VectorXd v(1);
    v[0] = 1.0 + 3.0 * t;
    return v;
  };
  const auto abs_norm = [](const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); };
  const LimitEstimate est = one_sided_limit(q, StepSchedule::dyadic(), abs_norm);
  ASSERT_TRUE(est.converged);
  EXPECT_TRUE(est.extrapolated);
  EXPECT_NEAR(est.value[0], 1.0, 1e-14);
}

TEST(RateProbe, InteriorGivesZeroDeviations) {
  const auto dirs = random_units(8, 3, 3.0, 1);
  const RateReport rep =
      cauchy_rate_probe(unit_ball(3, 3.0), vec({0.125, 0.25, -0.125}, 3), dirs, StepSchedule::dyadic(4, 20));
  // Only rounding remains: 64 eps (1 + 2 |x|) / s.
  const double nx = lp_norm(vec({0.125, 0.25, -0.125}, 3));
  const auto floor = [&](double s) { return 64 * std::numeric_limits<double>::epsilon() * (1 + 2 * nx) / s; };
  for (const auto& pr : rep.pairs) EXPECT_LE(pr.deviation, floor(pr.s));
  EXPECT_LE(rep.uniform_sup, floor(rep.pairs.back().s));
}

TEST(RateProbe, SmoothBallCaseHasFirstOrder) {
  const auto dirs = random_units(8, 3, 2.0, 2);
  const RateReport rep = cauchy_rate_probe(unit_ball(3, 2.0), vec({2, -1, 0.5}, 2), dirs, StepSchedule::dyadic(4, 20));
  EXPECT_NEAR(rep.fitted_order, 1.0, 0.1);
  EXPECT_LT(rep.uniform_sup, 1e-5);
  EXPECT_TRUE(tail_non_increasing(rep, 6));
  for (const auto& pr : rep.pairs) EXPECT_GE(pr.deviation, 0.0);
}

TEST(RateProbe, ConeFaceQuotientsBecomeConstant) {
  std::vector<LpVector> dirs{normalized(vec({1, -1, -1}, 3)), normalized(vec({-2, 1, -1}, 3))};
  const RateReport rep =
      cauchy_rate_probe(project_positive_cone, vec({1, 0, 0.3}, 3), dirs, StepSchedule::dyadic(0, 20));
  EXPECT_GT(rep.uniform_sup_trace.front(), 0.0);
  // Past the kink the quotients are constant up to rounding.
  for (std::size_t k = 4; k < rep.uniform_sup_trace.size(); ++k) EXPECT_LE(rep.uniform_sup_trace[k], rep.noise_floor[k]);
  EXPECT_LE(rep.uniform_sup, rep.noise_floor.back());
}

TEST(RateProbe, ThreadCountDoesNotChangeReport) {
  const auto dirs = random_units(9, 3, 3.0, 3);
  const LpVector x = vec({2, -1, 0.5}, 3);
  const RateReport a = cauchy_rate_probe(unit_ball(3, 3.0), x, dirs, StepSchedule::dyadic(4, 20), 1);
  const RateReport b = cauchy_rate_probe(unit_ball(3, 3.0), x, dirs, StepSchedule::dyadic(4, 20), 4);
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) EXPECT_EQ(a.pairs[i].deviation, b.pairs[i].deviation);
  EXPECT_EQ(a.fitted_order, b.fitted_order);
}

TEST(RateProbe, RejectsBadInput) {
  const LpVector x = vec({2, 0}, 2);
  EXPECT_THROW(cauchy_rate_probe(unit_ball(2, 2.0), x, {}, StepSchedule::dyadic(4, 20)), DomainError);
  EXPECT_THROW(cauchy_rate_probe(unit_ball(2, 2.0), x, {vec({2, 0}, 2)}, StepSchedule::dyadic(4, 20)), DomainError);
  EXPECT_THROW(cauchy_rate_probe(unit_ball(2, 2.0), x, {vec({1, 0}, 2)}, StepSchedule::dyadic(4, 6)), DomainError);
}

TEST(RateProbe, TailMonotonicityDetectsGrowth) {
  RateReport rep;
  rep.uniform_sup_trace = {1.0, 0.5, 0.25, 0.6};
  rep.noise_floor = {0, 0, 0, 0};
  EXPECT_FALSE(tail_non_increasing(rep, 3));
  rep.uniform_sup_trace = {1.0, 0.5, 0.25, 0.27};
  EXPECT_TRUE(tail_non_increasing(rep, 3));
}
