#include "banachproj/convex_sets.hpp"
#include "banachproj/moduli.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace banachproj;

namespace {

ModuliOptions opts(std::size_t budget, std::uint64_t seed = 1, unsigned threads = 1) {
  ModuliOptions o;
  o.budget = budget;
  o.seed = seed;
  o.threads = threads;
  return o;
}

const ModuliEstimate& hilbert_estimate() {
  static const ModuliEstimate est =
      estimate_moduli(2.0, 2, default_moduli_grid(), default_moduli_grid(), opts(10000));
  return est;
}

}  // namespace

TEST(Grid, DefaultIsGeometric) {
  const auto g = default_moduli_grid();
  ASSERT_EQ(g.size(), 24u);
  EXPECT_NEAR(g.front(), 0.01, 1e-15);
  EXPECT_NEAR(g.back(), 2.0, 1e-14);
  for (std::size_t i = 2; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
}

TEST(Delta, HilbertValueAtOne) {
  const auto est = estimate_delta(2.0, 2, {1.0}, opts(20000));
  ASSERT_EQ(est.delta_values.size(), 1u);
  const double exact = oracle::hilbert_delta(1.0);
  EXPECT_NEAR(exact, 0.133975, 1e-6);
  EXPECT_GE(est.delta_values[0], exact - 1e-12);
  EXPECT_LE(est.delta_values[0], exact + 1e-4);
}

TEST(Delta, VanishesAtSmallEpsilon) {
  const auto est = estimate_delta(3.0, 2, {1e-3}, opts(5000));
  EXPECT_LE(est.delta_values[0], 1e-5);
  EXPECT_GE(est.delta_values[0], 0.0);
}

TEST(Delta, HilbertMajorizesOtherExponents) {
  for (double p : {1.5, 3.0, 4.0}) {
    const auto est = estimate_delta(p, 2, {0.25, 0.5, 1.0, 1.5}, opts(10000));
    for (std::size_t i = 0; i < est.epsilons.size(); ++i)
      EXPECT_LE(est.delta_values[i], oracle::hilbert_delta(est.epsilons[i]) + 2e-9) << p << " eps " << est.epsilons[i];
  }
  const auto at_one = estimate_delta(3.0, 2, {1.0}, opts(10000));
  EXPECT_LE(at_one.delta_values[0], 0.133975);
}

TEST(Delta, RejectsBadGrid) {
  EXPECT_THROW(estimate_delta(2.0, 2, {}, opts(100)), DomainError);
  EXPECT_THROW(estimate_delta(2.0, 2, {2.5}, opts(100)), DomainError);
  EXPECT_THROW(estimate_delta(2.0, 2, {0.0}, opts(100)), DomainError);
}

TEST(Rho, HilbertValueAtOne) {
  const auto est = estimate_rho(2.0, 2, {1.0}, opts(20000));
  const double exact = oracle::hilbert_rho(1.0);
  EXPECT_NEAR(exact, 0.414214, 1e-6);
  EXPECT_LE(est.rho_values[0], exact + 1e-12);
  EXPECT_GE(est.rho_values[0], exact - 1e-4);
}

TEST(Rho, SmallArgumentAndUpperBound) {
  for (double p : {1.5, 3.0, 4.0}) {
    const auto est = estimate_rho(p, 2, {1e-3, 1.0}, opts(5000));
    EXPECT_LE(est.rho_values[0], 1e-3);
    EXPECT_GE(est.rho_values[0], 0.0);
    EXPECT_LE(est.rho_values[1], 1.0);
  }
  EXPECT_THROW(estimate_rho(2.0, 2, {}, opts(100)), DomainError);
  EXPECT_THROW(estimate_rho(2.0, 2, {-1.0}, opts(100)), DomainError);
}

TEST(Fit, ExactHilbertCurvesGiveExponentTwo) {
  std::vector<double> args, d, r;
  for (double a : default_moduli_grid()) {
    args.push_back(a);
    d.push_back(oracle::hilbert_delta(a));
    r.push_back(oracle::hilbert_rho(a));
  }
  EXPECT_NEAR(fit_power_law(args, d, 0.02, 0.2).exponent, 2.0, 0.01);
  EXPECT_NEAR(fit_power_law(args, d, 0.02, 0.2).constant, 0.125, 0.01);
  EXPECT_NEAR(fit_power_law(args, r, 0.02, 0.2).exponent, 2.0, 0.01);
  EXPECT_NEAR(fit_power_law(args, r, 0.02, 0.2).constant, 0.5, 0.02);
}

TEST(Fit, RejectsDegenerateTails) {
  EXPECT_THROW(fit_power_law({0.05, 0.1, 0.15}, {1, 2, 3}, 0.02, 0.2), DomainError);
  EXPECT_THROW(fit_power_law({0.03, 0.05, 0.1, 0.15}, {1, 0, 2, 3}, 0.02, 0.2), DomainError);
}

TEST(Fit, SampledHilbertSpace) {
  const auto& est = hilbert_estimate();
  EXPECT_NEAR(est.convexity.exponent, 2.0, 0.1);
  EXPECT_NEAR(est.smoothness.exponent, 2.0, 0.1);
  EXPECT_LT(est.convexity.rms, 0.05);
  EXPECT_LT(est.smoothness.rms, 0.05);
}

TEST(Estimates, MonotoneAndBounded) {
  for (double p : {1.5, 3.0}) {
    const auto est = estimate_moduli(p, 2, default_moduli_grid(), default_moduli_grid(), opts(4000));
    for (std::size_t i = 0; i < est.epsilons.size(); ++i) {
      EXPECT_GE(est.delta_values[i], 0.0);
      EXPECT_LE(est.delta_values[i], 1.0);
      if (i > 0) {
        EXPECT_GE(est.delta_values[i], est.delta_values[i - 1]);
        EXPECT_GE(est.delta_values[i] / est.epsilons[i], est.delta_values[i - 1] / est.epsilons[i - 1]);
      }
    }
    for (std::size_t i = 0; i < est.ts.size(); ++i) {
      EXPECT_LE(est.rho_values[i], est.ts[i]);
      EXPECT_GE(est.rho_values[i], 0.0);
    }
    // rho(t)/t decreases toward zero at the small end of the grid.
    EXPECT_LT(est.rho_values[0] / est.ts[0], est.rho_values[10] / est.ts[10]);
  }
}

TEST(Estimates, ThreadCountDoesNotChangeResults) {
  const auto grid = default_moduli_grid();
  const auto a = estimate_moduli(3.0, 2, grid, grid, opts(2000, 7, 1));
  const auto b = estimate_moduli(3.0, 2, grid, grid, opts(2000, 7, 3));
  EXPECT_EQ(a.delta_values, b.delta_values);
  EXPECT_EQ(a.rho_values, b.rho_values);
  const auto c = estimate_moduli(3.0, 2, grid, grid, opts(2000, 8, 1));
  EXPECT_NE(a.delta_values, c.delta_values);
}

TEST(Envelopes, ConservativeDirections) {
  const auto& est = hilbert_estimate();
  for (std::size_t i = 0; i < est.epsilons.size(); ++i)
    EXPECT_LE(delta_lower_envelope(est, est.epsilons[i]), est.delta_values[i]);
  for (std::size_t i = 0; i < est.ts.size(); ++i) {
    EXPECT_GE(rho_upper_envelope(est, est.ts[i]), est.rho_values[i]);
    EXPECT_LE(rho_upper_envelope(est, est.ts[i]), est.ts[i]);
  }
  double prev = 0.0;
  for (double s : {1e-6, 1e-4, 1e-3, 1e-2, 0.05}) {
    const double e = delta_inverse_conservative(est, s);
    EXPECT_GE(e, prev);
    EXPECT_LE(delta_lower_envelope(est, e), s * (1 + 1e-9));
    prev = e;
  }
  EXPECT_THROW(delta_inverse_conservative(est, 0.95), DomainError);
}

TEST(Alber, TrivialCases) {
  const auto& est = hilbert_estimate();
  const auto ball = ConvexSet::ball(LpVector({0, 0}, 2.0), 1.0);
  const LpVector x({2, 0}, 2.0), y({2.1, 0}, 2.0);
  const AlberReport same = alber_bound_check(ball, {{x, x}}, est);
  EXPECT_EQ(same.checks[0].lhs, 0.0);
  EXPECT_FALSE(same.checks[0].violated);
  const AlberReport col = alber_bound_check(ball, {{x, y}}, est);
  EXPECT_EQ(col.checks[0].lhs, 0.0);
  EXPECT_FALSE(col.checks[0].violated);
  EXPECT_EQ(col.violations, 0u);
  EXPECT_GE(col.checks[0].k, 2.0);
}

TEST(Alber, ConeNearbyPairsHold) {
  const auto est = estimate_moduli(3.0, 2, default_moduli_grid(), default_moduli_grid(), opts(10000));
  const auto cone = ConvexSet::positive_cone(2, Exponent(3));
  std::mt19937_64 rng(51);
  std::normal_distribution<double> N;
  std::vector<std::pair<LpVector, LpVector>> pairs;
  for (int k = 0; k < 200; ++k) {
    const LpVector x({N(rng), N(rng)}, 3.0);
    const LpVector y = x + 0.05 * LpVector({N(rng), N(rng)}, 3.0);
    pairs.emplace_back(x, y);
  }
  const AlberReport rep = alber_bound_check(cone, pairs, est);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_EQ(rep.anomaly_rate, 0.0);
  // Independent evaluation of the constant k.
  const auto& c0 = rep.checks[0];
  const auto& [x0, y0] = pairs[0];
  const LpVector px = project_positive_cone(x0), py = project_positive_cone(y0);
  const double k = 2.0 * std::max({1.0, static_cast<double>(oracle::dist(x0.coords(), py.coords(), 3.0)),
                                   static_cast<double>(oracle::dist(px.coords(), y0.coords(), 3.0))});
  EXPECT_NEAR(c0.k, k, 1e-12);
  EXPECT_NEAR(c0.lhs, static_cast<double>(oracle::dist(px.coords(), py.coords(), 3.0)), 1e-12);
}

TEST(Csv, HeaderAndRowCount) {
  const auto& est = hilbert_estimate();
  const std::string csv = moduli_csv(est);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "kind,argument,value");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), 1 + est.epsilons.size() + est.ts.size());
}
