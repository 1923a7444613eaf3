#include "banachproj/verify.hpp"

#include "banachproj/convex_sets.hpp"
#include "banachproj/derivatives.hpp"
#include "banachproj/format.hpp"
#include "banachproj/numdiff.hpp"
#include "banachproj/projection_solver.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace banachproj {

namespace {

class Sampler {
 public:
  Sampler(std::uint64_t seed, double p, std::size_t n) : rng_(seed), p_(p), n_(n) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int pick(int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng_); }

  LpVector gaussian() {
    std::normal_distribution<double> N;
    Eigen::VectorXd v(static_cast<Eigen::Index>(n_));
    for (auto& c : v) c = N(rng_);
    return LpVector(std::move(v), Exponent(p_));
  }

  LpVector nonzero_gaussian() {
    for (;;) {
      LpVector v = gaussian();
      if (!v.is_zero()) return v;
    }
  }

  LpVector unit() { return normalized(nonzero_gaussian()); }

  /// Coordinates drawn from {-1, 0, 1} times a magnitude in [0.5, 2].
  LpVector sign_pattern() {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n_));
    for (auto& c : v) c = (pick(3) - 1) * uniform(0.5, 2.0);
    return LpVector(std::move(v), Exponent(p_));
  }

 private:
  std::mt19937_64 rng_;
  double p_;
  std::size_t n_;
};

struct Tally {
  SuiteReport& rep;

  void check(bool ok, const std::string& what) {
    if (ok) {
      ++rep.passed;
      return;
    }
    ++rep.failed;
    if (rep.failures.size() < 20) rep.failures.push_back(what);
  }
};

double rel_gap(const LpVector& a, const LpVector& b) { return lp_norm(a - b) / std::max(1.0, lp_norm(a)); }

void duality_suite(SuiteReport& rep, Sampler& s, std::size_t count) {
  Tally tally{rep};
  for (std::size_t i = 0; i < count; ++i) {
    const LpVector x = std::exp(s.uniform(-3.0, 3.0)) * s.gaussian();
    const double nx = lp_norm(x);
    const DualVector jx = duality_map(x);
    const bool pairing_ok = std::abs(pairing(jx, x) - nx * nx) <= 1e-12 * std::max(1.0, nx * nx);
    const bool norm_ok = std::abs(dual_norm(jx) - nx) <= 1e-12 * std::max(1.0, nx);
    const bool inverse_ok = lp_norm(inverse_duality_map(jx) - x) <= 1e-10 * std::max(1.0, nx);
    tally.check(pairing_ok && norm_ok && inverse_ok, "duality identities fail at |x| = " + format_double(nx));
  }
}

void ball_suite(SuiteReport& rep, Sampler& s, std::size_t count) {
  Tally tally{rep};
  for (std::size_t i = 0; i < count; ++i) {
    const LpVector c = s.gaussian();
    const double r = std::exp(s.uniform(-1.0, 1.0));
    const LpVector dir = s.unit();
    double scale = 1.0;
    if (i % 3 == 0) scale = s.uniform(0.05, 0.9);
    if (i % 3 == 1) scale = s.uniform(1.1, 3.0);
    const LpVector x = c + (r * scale) * dir;
    const LpVector v = s.nonzero_gaussian();
    const auto analytic = derivative_ball(c, r, x, v);
    const auto oracle =
        numdiff_derivative([&](const LpVector& z) { return project_ball(c, r, z); }, x, v);
    if (!oracle.converged) {
      ++rep.excluded;
      continue;
    }
    tally.check(rel_gap(analytic.value, oracle.estimate) <= 1e-4,
                analytic.case_label + " disagrees with the finite-difference oracle");
  }
}

void cone_suite(SuiteReport& rep, Sampler& s, std::size_t count) {
  Tally tally{rep};
  for (std::size_t i = 0; i < count; ++i) {
    const LpVector x = s.sign_pattern();
    LpVector v = s.sign_pattern();
    while (v.is_zero()) v = s.sign_pattern();
    const auto analytic = derivative_positive_cone(x, v);
    const auto oracle = numdiff_derivative(project_positive_cone, x, v);
    if (!oracle.converged) {
      ++rep.excluded;
      continue;
    }
    tally.check(lp_norm(analytic.value - oracle.estimate) <= 1e-6,
                analytic.case_label + " disagrees with the finite-difference oracle");
  }
}

std::vector<bool> random_mask(Sampler& s, std::size_t n) {
  for (;;) {
    std::vector<bool> mask(n);
    std::size_t free = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mask[i] = s.pick(2) == 1;
      free += mask[i];
    }
    if (free > 0 && free < n) return mask;
  }
}

void subspace_suite(SuiteReport& rep, Sampler& s, std::size_t n, std::size_t count) {
  if (n < 2) throw DomainError("the subspace suite needs n >= 2");
  Tally tally{rep};
  for (std::size_t i = 0; i < count; ++i) {
    const auto mask = random_mask(s, n);
    std::vector<bool> masked(n);
    for (std::size_t k = 0; k < n; ++k) masked[k] = !mask[k];
    const LpVector y = project_coordinate_subspace(mask, s.gaussian());
    LpVector perp = project_coordinate_subspace(masked, s.gaussian());
    while (perp.is_zero()) perp = project_coordinate_subspace(masked, s.gaussian());
    LpVector tangent = project_coordinate_subspace(mask, s.gaussian());
    while (tangent.is_zero()) tangent = project_coordinate_subspace(mask, s.gaussian());

    const auto d_perp = derivative_subspace(mask, y, perp);
    const auto oracle = numdiff_derivative([&](const LpVector& z) { return project_coordinate_subspace(mask, z); },
                                           y, perp);
    if (!oracle.converged) {
      ++rep.excluded;
    } else {
      tally.check(lp_norm(d_perp.value) == 0.0 && lp_norm(oracle.estimate) <= 1e-6,
                  "orthogonal-cone direction does not give theta");
    }
    const auto d_tan = derivative_subspace(mask, y, tangent);
    tally.check(d_tan.value.coords() == tangent.coords(), "tangential direction does not give v exactly");
  }
}

void properties_suite(SuiteReport& rep, Sampler& s, std::size_t count) {
  Tally tally{rep};
  for (std::size_t i = 0; i < count; ++i) {
    const LpVector c = s.gaussian();
    const double r = std::exp(s.uniform(-1.0, 1.0));
    const LpVector outside = c + (r * s.uniform(1.1, 3.0)) * s.unit();
    const LpVector inside = c + (r * s.uniform(0.0, 0.9)) * s.unit();
    const LpVector v = s.nonzero_gaussian();
    const auto ball = [&](const LpVector& z) { return project_ball(c, r, z); };

    // Positive homogeneity in the direction.
    const LpVector base = derivative_ball(c, r, outside, v).value;
    for (double lambda : {0.5, 2.0, 10.0}) {
      const LpVector scaled = derivative_ball(c, r, outside, lambda * v).value;
      tally.check(lp_norm(scaled - lambda * base) <= 1e-12 * std::max(1.0, lambda * lp_norm(base)),
                  "homogeneity fails for lambda = " + format_double(lambda));
    }
    const LpVector cone_x = s.sign_pattern();
    const LpVector cone_v = s.nonzero_gaussian();
    const LpVector cone_d = derivative_positive_cone(cone_x, cone_v).value;
    for (double lambda : {0.5, 2.0, 10.0})
      tally.check(derivative_positive_cone(cone_x, lambda * cone_v).value.coords() == (lambda * cone_d).coords(),
                  "cone homogeneity fails for lambda = " + format_double(lambda));

    // Retraction directions x - P x and P x - x.
    const LpVector px = ball(outside);
    for (const LpVector& dir : {outside - px, px - outside}) {
      const auto analytic = derivative_ball(c, r, outside, dir);
      const auto oracle = numdiff_derivative(ball, outside, dir);
      tally.check(lp_norm(analytic.value) <= 1e-6, "retraction direction: analytic derivative is not theta");
      if (oracle.converged) tally.check(lp_norm(oracle.estimate) <= 1e-6, "retraction direction: oracle is not theta");
      else ++rep.excluded;
    }

    // Interior of C and the singleton law.
    const ConvexSet bset = ConvexSet::ball(c, r);
    tally.check(derivative_interior_inverse_image(bset, inside, v).value.coords() == v.coords(),
                "interior point does not give v");
    const ConvexSet single = ConvexSet::singleton(c);
    tally.check(derivative(single, outside, v).value.is_zero(), "singleton derivative is not theta");
    tally.check(diff_quotient([&](const LpVector& z) { return project(single, z); }, outside, v, 1e-3).is_zero(),
                "singleton quotient is not theta");
  }
}

void hilbert_suite(SuiteReport& rep, Sampler& s, std::size_t count) {
  Tally tally{rep};
  auto inner = [](const LpVector& a, const LpVector& b) { return a.coords().dot(b.coords()); };
  for (std::size_t i = 0; i < count; ++i) {
    const bool unit_ball = i % 2 == 0;
    const LpVector c = unit_ball ? LpVector::zero(s.gaussian().dim(), Exponent(2.0)) : s.gaussian();
    const double r = unit_ball ? 1.0 : std::exp(s.uniform(-1.0, 1.0));
    const LpVector v = s.nonzero_gaussian();

    const LpVector x = c + (r * s.uniform(1.1, 3.0)) * s.unit();
    const LpVector d = x - c;
    const double nd = lp_norm(d);
    const LpVector outside = (r / (nd * nd * nd)) * (nd * nd * v - inner(d, v) * d);
    tally.check(lp_norm(derivative_ball(c, r, x, v).value - outside) <= 1e-10 * std::max(1.0, lp_norm(outside)),
                "exterior clause differs from the inner-product form");

    const LpVector y = c + r * s.unit();
    const LpVector e = y - c;
    const auto cls = classify_direction(c, r, y, v);
    const LpVector expected = cls.tag == BoundaryTag::Up ? v - (inner(e, v) / (r * r)) * e : v;
    tally.check(lp_norm(derivative_ball(c, r, y, v).value - expected) <= 1e-10 * std::max(1.0, lp_norm(expected)),
                "sphere clause differs from the inner-product form");
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"duality", "ball", "cone", "subspace", "properties4", "hilbert"};
  return names;
}

SuiteReport run_suite(const std::string& suite, double p, std::size_t n, std::uint64_t seed, std::size_t count) {
  const Exponent e(p);
  if (n == 0) throw DomainError("suite dimension must be positive");
  SuiteReport rep;
  rep.suite = suite;
  rep.p = e.value();
  rep.n = n;
  Sampler s(seed, p, n);
  if (suite == "duality") duality_suite(rep, s, count);
  else if (suite == "ball") ball_suite(rep, s, count);
  else if (suite == "cone") cone_suite(rep, s, count);
  else if (suite == "subspace") subspace_suite(rep, s, n, count);
  else if (suite == "properties4") properties_suite(rep, s, count);
  else if (suite == "hilbert") {
    if (p != 2.0) throw DomainError("the hilbert suite requires p = 2");
    hilbert_suite(rep, s, count);
  } else {
    throw DomainError("unknown verify suite \"" + suite + "\"");
  }
  return rep;
}

}  // namespace banachproj
