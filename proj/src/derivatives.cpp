#include "banachproj/derivatives.hpp"

#include "banachproj/numdiff.hpp"
#include "banachproj/projection_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace banachproj {

namespace {

void require_nonzero(const LpVector& v) {
  if (v.is_zero()) throw DomainError("direction v must be nonzero");
}

double sphere_tol(double r) { return kSphereTol * std::max(1.0, r); }

// Growth rate of t -> ||d + tv|| at 0+, i.e. psi(d/||d||, v/||v||) ||v||.
double radial_growth(const LpVector& d, const LpVector& v) {
  return psi_smoothness(normalized(d), normalized(v)) * lp_norm(v);
}

const char* cone_clause(int pos, int zero, int neg) {
  static constexpr std::array<std::array<int, 3>, 9> kPatterns{{
      {3, 0, 0}, {2, 1, 0}, {1, 2, 0}, {0, 3, 0}, {2, 0, 1}, {1, 1, 1}, {0, 2, 1}, {0, 1, 2}, {0, 0, 3},
  }};
  static constexpr std::array<const char*, 9> kLabels{
      "Prop6.4(i)", "Prop6.4(ii)", "Prop6.4(iii)", "Prop6.4(iv)", "Prop6.4(v)",
      "Prop6.4(vi)", "Prop6.4(vii)", "Prop6.4(viii)", "Prop6.4(ix)",
  };
  for (std::size_t k = 0; k < kPatterns.size(); ++k)
    if (kPatterns[k] == std::array<int, 3>{pos, zero, neg}) return kLabels[k];
  return nullptr;
}

}  // namespace

BoundaryClass classify_direction(const LpVector& c, double r, const LpVector& x, const LpVector& v) {
  require_same_space(c, x);
  require_same_space(c, v);
  require_nonzero(v);
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  const LpVector d = x - c;
  if (std::abs(lp_norm(d) - r) > sphere_tol(r)) throw DomainError("x must lie on the sphere S(c, r)");

  const double g = psi_smoothness(normalized(d), normalized(v));
  if (g > kTieTol) return {BoundaryTag::Up, g};
  if (g < -kTieTol) return {BoundaryTag::Down, g};

  // Tangent to first order: t -> ||x + tv - c|| is convex, so the sign of the
  // gap is eventually constant. The smallest t with a nonzero gap decides.
  BoundaryTag tag = BoundaryTag::Up;
  for (int k = 10; k <= 24; ++k) {
    const double t = std::ldexp(1.0, -k);
    const double gap = lp_norm(d + t * v) - r;
    if (gap > 0.0) tag = BoundaryTag::Up;
    else if (gap < 0.0) tag = BoundaryTag::Down;
  }
  return {tag, g};
}

DerivativeResult derivative_ball(const LpVector& c, double r, const LpVector& x, const LpVector& v) {
  require_same_space(c, x);
  require_same_space(c, v);
  require_nonzero(v);
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  const LpVector d = x - c;
  const double nd = lp_norm(d);

  if (nd < r - sphere_tol(r)) return {v, "Thm5.2(i)"};
  if (nd > r + sphere_tol(r)) {
    const double growth = radial_growth(d, v);
    return {(r / (nd * nd)) * (nd * v - growth * d), "Thm5.2(ii)"};
  }
  if (classify_direction(c, r, x, v).tag == BoundaryTag::Down) return {v, "Thm5.2(iii)(b)"};
  return {v - (radial_growth(d, v) / r) * d, "Thm5.2(iii)(a)"};
}

DerivativeResult derivative_positive_cone(const LpVector& x, const LpVector& v) {
  require_same_space(x, v);
  require_nonzero(v);
  const std::size_t n = x.dim();
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  int pos = 0, zero = 0, neg = 0, zero_down = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (x[i] > 0.0) {
      ++pos;
      out[k] = v[i];
    } else if (x[i] < 0.0) {
      ++neg;
      out[k] = 0.0;
    } else {
      ++zero;
      if (v[i] < 0.0) ++zero_down;
      out[k] = std::max(v[i], 0.0);
    }
  }
  LpVector value(std::move(out), x.exponent());
  const char* clause = n == 3 ? cone_clause(pos, zero, neg) : nullptr;
  if (!clause) return {std::move(value), "coordinatewise"};
  return {std::move(value), clause, 1 + zero_down};
}

DerivativeResult derivative_subspace(const std::vector<bool>& free_mask, const LpVector& y, const LpVector& v) {
  require_same_space(y, v);
  require_nonzero(v);
  const ConvexSet c = ConvexSet::coordinate_subspace(free_mask, y.exponent());
  if (!contains(c, y)) throw DomainError("y must lie in the subspace");

  const double nv = lp_norm(v);
  if (orthogonal_cone_residual(free_mask, v) <= 1e-12 * nv) return {LpVector::zero(v.dim(), v.exponent()), "Thm6.1"};
  const LpVector truncated = project_coordinate_subspace(free_mask, v);
  if (lp_norm(v - truncated) <= 1e-12 * nv) return {v, "Lemma4.3"};

  const auto oracle = numdiff_derivative([&](const LpVector& z) { return project_coordinate_subspace(free_mask, z); },
                                         y, v);
  if (oracle.converged && lp_norm(oracle.estimate - truncated) <= 1e-6 * std::max(1.0, lp_norm(truncated)))
    return {truncated, "coordinatewise"};
  if (!oracle.converged) throw NonConvergence("finite-difference oracle did not converge for a mixed direction");
  return {oracle.estimate, "numeric"};
}

DerivativeResult derivative_interior_inverse_image(const ConvexSet& c, const LpVector& x, const LpVector& v) {
  require_in_space(c, x);
  require_in_space(c, v);
  require_nonzero(v);
  const LpVector zero = LpVector::zero(x.dim(), x.exponent());

  if (c.as<Singleton>()) return {zero, "Lemma4.4"};
  if (const auto* b = c.as<Ball>()) {
    if (lp_norm(x - b->center) < b->radius - sphere_tol(b->radius)) return {v, "Prop4.8"};
  } else if (c.as<PositiveCone>()) {
    if ((x.coords().array() > 0.0).all()) return {v, "Prop4.8"};
    if ((x.coords().array() < 0.0).all()) return {zero, "Prop4.7"};
  } else if (const auto* h = c.as<PolytopeH>()) {
    bool strict = true;
    for (const auto& row : h->rows) strict = strict && row.normal.dot(x.coords()) < row.offset;
    if (strict) return {v, "Prop4.8"};
  }
  throw DomainError("x is neither interior to C nor interior to an inverse image for this descriptor");
}

DerivativeResult derivative(const ConvexSet& c, const LpVector& x, const LpVector& v) {
  require_in_space(c, x);
  require_in_space(c, v);
  require_nonzero(v);
  if (const auto* b = c.as<Ball>()) return derivative_ball(b->center, b->radius, x, v);
  if (c.as<PositiveCone>()) return derivative_positive_cone(x, v);
  // The subspace projection is linear, so the derivative at x equals the one at P_C(x).
  if (const auto* s = c.as<CoordinateSubspace>())
    return derivative_subspace(s->free_mask, project_coordinate_subspace(s->free_mask, x), v);
  if (c.as<Singleton>()) return {LpVector::zero(x.dim(), x.exponent()), "Lemma4.4"};
  try {
    return derivative_interior_inverse_image(c, x, v);
  } catch (const DomainError&) {
  }
  const bool generic = c.as<PolytopeH>() || c.as<PolytopeV>();
  const auto schedule = StepSchedule::dyadic();
  const auto oracle = numdiff_derivative([&](const LpVector& z) { return project(c, z); }, x, v, schedule,
                                         generic ? std::optional<double>(1e-10) : std::nullopt);
  if (!oracle.converged) throw NonConvergence("finite-difference derivative did not converge");
  return {oracle.estimate, "numeric"};
}

}  // namespace banachproj
