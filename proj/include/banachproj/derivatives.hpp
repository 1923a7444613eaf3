#pragma once

// Analytic one-sided directional derivatives P'_C(x)(v) of the metric
// projection for balls, the positive cone, coordinate subspaces, and the
// interior cases, plus the sphere direction classifier.

#include "banachproj/convex_sets.hpp"

#include <string>

namespace banachproj {

enum class BoundaryTag { Up, Down };

struct BoundaryClass {
  BoundaryTag tag = BoundaryTag::Up;
  /// psi((x-c)/r, v/||v||): first-order growth of t -> ||x + tv - c||.
  double margin = 0.0;
};

struct DerivativeResult {
  LpVector value;
  /// Clause that fired: "Thm5.2(ii)", "Prop6.4(iii)", "Thm6.1", "coordinatewise", "numeric", ...
  std::string case_label;
  /// 1-based case within a multi-case positive-cone clause; 0 elsewhere.
  int branch = 0;
};

constexpr double kTieTol = 1e-9;

/// x must lie on S(c, r). Up iff ||x + tv - c|| >= r for all small t > 0.
BoundaryClass classify_direction(const LpVector& c, double r, const LpVector& x, const LpVector& v);

DerivativeResult derivative_ball(const LpVector& c, double r, const LpVector& x, const LpVector& v);

/// Coordinatewise: v_i where x_i > 0, max(v_i, 0) where x_i = 0, 0 where
/// x_i < 0. In dimension 3 the label names the matching clause of the
/// n = 3 case table; the branch counts zero coordinates with v_i < 0.
DerivativeResult derivative_positive_cone(const LpVector& x, const LpVector& v);

/// y must lie in the subspace. Directions in the orthogonal cone give theta,
/// tangential ones give v; mixed directions use the coordinate truncation
/// of v when it agrees with the finite-difference oracle, else the oracle.
DerivativeResult derivative_subspace(const std::vector<bool>& free_mask, const LpVector& y, const LpVector& v);

/// v on the interior of C, theta on the interior of an inverse image
/// (all-negative orthant of the positive cone, everything for a singleton).
/// Throws DomainError where neither applies.
DerivativeResult derivative_interior_inverse_image(const ConvexSet& c, const LpVector& x, const LpVector& v);

/// Routes to the analytic rule for the descriptor; other shapes fall back
/// to the interior rules and then to numdiff ("numeric"). Throws
/// NonConvergence if the numeric fallback does not converge.
DerivativeResult derivative(const ConvexSet& c, const LpVector& x, const LpVector& v);

}  // namespace banachproj
