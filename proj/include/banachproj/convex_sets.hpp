#pragma once

// Convex-set descriptors, membership, closed-form projections, and the
// inverse-image machinery of the metric projection: internal/cuticle points,
// orthogonal cones of subspaces, dual cones, and inverse-image rays.

#include "banachproj/lp_space.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace banachproj {

/// A descriptor that does not denote a nonempty closed convex set.
class InfeasibleSet : public DomainError {
 public:
  using DomainError::DomainError;
};

struct Ball {
  LpVector center;
  double radius;
};

struct PositiveCone {};

/// C = {z : z_i = 0 wherever free_mask[i] is false}.
struct CoordinateSubspace {
  std::vector<bool> free_mask;
};

/// normal . z <= offset
struct HalfSpace {
  Eigen::VectorXd normal;
  double offset;
};

struct PolytopeH {
  std::vector<HalfSpace> rows;
};

struct PolytopeV {
  std::vector<LpVector> vertices;
};

struct Segment {
  LpVector u, w;
};

/// {v + t dir : t >= 0}
struct Ray {
  LpVector v, dir;
};

struct Singleton {
  LpVector y;
};

using SetShape = std::variant<Ball, PositiveCone, CoordinateSubspace, PolytopeH, PolytopeV, Segment, Ray, Singleton>;

/// Immutable, validated set descriptor. The factories enforce each shape's
/// invariants and throw InfeasibleSet otherwise.
class ConvexSet {
 public:
  static ConvexSet ball(LpVector center, double radius);
  static ConvexSet positive_cone(std::size_t n, Exponent p);
  static ConvexSet coordinate_subspace(std::vector<bool> free_mask, Exponent p);
  static ConvexSet polytope_h(std::vector<HalfSpace> rows, std::size_t n, Exponent p);
  static ConvexSet polytope_v(std::vector<LpVector> vertices);
  static ConvexSet segment(LpVector u, LpVector w);
  static ConvexSet ray(LpVector v, LpVector dir);
  static ConvexSet singleton(LpVector y);

  const SetShape& shape() const { return shape_; }
  std::size_t dim() const { return n_; }
  Exponent exponent() const { return p_; }
  /// JSON tag: "ball", "positive_cone", ...
  std::string type_name() const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&shape_);
  }

 private:
  ConvexSet(SetShape shape, std::size_t n, Exponent p) : shape_(std::move(shape)), n_(n), p_(p) {}

  SetShape shape_;
  std::size_t n_;
  Exponent p_;
};

void require_in_space(const ConvexSet& c, const LpVector& x);

/// Default membership tolerance 1e-9 max(1, ||x||).
double default_membership_tol(const LpVector& x);

/// True iff dist(x, C) <= tol.
bool contains(const ConvexSet& c, const LpVector& x, double tol);
bool contains(const ConvexSet& c, const LpVector& x);

LpVector project_ball(const LpVector& center, double radius, const LpVector& x);
LpVector project_positive_cone(const LpVector& x);
LpVector project_coordinate_subspace(const std::vector<bool>& free_mask, const LpVector& x);
LpVector project_segment(const LpVector& u, const LpVector& w, const LpVector& x);
LpVector project_ray(const LpVector& v, const LpVector& dir, const LpVector& x);

/// max over free coordinates i of |<Jx, e_i>|; zero iff x lies in the
/// orthogonal cone {x : <Jx, z> = 0 for all z in C}.
double orthogonal_cone_residual(const std::vector<bool>& free_mask, const LpVector& x);

enum class PointTag { Internal, Cuticle };

struct PointClass {
  PointTag tag = PointTag::Internal;
  /// u != theta with P_C(y + u) = y; present iff tag == Cuticle.
  std::optional<LpVector> witness;
};

/// Internal iff the inverse image of y is {y}. Cuticle witnesses are chosen
/// canonically: y - c on a sphere, e_k for the lowest masked coordinate of a
/// subspace, -e_k for the lowest zero coordinate in the positive cone, J* of
/// the lowest active row normal of an H-polytope. Throws DomainError if y is
/// not in C. PolytopeV is not supported.
PointClass classify_point(const ConvexSet& c, const LpVector& y);

/// True iff P_{B(c,r)}(y + t (y - c)) = y within tolerance, for y on S(c, r).
bool inverse_image_ray_check(const LpVector& center, double radius, const LpVector& y, double t);

/// Vertex of a cone-shaped descriptor (positive cone, subspace, ray,
/// homogeneous H-polytope, singleton); nullopt otherwise.
std::optional<LpVector> cone_vertex(const ConvexSet& c);

/// With u = v + t (y - v): returns whether [x in P^-1(y)] <=> [x + (u - y) in
/// P^-1(u)], each side decided by projecting.
bool cone_inverse_image_translation_check(const ConvexSet& cone, const LpVector& y, double t, const LpVector& x);

/// min over probes z of <J(x - v), v - z>; nonnegative is consistent with x in
/// the dual cone P_K^-1(v).
double dual_cone_membership(const ConvexSet& cone, const LpVector& x, const std::vector<LpVector>& probes);

/// Coordinate unit vectors: exact probes for the positive cone.
std::vector<LpVector> positive_cone_probes(std::size_t n, Exponent p);

}  // namespace banachproj
