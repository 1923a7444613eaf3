#include "banachproj/convex_sets.hpp"

#include "banachproj/linear_program.hpp"
#include "banachproj/projection_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace banachproj {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Minimizes t -> ||x - (a + t d)|| over [0, t_hi]. The derivative has the
// sign of -<J(x - a - t d), d>, which is nondecreasing in t.
double line_argmin(const LpVector& a, const LpVector& d, const LpVector& x, double t_hi) {
  auto slope = [&](double t) { return -pairing(duality_map(x - (a + t * d)), d); };
  if (slope(0.0) >= 0.0) return 0.0;
  if (slope(t_hi) <= 0.0) return t_hi;
  double lo = 0.0, hi = t_hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (slope(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Nonzero functional annihilating d (needs dim >= 2).
Eigen::VectorXd annihilator(const Eigen::VectorXd& d) {
  Eigen::Index i = 0;
  d.cwiseAbs().maxCoeff(&i);
  const Eigen::Index j = i == 0 ? 1 : 0;
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(d.size());
  phi[i] = d[j];
  phi[j] = -d[i];
  return phi;
}

LpVector witness_from_functional(const Eigen::VectorXd& phi, Exponent p) {
  return inverse_duality_map(DualVector(phi, p));
}

}  // namespace

ConvexSet ConvexSet::ball(LpVector center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InfeasibleSet("ball radius must be positive");
  const std::size_t n = center.dim();
  const Exponent p = center.exponent();
  return ConvexSet(Ball{std::move(center), radius}, n, p);
}

ConvexSet ConvexSet::positive_cone(std::size_t n, Exponent p) {
  if (n == 0) throw InfeasibleSet("positive cone needs dimension n >= 1");
  return ConvexSet(PositiveCone{}, n, p);
}

ConvexSet ConvexSet::coordinate_subspace(std::vector<bool> free_mask, Exponent p) {
  const auto n_free = std::count(free_mask.begin(), free_mask.end(), true);
  if (n_free == 0) throw InfeasibleSet("coordinate subspace needs at least one free coordinate");
  if (n_free == static_cast<long>(free_mask.size()))
    throw InfeasibleSet("coordinate subspace must be proper: mask at least one coordinate");
  const std::size_t n = free_mask.size();
  return ConvexSet(CoordinateSubspace{std::move(free_mask)}, n, p);
}

ConvexSet ConvexSet::polytope_h(std::vector<HalfSpace> rows, std::size_t n, Exponent p) {
  if (n == 0) throw InfeasibleSet("polytope needs dimension n >= 1");
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd A(m, static_cast<Eigen::Index>(n));
  Eigen::VectorXd b(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& row = rows[static_cast<std::size_t>(j)];
    if (row.normal.size() != static_cast<Eigen::Index>(n)) throw InfeasibleSet("half-space normal has wrong dimension");
    if (!row.normal.allFinite() || !std::isfinite(row.offset)) throw InfeasibleSet("half-space data must be finite");
    if (row.normal.cwiseAbs().maxCoeff() == 0.0) {
      if (row.offset < 0.0) throw InfeasibleSet("row 0 . z <= negative offset is infeasible");
    }
    A.row(j) = row.normal.transpose();
    b[j] = row.offset;
  }
  if (m > 0) {
    const auto probe = lp::maximize_free(A, b, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
    if (probe.status == lp::Status::Infeasible) throw InfeasibleSet("H-polytope has an empty feasible region");
  }
  return ConvexSet(PolytopeH{std::move(rows)}, n, p);
}

ConvexSet ConvexSet::polytope_v(std::vector<LpVector> vertices) {
  if (vertices.empty()) throw InfeasibleSet("V-polytope needs at least one vertex");
  for (const auto& v : vertices) require_same_space(vertices.front(), v);
  const std::size_t n = vertices.front().dim();
  const Exponent p = vertices.front().exponent();
  return ConvexSet(PolytopeV{std::move(vertices)}, n, p);
}

ConvexSet ConvexSet::segment(LpVector u, LpVector w) {
  require_same_space(u, w);
  if ((u - w).is_zero()) throw InfeasibleSet("segment endpoints must differ");
  const std::size_t n = u.dim();
  const Exponent p = u.exponent();
  return ConvexSet(Segment{std::move(u), std::move(w)}, n, p);
}

ConvexSet ConvexSet::ray(LpVector v, LpVector dir) {
  require_same_space(v, dir);
  if (dir.is_zero()) throw InfeasibleSet("ray direction must be nonzero");
  const std::size_t n = v.dim();
  const Exponent p = v.exponent();
  return ConvexSet(Ray{std::move(v), std::move(dir)}, n, p);
}

ConvexSet ConvexSet::singleton(LpVector y) {
  const std::size_t n = y.dim();
  const Exponent p = y.exponent();
  return ConvexSet(Singleton{std::move(y)}, n, p);
}

std::string ConvexSet::type_name() const {
  return std::visit(Overloaded{
                        [](const Ball&) { return std::string("ball"); },
                        [](const PositiveCone&) { return std::string("positive_cone"); },
                        [](const CoordinateSubspace&) { return std::string("coordinate_subspace"); },
                        [](const PolytopeH&) { return std::string("polytope_h"); },
                        [](const PolytopeV&) { return std::string("polytope_v"); },
                        [](const Segment&) { return std::string("segment"); },
                        [](const Ray&) { return std::string("ray"); },
                        [](const Singleton&) { return std::string("singleton"); },
                    },
                    shape_);
}

void require_in_space(const ConvexSet& c, const LpVector& x) {
  if (!(c.exponent() == x.exponent()) || c.dim() != x.dim()) {
    std::ostringstream msg;
    msg << "point (p = " << x.p() << ", n = " << x.dim() << ") does not live in the set's space (p = "
        << c.exponent().value() << ", n = " << c.dim() << ")";
    throw SpaceMismatch(msg.str());
  }
}

double default_membership_tol(const LpVector& x) { return 1e-9 * std::max(1.0, lp_norm(x)); }

bool contains(const ConvexSet& c, const LpVector& x, double tol) {
  require_in_space(c, x);
  const double p = x.p();
  return std::visit(
      Overloaded{
          [&](const Ball& b) { return lp_norm(x - b.center) <= b.radius + tol; },
          [&](const PositiveCone&) { return power_norm(x.coords().cwiseMin(0.0), p) <= tol; },
          [&](const CoordinateSubspace& s) {
            Eigen::VectorXd off = x.coords();
            for (std::size_t i = 0; i < s.free_mask.size(); ++i)
              if (s.free_mask[i]) off[static_cast<Eigen::Index>(i)] = 0.0;
            return power_norm(off, p) <= tol;
          },
          [&](const PolytopeH& h) {
            bool inside = true;
            for (const auto& row : h.rows) inside = inside && row.normal.dot(x.coords()) <= row.offset;
            if (inside) return true;
            return lp_norm(x - project(c, x)) <= tol;
          },
          [&](const auto&) { return lp_norm(x - project(c, x)) <= tol; },
      },
      c.shape());
}

bool contains(const ConvexSet& c, const LpVector& x) { return contains(c, x, default_membership_tol(x)); }

LpVector project_ball(const LpVector& center, double radius, const LpVector& x) {
  require_same_space(center, x);
  if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
  const LpVector d = x - center;
  const double nd = lp_norm(d);
  if (nd <= radius) return x;
  return center + (radius / nd) * d;
}

LpVector project_positive_cone(const LpVector& x) { return LpVector(x.coords().cwiseMax(0.0), x.exponent()); }

LpVector project_coordinate_subspace(const std::vector<bool>& free_mask, const LpVector& x) {
  if (free_mask.size() != x.dim()) throw SpaceMismatch("subspace mask has wrong dimension");
  Eigen::VectorXd out = x.coords();
  for (std::size_t i = 0; i < free_mask.size(); ++i)
    if (!free_mask[i]) out[static_cast<Eigen::Index>(i)] = 0.0;
  return LpVector(std::move(out), x.exponent());
}

LpVector project_segment(const LpVector& u, const LpVector& w, const LpVector& x) {
  require_same_space(u, x);
  const LpVector d = w - u;
  return u + line_argmin(u, d, x, 1.0) * d;
}

LpVector project_ray(const LpVector& v, const LpVector& dir, const LpVector& x) {
  require_same_space(v, x);
  // The minimizer satisfies t ||dir|| <= 2 ||x - v||.
  const double t_hi = 2.0 * lp_norm(x - v) / lp_norm(dir) + 1.0;
  return v + line_argmin(v, dir, x, t_hi) * dir;
}

double orthogonal_cone_residual(const std::vector<bool>& free_mask, const LpVector& x) {
  if (free_mask.size() != x.dim()) throw SpaceMismatch("subspace mask has wrong dimension");
  const DualVector jx = duality_map(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < free_mask.size(); ++i)
    if (free_mask[i]) worst = std::max(worst, std::abs(jx.coords()[static_cast<Eigen::Index>(i)]));
  return worst;
}

PointClass classify_point(const ConvexSet& c, const LpVector& y) {
  require_in_space(c, y);
  const double tol = default_membership_tol(y);
  if (c.as<PolytopeV>()) throw DomainError("classify_point does not support V-polytopes");
  if (!contains(c, y, tol)) throw DomainError("classify_point requires y in C");
  const Exponent p = y.exponent();
  const std::size_t n = y.dim();
  auto cuticle = [](LpVector w) { return PointClass{PointTag::Cuticle, std::move(w)}; };

  return std::visit(
      Overloaded{
          [&](const Ball& b) {
            const LpVector d = y - b.center;
            if (lp_norm(d) >= b.radius - 1e-9 * std::max(1.0, b.radius)) return cuticle(d);
            return PointClass{};
          },
          [&](const PositiveCone&) {
            for (std::size_t i = 0; i < n; ++i)
              if (y[i] <= tol) return cuticle(-LpVector::unit(n, i, p));
            return PointClass{};
          },
          [&](const CoordinateSubspace& s) {
            std::size_t k = 0;
            while (s.free_mask[k]) ++k;
            return cuticle(LpVector::unit(n, k, p));
          },
          [&](const PolytopeH& h) {
            for (const auto& row : h.rows) {
              const double scale = std::max(1.0, power_norm(row.normal, p.conjugate()));
              if (std::abs(row.normal.dot(y.coords()) - row.offset) <= tol * scale && row.normal.cwiseAbs().maxCoeff() > 0)
                return cuticle(witness_from_functional(row.normal, p));
            }
            return PointClass{};
          },
          [&](const PolytopeV&) -> PointClass { throw DomainError("unreachable"); },
          [&](const Segment& s) {
            if (lp_norm(y - s.u) <= tol) return cuticle(s.u - s.w);
            if (lp_norm(y - s.w) <= tol) return cuticle(s.w - s.u);
            if (n == 1) return PointClass{};
            return cuticle(witness_from_functional(annihilator((s.w - s.u).coords()), p));
          },
          [&](const Ray& r) {
            if (lp_norm(y - r.v) <= tol) return cuticle(-r.dir);
            if (n == 1) return PointClass{};
            return cuticle(witness_from_functional(annihilator(r.dir.coords()), p));
          },
          [&](const Singleton&) { return cuticle(LpVector::unit(n, 0, p)); },
      },
      c.shape());
}

bool inverse_image_ray_check(const LpVector& center, double radius, const LpVector& y, double t) {
  require_same_space(center, y);
  if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
  if (!(t >= 0.0)) throw DomainError("ray parameter t must be nonnegative");
  const LpVector d = y - center;
  if (std::abs(lp_norm(d) - radius) > 1e-9 * std::max(1.0, radius)) throw DomainError("y must lie on the sphere S(c, r)");
  const LpVector image = project_ball(center, radius, y + t * d);
  return lp_norm(image - y) <= 1e-9 * std::max(1.0, lp_norm(y));
}

std::optional<LpVector> cone_vertex(const ConvexSet& c) {
  const auto n = c.dim();
  const auto p = c.exponent();
  return std::visit(Overloaded{
                        [&](const PositiveCone&) -> std::optional<LpVector> { return LpVector::zero(n, p); },
                        [&](const CoordinateSubspace&) -> std::optional<LpVector> { return LpVector::zero(n, p); },
                        [&](const Ray& r) -> std::optional<LpVector> { return r.v; },
                        [&](const Singleton& s) -> std::optional<LpVector> { return s.y; },
                        [&](const PolytopeH& h) -> std::optional<LpVector> {
                          for (const auto& row : h.rows)
                            if (row.offset != 0.0) return std::nullopt;
                          return LpVector::zero(n, p);
                        },
                        [&](const auto&) -> std::optional<LpVector> { return std::nullopt; },
                    },
                    c.shape());
}

bool cone_inverse_image_translation_check(const ConvexSet& cone, const LpVector& y, double t, const LpVector& x) {
  require_in_space(cone, y);
  require_in_space(cone, x);
  const auto v = cone_vertex(cone);
  if (!v) throw DomainError("translation check needs a cone descriptor");
  if (!(t > 0.0)) throw DomainError("scaling t must be positive");
  if (!contains(cone, y)) throw DomainError("y must lie in the cone");
  if (lp_norm(y - *v) <= default_membership_tol(y)) throw DomainError("y must differ from the cone vertex");
  const LpVector u = *v + t * (y - *v);
  const double tol_y = 1e-9 * std::max(1.0, lp_norm(y));
  const double tol_u = 1e-9 * std::max(1.0, lp_norm(u));
  const bool in_y = lp_norm(project(cone, x) - y) <= tol_y;
  const bool in_u = lp_norm(project(cone, x + (u - y)) - u) <= tol_u;
  return in_y == in_u;
}

double dual_cone_membership(const ConvexSet& cone, const LpVector& x, const std::vector<LpVector>& probes) {
  require_in_space(cone, x);
  const auto v = cone_vertex(cone);
  if (!v) throw DomainError("dual cone membership needs a cone descriptor");
  if (probes.empty()) throw DomainError("dual cone membership needs at least one probe");
  const DualVector jx = duality_map(x - *v);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& z : probes) {
    require_in_space(cone, z);
    if (!contains(cone, z)) throw DomainError("dual cone probes must lie in the cone");
    worst = std::min(worst, pairing(jx, *v - z));
  }
  return worst;
}

std::vector<LpVector> positive_cone_probes(std::size_t n, Exponent p) {
  std::vector<LpVector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(LpVector::unit(n, i, p));
  return out;
}

}  // namespace banachproj
