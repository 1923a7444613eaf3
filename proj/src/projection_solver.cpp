#include "banachproj/projection_solver.hpp"

#include "banachproj/linear_program.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace banachproj {

namespace {

// min (1/p) sum |xh - M y|^p + lin.y  s.t.  G y <= h,  E y = e.
// Everything is shifted and scaled so that the starting residual has unit norm.
struct Problem {
  Eigen::MatrixXd M;
  Eigen::VectorXd xh;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::MatrixXd E;
  Eigen::VectorXd e;
  double p;
  Eigen::VectorXd lin = {};
};

class ActiveSetNewton {
 public:
  ActiveSetNewton(const Problem& prob, Eigen::VectorXd y0, std::size_t max_iter)
      : P_(prob), y_(std::move(y0)), max_iter_(max_iter) {}

  // Returns true when a KKT point is reached before max_iter.
  bool run() {
    init_working_set();
    for (iterations_ = 0; iterations_ < max_iter_; ++iterations_) {
      const Eigen::MatrixXd Aw = working_rows();
      const Eigen::VectorXd g = gradient(y_);
      Eigen::VectorXd d = newton_direction(Aw, g);
      double decrement = -g.dot(d);
      if (!d.allFinite() || !(decrement > 1e-28)) {
        // A flat Hessian (zero residuals at p > 2) stalls Newton; fall back
        // to the projected gradient while it is still informative.
        d = -projected_gradient(Aw, g);
        decrement = -g.dot(d);
      }
      if (!(decrement > 1e-28)) {
        if (!drop_constraint(Aw, g)) return true;
        continue;
      }
      // The line search is exact, so only the direction matters.
      d /= d.lpNorm<Eigen::Infinity>();
      const auto [alpha, blocking] = line_search(d);
      y_ += alpha * d;
      if (blocking >= 0) {
        working_.push_back(blocking);
      } else if (alpha * d.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + y_.lpNorm<Eigen::Infinity>())) {
        if (!drop_constraint(Aw, gradient(y_))) return true;
      }
    }
    return false;
  }

  const Eigen::VectorXd& y() const { return y_; }
  std::size_t iterations() const { return iterations_; }

 private:
  Eigen::VectorXd residual(const Eigen::VectorXd& y) const { return P_.xh - P_.M * y; }

  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd r = residual(y);
    Eigen::VectorXd g(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i)
      g[i] = r[i] == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(r[i]), P_.p - 1.0), r[i]);
    Eigen::VectorXd out = -P_.M.transpose() * g;
    if (P_.lin.size() > 0) out += P_.lin;
    return out;
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd r = residual(y);
    Eigen::VectorXd D(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      double a = std::abs(r[i]);
      if (P_.p < 2.0) a = std::max(a, 1e-10);
      D[i] = (P_.p - 1.0) * std::pow(a, P_.p - 2.0);
    }
    return P_.M.transpose() * D.asDiagonal() * P_.M;
  }

  Eigen::MatrixXd working_rows() const {
    const Eigen::Index m = y_.size();
    Eigen::MatrixXd Aw(P_.E.rows() + static_cast<Eigen::Index>(working_.size()), m);
    Aw.topRows(P_.E.rows()) = P_.E;
    for (std::size_t k = 0; k < working_.size(); ++k)
      Aw.row(P_.E.rows() + static_cast<Eigen::Index>(k)) = P_.G.row(working_[k]);
    return Aw;
  }

  // Greedily picks linearly independent active inequality rows.
  void init_working_set() {
    working_.clear();
    const double tol = 1e-12;
    for (Eigen::Index j = 0; j < P_.G.rows(); ++j) {
      const double slack = P_.h[j] - P_.G.row(j).dot(y_);
      if (std::abs(slack) > tol * std::max(1.0, std::abs(P_.h[j]))) continue;
      working_.push_back(j);
      const Eigen::MatrixXd Aw = working_rows();
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Aw.transpose());
      qr.setThreshold(1e-10);
      if (qr.rank() < Aw.rows()) working_.pop_back();
    }
  }

  // Orthonormal basis of the null space of the working rows.
  Eigen::MatrixXd null_basis(const Eigen::MatrixXd& Aw) const {
    const Eigen::Index m = y_.size();
    const Eigen::Index k = Aw.rows();
    if (k == 0) return Eigen::MatrixXd::Identity(m, m);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Aw.transpose());
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
    return Q.rightCols(m - k);
  }

  Eigen::VectorXd projected_gradient(const Eigen::MatrixXd& Aw, const Eigen::VectorXd& g) const {
    if (Aw.rows() >= y_.size()) return Eigen::VectorXd::Zero(y_.size());
    const Eigen::MatrixXd Z = null_basis(Aw);
    return Z * (Z.transpose() * g);
  }

  Eigen::VectorXd newton_direction(const Eigen::MatrixXd& Aw, const Eigen::VectorXd& g) const {
    const Eigen::Index m = y_.size();
    if (Aw.rows() >= m) return Eigen::VectorXd::Zero(m);
    const Eigen::MatrixXd Z = null_basis(Aw);
    Eigen::MatrixXd Hz = Z.transpose() * hessian(y_) * Z;
    const double ridge = 1e-14 * std::max(1e-300, Hz.diagonal().cwiseAbs().maxCoeff());
    Hz.diagonal().array() += ridge;
    const Eigen::VectorXd gz = Z.transpose() * g;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Hz);
    return -Z * cod.solve(gz);
  }

  // Removes the inequality with the most negative multiplier; false if none.
  bool drop_constraint(const Eigen::MatrixXd& Aw, const Eigen::VectorXd& g) {
    if (working_.empty()) return false;
    const Eigen::VectorXd mult = Aw.transpose().colPivHouseholderQr().solve(-g);
    const Eigen::Index first = P_.E.rows();
    Eigen::Index worst = -1;
    const double threshold = -1e-12 * std::max(1.0, g.norm());
    double most = threshold;
    for (std::size_t k = 0; k < working_.size(); ++k) {
      const double mu = mult[first + static_cast<Eigen::Index>(k)];
      if (mu < most) {
        most = mu;
        worst = static_cast<Eigen::Index>(k);
      }
    }
    if (worst < 0) return false;
    working_.erase(working_.begin() + worst);
    return true;
  }

  // Exact line search on the convex slice, clipped by the ratio test.
  std::pair<double, Eigen::Index> line_search(const Eigen::VectorXd& d) const {
    double alpha_max = std::numeric_limits<double>::infinity();
    Eigen::Index blocking = -1;
    for (Eigen::Index j = 0; j < P_.G.rows(); ++j) {
      if (std::find(working_.begin(), working_.end(), j) != working_.end()) continue;
      const double gd = P_.G.row(j).dot(d);
      if (gd <= 1e-14 * P_.G.row(j).norm() * d.norm()) continue;
      const double step = std::max(0.0, P_.h[j] - P_.G.row(j).dot(y_)) / gd;
      if (step < alpha_max) {
        alpha_max = step;
        blocking = j;
      }
    }
    // Non-finite slopes come from overflow far past the minimizer.
    auto slope = [&](double a) {
      const double v = gradient(y_ + a * d).dot(d);
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    double hi = 1.0;
    if (std::isfinite(alpha_max)) {
      if (slope(alpha_max) <= 0.0) return {alpha_max, blocking};
      hi = alpha_max;
    } else {
      for (int k = 0; k < 100 && slope(hi) < 0.0; ++k) hi *= 2.0;
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (slope(mid) < 0.0) lo = mid;
      else hi = mid;
    }
    return {0.5 * (lo + hi), -1};
  }

  const Problem& P_;
  Eigen::VectorXd y_;
  std::size_t max_iter_;
  std::size_t iterations_ = 0;
  std::vector<Eigen::Index> working_;
};

struct HMatrices {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

HMatrices stack_rows(const PolytopeH& h, std::size_t n) {
  const auto m = static_cast<Eigen::Index>(h.rows.size());
  HMatrices out{Eigen::MatrixXd(m, static_cast<Eigen::Index>(n)), Eigen::VectorXd(m)};
  for (Eigen::Index j = 0; j < m; ++j) {
    out.A.row(j) = h.rows[static_cast<std::size_t>(j)].normal.transpose();
    out.b[j] = h.rows[static_cast<std::size_t>(j)].offset;
  }
  return out;
}

Eigen::MatrixXd vertex_matrix(const PolytopeV& v) {
  Eigen::MatrixXd V(v.vertices.front().coords().size(), static_cast<Eigen::Index>(v.vertices.size()));
  for (std::size_t k = 0; k < v.vertices.size(); ++k) V.col(static_cast<Eigen::Index>(k)) = v.vertices[k].coords();
  return V;
}

// Feasible point of {A z <= b} minimizing ||z - x||_inf.
Eigen::VectorXd nearest_feasible_inf(const HMatrices& H, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const Eigen::Index m = H.A.rows();
  // Variables (z, t): maximize -t s.t. A z <= b, z - t <= x, -z - t <= -x.
  Eigen::MatrixXd A(m + 2 * n, n + 1);
  A.setZero();
  A.topLeftCorner(m, n) = H.A;
  A.block(m, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  A.block(m, n, n, 1).setConstant(-1.0);
  A.block(m + n, 0, n, n) = -Eigen::MatrixXd::Identity(n, n);
  A.block(m + n, n, n, 1).setConstant(-1.0);
  Eigen::VectorXd b(m + 2 * n);
  b << H.b, x, -x;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
  c[n] = -1.0;
  const auto sol = lp::maximize_free(A, b, c);
  if (sol.status != lp::Status::Optimal) throw InfeasibleSet("H-polytope has an empty feasible region");
  return sol.x.head(n);
}

bool in_hull(const Eigen::MatrixXd& V, const Eigen::VectorXd& x, double tol) {
  const Eigen::Index n = V.rows();
  const Eigen::Index m = V.cols();
  Eigen::MatrixXd A(2 * n + 2, m);
  A << V, -V, Eigen::RowVectorXd::Ones(m), -Eigen::RowVectorXd::Ones(m);
  Eigen::VectorXd b(2 * n + 2);
  b << x.array() + tol, -x.array() + tol, 1.0, -1.0;
  return lp::maximize_nonneg(A, b, Eigen::VectorXd::Zero(m)).status == lp::Status::Optimal;
}

// Primal residual from a dual point w of the conjugate problem: r = J_q(w) up to scaling.
Eigen::VectorXd conjugate_residual(const Eigen::VectorXd& w, double q) {
  Eigen::VectorXd r(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    r[i] = w[i] == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(w[i]), q - 1.0), w[i]);
  return r;
}

// For p < 2 the primal objective has an unbounded Hessian at zero residuals,
// which caps the attainable certificate; the dual objective (exponent q > 2)
// is twice differentiable and recovers exact zeros.
// H form: min_{lam >= 0} (1/q) ||G^T lam||_q^q - lam.(G xh - h), r = J(G^T lam).
Eigen::VectorXd dual_h_residual(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& xh, double p,
                                std::size_t max_iter, bool& ok, std::size_t& iterations) {
  const double q = p / (p - 1.0);
  const Eigen::Index m = G.rows();
  Problem dual{-G.transpose(), Eigen::VectorXd::Zero(xh.size()), -Eigen::MatrixXd::Identity(m, m), Eigen::VectorXd::Zero(m),
               Eigen::MatrixXd(0, m), Eigen::VectorXd(0), q, -(G * xh - h)};
  ActiveSetNewton solver(dual, Eigen::VectorXd::Zero(m), max_iter);
  ok = solver.run();
  iterations = solver.iterations();
  return conjugate_residual(G.transpose() * solver.y(), q);
}

// V form over (w, tau): min (1/q) ||w||_q^q - w.xh + tau  s.t.  M^T w <= tau, r = J(w).
Eigen::VectorXd dual_v_residual(const Eigen::MatrixXd& M, const Eigen::VectorXd& xh, double p, std::size_t max_iter,
                                bool& ok, std::size_t& iterations) {
  const double q = p / (p - 1.0);
  const Eigen::Index n = M.rows();
  const Eigen::Index m = M.cols();
  Eigen::MatrixXd Md = Eigen::MatrixXd::Zero(n, n + 1);
  Md.leftCols(n) = -Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd G(m, n + 1);
  G << M.transpose(), -Eigen::VectorXd::Ones(m);
  Eigen::VectorXd lin(n + 1);
  lin << -xh, 1.0;
  Problem dual{Md, Eigen::VectorXd::Zero(n), G, Eigen::VectorXd::Zero(m), Eigen::MatrixXd(0, n + 1), Eigen::VectorXd(0), q, lin};
  // Start from the dual image of the nearest-vertex residual xh.
  Eigen::VectorXd y0(n + 1);
  y0.head(n) = conjugate_residual(xh, p);
  y0[n] = (M.transpose() * y0.head(n)).maxCoeff();
  ActiveSetNewton solver(dual, y0, max_iter);
  ok = solver.run();
  iterations = solver.iterations();
  return conjugate_residual(solver.y().head(n), q);
}

ProjectionCertificate finish(const ConvexSet& c, const LpVector& x, LpVector u, std::size_t iterations,
                             bool solver_ok, const SolverOptions& opts) {
  const double residual = certify(c, x, u, certificate_probes(c, x, u));
  const double distance = lp_norm(x - u);
  const bool converged = solver_ok && residual >= -opts.tol && residual >= -opts.cert_tol;
  return ProjectionCertificate{std::move(u), residual, iterations, distance, converged};
}

}  // namespace

ProjectionCertificate project_generic(const ConvexSet& c, const LpVector& x, const SolverOptions& opts) {
  require_in_space(c, x);
  const double p = x.p();
  const Eigen::Index n = static_cast<Eigen::Index>(x.dim());

  if (const auto* h = c.as<PolytopeH>()) {
    const HMatrices H = stack_rows(*h, x.dim());
    if (H.A.rows() == 0 || ((H.A * x.coords()).array() <= H.b.array()).all())
      return ProjectionCertificate{x, 0.0, 0, 0.0, true};
    const Eigen::VectorXd u0 = nearest_feasible_inf(H, x.coords());
    const double s = power_norm(x.coords() - u0, p);
    if (s == 0.0) return ProjectionCertificate{x, 0.0, 0, 0.0, true};
    Problem prob{Eigen::MatrixXd::Identity(n, n), (x.coords() - u0) / s, H.A, (H.b - H.A * u0) / s,
                 Eigen::MatrixXd(0, n), Eigen::VectorXd(0), p};
    if (p < 2.0) {
      bool ok = false;
      std::size_t it = 0;
      const Eigen::VectorXd r = dual_h_residual(prob.G, prob.h, prob.xh, p, opts.max_iter, ok, it);
      return finish(c, x, LpVector(x.coords() - s * r, x.exponent()), it, ok, opts);
    }
    ActiveSetNewton solver(prob, Eigen::VectorXd::Zero(n), opts.max_iter);
    const bool ok = solver.run();
    LpVector u(u0 + s * solver.y(), x.exponent());
    return finish(c, x, std::move(u), solver.iterations(), ok, opts);
  }

  if (const auto* v = c.as<PolytopeV>()) {
    const Eigen::MatrixXd V = vertex_matrix(*v);
    const Eigen::Index m = V.cols();
    if (in_hull(V, x.coords(), 1e-12 * std::max(1.0, lp_norm(x)))) return ProjectionCertificate{x, 0.0, 0, 0.0, true};
    Eigen::Index k0 = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < m; ++k) {
      const double d = power_norm(x.coords() - V.col(k), p);
      if (d < best) {
        best = d;
        k0 = k;
      }
    }
    const Eigen::VectorXd u0 = V.col(k0);
    const double s = best;
    if (s == 0.0) return ProjectionCertificate{x, 0.0, 0, 0.0, true};
    Problem prob{(V.colwise() - u0) / s,
                 (x.coords() - u0) / s,
                 -Eigen::MatrixXd::Identity(m, m),
                 Eigen::VectorXd::Zero(m),
                 Eigen::RowVectorXd::Ones(m),
                 Eigen::VectorXd::Ones(1),
                 p};
    if (p < 2.0) {
      bool ok = false;
      std::size_t it = 0;
      const Eigen::VectorXd r = dual_v_residual(prob.M, prob.xh, p, opts.max_iter, ok, it);
      return finish(c, x, LpVector(x.coords() - s * r, x.exponent()), it, ok, opts);
    }
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(m);
    y0[k0] = 1.0;
    ActiveSetNewton solver(prob, y0, opts.max_iter);
    const bool ok = solver.run();
    const Eigen::VectorXd lambda = solver.y().cwiseMax(0.0);
    LpVector u(V * (lambda / lambda.sum()), x.exponent());
    return finish(c, x, std::move(u), solver.iterations(), ok, opts);
  }

  throw DomainError("project_generic handles only polytope descriptors");
}

double certify(const ConvexSet& c, const LpVector& x, const LpVector& u, const std::vector<LpVector>& probes) {
  require_in_space(c, x);
  require_in_space(c, u);
  if (probes.empty()) throw DomainError("certify needs at least one probe");
  const DualVector j = duality_map(x - u);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& z : probes) worst = std::min(worst, pairing(j, u - z));
  return worst;
}

std::vector<LpVector> certificate_probes(const ConvexSet& c, const LpVector& x, const LpVector& u) {
  require_in_space(c, x);
  if (const auto* v = c.as<PolytopeV>()) return v->vertices;
  if (const auto* h = c.as<PolytopeH>()) {
    if (h->rows.empty()) return {u};
    const HMatrices H = stack_rows(*h, x.dim());
    const double R = std::max(2.0 * lp_norm(x - u), 1e-6);
    const Eigen::VectorXd lo = u.coords().array() - R;
    const Eigen::VectorXd hi = u.coords().array() + R;
    const auto sol = lp::maximize_boxed(H.A, H.b, duality_map(x - u).coords(), lo, hi);
    if (sol.status != lp::Status::Optimal) return {u};
    return {u, LpVector(sol.x, x.exponent())};
  }
  throw DomainError("certificate probes are defined for polytope descriptors");
}

double variational_residual(const ConvexSet& c, const LpVector& x, const LpVector& u) {
  require_in_space(c, x);
  require_in_space(c, u);
  const LpVector r = x - u;
  const DualVector phi = duality_map(r);
  const Eigen::VectorXd& f = phi.coords();
  const double R = std::max(2.0 * lp_norm(r), 1e-6);
  if (const auto* b = c.as<Ball>()) return pairing(phi, u - b->center) - b->radius * dual_norm(phi);
  if (c.as<PositiveCone>()) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
      worst += f[i] > 0.0 ? -f[i] * R : f[i] * (u[i] - std::max(0.0, u[i] - R));
    return worst;
  }
  if (const auto* s = c.as<CoordinateSubspace>()) {
    double worst = 0.0;
    for (std::size_t i = 0; i < s->free_mask.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      worst += s->free_mask[i] ? -std::abs(f[k]) * R : f[k] * u[i];
    }
    return worst;
  }
  if (c.as<PolytopeH>() || c.as<PolytopeV>()) return certify(c, x, u, certificate_probes(c, x, u));
  if (const auto* s = c.as<Segment>()) return certify(c, x, u, {s->u, s->w});
  if (const auto* ray = c.as<Ray>()) {
    const LpVector far = u + (R / ray->dir.coords().lpNorm<Eigen::Infinity>()) * ray->dir;
    return certify(c, x, u, {ray->v, far});
  }
  return certify(c, x, u, {c.as<Singleton>()->y});
}

ProjectionCertificate certified_projection(const ConvexSet& c, const LpVector& x, const SolverOptions& opts) {
  if (c.as<PolytopeH>() || c.as<PolytopeV>()) return project_generic(c, x, opts);
  LpVector u = project(c, x);
  const double residual = variational_residual(c, x, u);
  const double distance = lp_norm(x - u);
  return ProjectionCertificate{std::move(u), residual, 0, distance, residual >= -opts.cert_tol};
}

LpVector project(const ConvexSet& c, const LpVector& x) {
  require_in_space(c, x);
  if (c.as<PolytopeH>() || c.as<PolytopeV>()) {
    auto cert = project_generic(c, x);
    if (!cert.converged)
      throw NonConvergence("polytope projection failed to certify (residual " + std::to_string(cert.residual) + ")");
    return std::move(cert.point);
  }
  return std::visit(
      [&](const auto& s) -> LpVector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return project_ball(s.center, s.radius, x);
        else if constexpr (std::is_same_v<T, PositiveCone>) return project_positive_cone(x);
        else if constexpr (std::is_same_v<T, CoordinateSubspace>) return project_coordinate_subspace(s.free_mask, x);
        else if constexpr (std::is_same_v<T, Segment>) return project_segment(s.u, s.w, x);
        else if constexpr (std::is_same_v<T, Ray>) return project_ray(s.v, s.dir, x);
        else if constexpr (std::is_same_v<T, Singleton>) return s.y;
        else throw DomainError("unreachable descriptor");
      },
      c.shape());
}

}  // namespace banachproj
