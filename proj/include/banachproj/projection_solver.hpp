#pragma once

// Numerical metric projection onto polytopes in l_p^n, with a
// variational-inequality certificate, plus the projection dispatcher that
// routes every descriptor to its closed form or to this solver.

#include "banachproj/convex_sets.hpp"

#include <vector>

namespace banachproj {

struct ProjectionCertificate {
  LpVector point;
  /// Worst probe value of <J(x - u), u - z>; >= -cert_tol means certified.
  double residual = 0.0;
  std::size_t iterations = 0;
  double distance = 0.0;
  bool converged = false;
};

struct SolverOptions {
  /// Objective tolerance: the certificate bounds 0.5 ||x-u||^2 - 0.5 ||x-u*||^2
  /// by -residual, so convergence requires residual >= -tol.
  double tol = 1e-10;
  double cert_tol = 1e-8;
  std::size_t max_iter = 100000;
};

/// Raised when a required projection fails to certify.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Projects x onto a PolytopeH or PolytopeV descriptor. On max_iter
/// exhaustion returns the best iterate with converged = false.
ProjectionCertificate project_generic(const ConvexSet& c, const LpVector& x, const SolverOptions& opts = {});

/// min over probes z of <J(x - u), u - z>. Throws on an empty probe list.
double certify(const ConvexSet& c, const LpVector& x, const LpVector& u, const std::vector<LpVector>& probes);

/// Probe set that makes certify() exact for polytopes: all vertices for
/// PolytopeV; for PolytopeH the maximizer of <J(x-u), z> over C intersected
/// with an l_inf box of half-width max(2||x-u||, 1e-6) around u.
std::vector<LpVector> certificate_probes(const ConvexSet& c, const LpVector& x, const LpVector& u);

/// Worst value of <J(x - u), u - z> over z in C intersected with an l_inf box
/// of half-width max(2||x-u||, 1e-6) around u. Exact for every descriptor;
/// nonnegative iff u = P_C(x).
double variational_residual(const ConvexSet& c, const LpVector& x, const LpVector& u);

/// Projection plus certificate for any descriptor: polytopes go through
/// project_generic, closed forms are certified by variational_residual.
ProjectionCertificate certified_projection(const ConvexSet& c, const LpVector& x, const SolverOptions& opts = {});

/// Metric projection onto any descriptor. Polytopes go through
/// project_generic and throw NonConvergence if the certificate fails.
LpVector project(const ConvexSet& c, const LpVector& x);

}  // namespace banachproj
