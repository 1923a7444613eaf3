#pragma once

// Dense two-phase simplex for small linear programs. Used for polytope
// feasibility probes, polytope membership, and the exact worst-probe search
// behind H-representation certificates.

#include <Eigen/Dense>

namespace banachproj::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// maximize c'x  s.t.  A x <= b,  x >= 0.
Solution maximize_nonneg(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

/// maximize c'x  s.t.  A x <= b  with x free (split into x+ - x-).
Solution maximize_free(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

/// maximize c'x  s.t.  A x <= b,  lo <= x <= hi. Never unbounded.
Solution maximize_boxed(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

}  // namespace banachproj::lp
