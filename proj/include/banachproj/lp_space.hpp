#pragma once

// Vectors of the finite-dimensional space l_p^n, the canonical pairing with
// the dual l_q^n, the normalized duality mappings J and J*, and the two
// smoothness functions psi and xi built on them.

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace banachproj {

struct StepSchedule;  // numdiff.hpp

/// Raised when two operands live in different spaces (exponent or dimension).
class SpaceMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an input violates an operation's precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent p of l_p with 1 < p < infinity. p = 1 and p = infinity are
/// rejected: those norms are neither uniformly convex nor uniformly smooth.
class Exponent {
 public:
  explicit Exponent(double p);

  double value() const { return p_; }
  /// Conjugate exponent p / (p - 1).
  double conjugate() const { return p_ / (p_ - 1.0); }

  /// Equal up to a few units in the last place, so p and q/(q-1) compare equal.
  friend bool operator==(Exponent a, Exponent b);

 private:
  double p_;
};

class LpVector {
 public:
  LpVector(Eigen::VectorXd coords, Exponent p);
  LpVector(std::initializer_list<double> coords, double p);

  static LpVector zero(std::size_t n, Exponent p);
  static LpVector unit(std::size_t n, std::size_t i, Exponent p);

  const Eigen::VectorXd& coords() const { return coords_; }
  Exponent exponent() const { return p_; }
  double p() const { return p_.value(); }
  std::size_t dim() const { return static_cast<std::size_t>(coords_.size()); }
  double operator[](std::size_t i) const { return coords_[static_cast<Eigen::Index>(i)]; }
  bool is_zero() const { return (coords_.array() == 0.0).all(); }

  LpVector& operator+=(const LpVector& o);
  LpVector& operator-=(const LpVector& o);
  LpVector& operator*=(double s);

  friend LpVector operator+(LpVector a, const LpVector& b) { return a += b; }
  friend LpVector operator-(LpVector a, const LpVector& b) { return a -= b; }
  friend LpVector operator*(double s, LpVector a) { return a *= s; }
  friend LpVector operator*(LpVector a, double s) { return a *= s; }
  friend LpVector operator/(LpVector a, double s) { return a *= 1.0 / s; }
  friend LpVector operator-(LpVector a) { return a *= -1.0; }

 private:
  Eigen::VectorXd coords_;
  Exponent p_;
};

/// Element of the dual space l_q^n, q = p / (p - 1).
class DualVector {
 public:
  /// Functional on the space with exponent `primal`.
  DualVector(Eigen::VectorXd coords, Exponent primal);
  /// Functional given by its own exponent q_dual.
  static DualVector with_q(Eigen::VectorXd coords, double q_dual);

  const Eigen::VectorXd& coords() const { return coords_; }
  double q() const { return primal_.conjugate(); }
  std::size_t dim() const { return static_cast<std::size_t>(coords_.size()); }

  /// Exponent of the primal space this functional acts on.
  Exponent primal_exponent() const { return primal_; }

 private:
  Eigen::VectorXd coords_;
  Exponent primal_;
};

void require_same_space(const LpVector& a, const LpVector& b);

/// (sum |x_i|^r)^(1/r), evaluated with max-abs scaling. Shared by primal and
/// dual norms.
double power_norm(const Eigen::VectorXd& x, double r);

double lp_norm(const LpVector& x);
double dual_norm(const DualVector& phi);
double pairing(const DualVector& phi, const LpVector& x);

/// (Jx)_i = |x_i|^(p-1) sign(x_i) / ||x||^(p-2); J(theta) = theta*.
DualVector duality_map(const LpVector& x);

/// (J* phi)_i = |phi_i|^(q-1) sign(phi_i) / ||phi||_*^(q-2); inverse of J.
LpVector inverse_duality_map(const DualVector& phi);

/// Tolerance on ||x|| = 1 for the unit-sphere preconditions below.
inline constexpr double kSphereTol = 1e-9;

/// Returns x / ||x||. Never applied implicitly by the smoothness functions.
LpVector normalized(const LpVector& x);

/// Function of smoothness: derivative of the norm at unit x along unit v,
/// in closed form <Jx, v>.
double psi_smoothness(const LpVector& x, const LpVector& v);

/// One-sided quotient (||x + tv|| - ||x||) / t for t > 0.
double psi_quotient(const LpVector& x, const LpVector& v, double t);

struct XiEstimate {
  double value = 0.0;
  bool converged = false;
  std::vector<double> t_values;
  std::vector<double> quotients;
};

/// J-function of smoothness, evaluated as the t -> 0+ limit of
/// (<J(x + tv), x> - <Jx, x>) / t along the schedule. Non-convergence is
/// reported through `converged`.
XiEstimate xi_smoothness(const LpVector& x, const LpVector& v, const StepSchedule& schedule);
XiEstimate xi_smoothness(const LpVector& x, const LpVector& v);

}  // namespace banachproj
