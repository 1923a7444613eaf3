#include "banachproj/lp_space.hpp"

#include "banachproj/numdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace banachproj {

namespace {

// |a|^e sign(a) with 0^e = 0 for e > 0.
double signed_power(double a, double e) {
  if (a == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(a), e), a);
}

// Shared kernel of J and J*: r |y_i / r|^(e-1) sign(y_i), r = ||y||_e.
Eigen::VectorXd normalized_power_map(const Eigen::VectorXd& y, double e) {
  const double r = power_norm(y, e);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(y.size());
  if (r == 0.0) return out;
  for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = r * signed_power(y[i] / r, e - 1.0);
  return out;
}

void require_unit(const LpVector& v, const char* name) {
  const double nv = lp_norm(v);
  if (std::abs(nv - 1.0) > kSphereTol) {
    std::ostringstream msg;
    msg << name << " must lie on the unit sphere (norm " << nv << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

Exponent::Exponent(double p) : p_(p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << "exponent p must satisfy 1 < p < inf, got " << p;
    throw DomainError(msg.str());
  }
}

LpVector::LpVector(Eigen::VectorXd coords, Exponent p) : coords_(std::move(coords)), p_(p) {
  if (coords_.size() == 0) throw DomainError("vectors need dimension n >= 1");
  if (!coords_.allFinite()) throw DomainError("vector coordinates must be finite");
}

LpVector::LpVector(std::initializer_list<double> coords, double p)
    : LpVector(Eigen::Map<const Eigen::VectorXd>(coords.begin(),
                                                 static_cast<Eigen::Index>(coords.size())),
               Exponent(p)) {}

LpVector LpVector::zero(std::size_t n, Exponent p) {
  return LpVector(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), p);
}

LpVector LpVector::unit(std::size_t n, std::size_t i, Exponent p) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  e[static_cast<Eigen::Index>(i)] = 1.0;
  return LpVector(std::move(e), p);
}

void require_same_space(const LpVector& a, const LpVector& b) {
  if (!(a.exponent() == b.exponent())) {
    std::ostringstream msg;
    msg << "vectors from different spaces: p = " << a.p() << " vs p = " << b.p();
    throw SpaceMismatch(msg.str());
  }
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << "dimension mismatch: " << a.dim() << " vs " << b.dim();
    throw SpaceMismatch(msg.str());
  }
}

LpVector& LpVector::operator+=(const LpVector& o) {
  require_same_space(*this, o);
  coords_ += o.coords_;
  return *this;
}

LpVector& LpVector::operator-=(const LpVector& o) {
  require_same_space(*this, o);
  coords_ -= o.coords_;
  return *this;
}

LpVector& LpVector::operator*=(double s) {
  coords_ *= s;
  return *this;
}

bool operator==(Exponent a, Exponent b) {
  return std::abs(a.p_ - b.p_) <= 4 * std::numeric_limits<double>::epsilon() * std::max(a.p_, b.p_);
}

DualVector::DualVector(Eigen::VectorXd coords, Exponent primal)
    : coords_(std::move(coords)), primal_(primal) {
  if (coords_.size() == 0) throw DomainError("vectors need dimension n >= 1");
  if (!coords_.allFinite()) throw DomainError("functional coordinates must be finite");
}

DualVector DualVector::with_q(Eigen::VectorXd coords, double q_dual) {
  if (!(q_dual > 1.0) || !std::isfinite(q_dual)) throw DomainError("dual exponent must satisfy 1 < q < inf");
  return DualVector(std::move(coords), Exponent(q_dual / (q_dual - 1.0)));
}

double power_norm(const Eigen::VectorXd& x, double r) {
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / m, r);
  return m * std::pow(s, 1.0 / r);
}

double lp_norm(const LpVector& x) { return power_norm(x.coords(), x.p()); }

double dual_norm(const DualVector& phi) { return power_norm(phi.coords(), phi.q()); }

double pairing(const DualVector& phi, const LpVector& x) {
  if (phi.dim() != x.dim()) throw SpaceMismatch("pairing: dimension mismatch");
  if (!(phi.primal_exponent() == x.exponent()))
    throw SpaceMismatch("pairing: functional is not from the dual of this space");
  return phi.coords().dot(x.coords());
}

DualVector duality_map(const LpVector& x) {
  return DualVector(normalized_power_map(x.coords(), x.p()), x.exponent());
}

LpVector inverse_duality_map(const DualVector& phi) {
  return LpVector(normalized_power_map(phi.coords(), phi.q()), phi.primal_exponent());
}

LpVector normalized(const LpVector& x) {
  const double n = lp_norm(x);
  if (n == 0.0) throw DomainError("cannot normalize the zero vector");
  return x / n;
}

double psi_smoothness(const LpVector& x, const LpVector& v) {
  require_same_space(x, v);
  require_unit(x, "x");
  require_unit(v, "v");
  return pairing(duality_map(x), v);
}

double psi_quotient(const LpVector& x, const LpVector& v, double t) {
  require_same_space(x, v);
  if (!(t > 0.0)) throw DomainError("step t must be positive");
  return (lp_norm(x + t * v) - lp_norm(x)) / t;
}

XiEstimate xi_smoothness(const LpVector& x, const LpVector& v, const StepSchedule& schedule) {
  require_same_space(x, v);
  require_unit(x, "x");
  require_unit(v, "v");
  const double base = pairing(duality_map(x), x);
  auto quotient = [&](double t) {
    Eigen::VectorXd q(1);
    q[0] = (pairing(duality_map(x + t * v), x) - base) / t;
    return q;
  };
  auto abs_norm = [](const Eigen::VectorXd& d) { return std::abs(d[0]); };
  const LimitEstimate lim = one_sided_limit(quotient, schedule, abs_norm);
  XiEstimate out;
  out.value = lim.value[0];
  out.converged = lim.converged;
  out.t_values = lim.t_values;
  out.quotients.reserve(lim.quotients.size());
  for (const auto& q : lim.quotients) out.quotients.push_back(q[0]);
  return out;
}

XiEstimate xi_smoothness(const LpVector& x, const LpVector& v) {
  return xi_smoothness(x, v, StepSchedule::dyadic());
}

}  // namespace banachproj
