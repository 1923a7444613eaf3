#pragma once

// One-sided finite-difference machinery: step schedules, the generic t -> 0+
// limit detector with a single Richardson step, difference quotients of
// projectors, and Cauchy-rate probes of those quotients.

#include "banachproj/lp_space.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace banachproj {

struct StepSchedule {
  std::vector<double> t_values;  // strictly decreasing, positive
  double quotient_tol = 1e-7;
  int window = 3;

  /// t_k = 2^-k for k = k_first..k_last.
  static StepSchedule dyadic(int k_first = 8, int k_last = 30, double quotient_tol = 1e-7,
                             int window = 3);

  /// Throws DomainError unless t_values is nonempty, positive and strictly
  /// decreasing, and window >= 2.
  void validate() const;

  /// Drops steps below t_min (keeps at least the first step).
  StepSchedule truncated(double t_min) const;
};

/// Result of driving a vector-valued quotient sequence to its t -> 0+ limit.
struct LimitEstimate {
  Eigen::VectorXd value;
  bool converged = false;
  bool extrapolated = false;     // Richardson value used
  std::size_t steps_used = 0;    // quotients evaluated
  std::vector<double> t_values;  // trace
  std::vector<Eigen::VectorXd> quotients;
};

/// Evaluates `quotient(t)` along the schedule and stops at the first run of
/// `window` consecutive values whose pairwise differences (in the supplied
/// norm, scaled by max(1, |q|)) are below quotient_tol. The returned value is
/// 2 q(t/2) - q(t) over the final pair, unless that disagrees with the raw
/// final quotient by more than 10 quotient_tol.
LimitEstimate one_sided_limit(const std::function<Eigen::VectorXd(double)>& quotient,
                              const StepSchedule& schedule,
                              const std::function<double(const Eigen::VectorXd&)>& norm);

using Projector = std::function<LpVector(const LpVector&)>;

/// (P(x + tv) - P(x)) / t.
LpVector diff_quotient(const Projector& projector, const LpVector& x, const LpVector& v, double t);

struct NumDiffResult {
  LpVector estimate;
  bool converged = false;
  bool extrapolated = false;
  std::vector<double> t_values;
  std::vector<LpVector> quotients;
};

/// Directional derivative estimate of `projector` at x along v. When the
/// projector is only accurate to `projector_tol`, the schedule is cut at
/// t_min = sqrt(projector_tol) so quotients do not difference solver noise.
NumDiffResult numdiff_derivative(const Projector& projector, const LpVector& x, const LpVector& v,
                                 const StepSchedule& schedule,
                                 std::optional<double> projector_tol = std::nullopt);
NumDiffResult numdiff_derivative(const Projector& projector, const LpVector& x, const LpVector& v);

struct RatePair {
  std::size_t direction_id = 0;
  double t = 0.0;  // larger step
  double s = 0.0;  // smaller step
  double deviation = 0.0;
};

struct RateReport {
  std::vector<RatePair> pairs;
  /// Exponent alpha of deviation ~ c t^alpha from a log-log fit over pairs
  /// with positive deviation; NaN if fewer than 3 such pairs.
  double fitted_order = 0.0;
  double fitted_constant = 0.0;
  /// Sup over directions of the deviation at each consecutive schedule pair.
  std::vector<double> uniform_sup_trace;
  /// Sup over directions at the tail pair.
  double uniform_sup = 0.0;
  /// Rounding floor of a quotient at each pair: 64 eps (1 + |x| + |P x|) / s.
  std::vector<double> noise_floor;
  /// Enlarged distance constant 2 max{1, sup |P(x+tv) - (x+sv)|, ...} over the
  /// sampled s < t pairs and directions.
  double k_enlarged = 0.0;
};

/// Tabulates |D_t - D_s| for consecutive schedule pairs s < t, for every
/// direction (each must be a unit vector). Directions are evaluated
/// independently; the reduction order is fixed so the report does not depend
/// on thread count.
RateReport cauchy_rate_probe(const Projector& projector, const LpVector& x,
                             const std::vector<LpVector>& directions, const StepSchedule& schedule,
                             unsigned threads = 1);

/// True when the uniform_sup trace is non-increasing over the last
/// `tail_pairs` pairs, allowing 10% growth plus the rounding floor.
bool tail_non_increasing(const RateReport& report, std::size_t tail_pairs);

}  // namespace banachproj
