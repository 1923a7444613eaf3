#pragma once

// Sampled moduli of convexity and smoothness of l_p^n, their power-type
// fits, and the Alber distance estimate for the metric projection.

#include "banachproj/convex_sets.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace banachproj {

struct ModuliOptions {
  /// Pair evaluations per grid point, shared between sampling and refinement.
  std::size_t budget = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  int refinement_rounds = 3;
};

/// value ~ constant * arg^exponent, fitted in log-log space.
struct PowerFit {
  double constant = 0.0;
  double exponent = 0.0;
  double rms = 0.0;
  std::size_t points = 0;
};

struct ModuliEstimate {
  double p = 2.0;
  std::size_t n = 2;
  std::vector<double> epsilons;
  /// Upper bounds on delta: every value is attained by a sampled pair.
  std::vector<double> delta_values;
  std::vector<double> ts;
  /// Lower bounds on rho.
  std::vector<double> rho_values;
  PowerFit convexity;
  PowerFit smoothness;
  std::size_t sample_count = 0;
  int refinement_rounds = 0;
};

/// Geometric grid from 0.01 to 2 with 24 points.
std::vector<double> default_moduli_grid();

ModuliEstimate estimate_delta(double p, std::size_t n, const std::vector<double>& eps_grid,
                              const ModuliOptions& opts = {});
ModuliEstimate estimate_rho(double p, std::size_t n, const std::vector<double>& t_grid,
                            const ModuliOptions& opts = {});

/// Both moduli on their grids plus the power-type fits over [fit_lo, fit_hi].
ModuliEstimate estimate_moduli(double p, std::size_t n, const std::vector<double>& eps_grid,
                               const std::vector<double>& t_grid, const ModuliOptions& opts = {},
                               double fit_lo = 0.02, double fit_hi = 0.2);

/// Log-log least squares of values against args restricted to [lo, hi].
/// Throws DomainError with fewer than 4 points or nonpositive values there.
PowerFit fit_power_law(const std::vector<double>& args, const std::vector<double>& values, double lo, double hi);

/// Fills est.convexity and est.smoothness.
void fit_power_type(ModuliEstimate& est, double lo = 0.02, double hi = 0.2);

/// 0.9 x the piecewise-linear delta estimate; 0.9 x the convexity fit below the grid.
double delta_lower_envelope(const ModuliEstimate& est, double eps);
/// Largest eps with delta_lower_envelope(eps) <= s. Throws DomainError
/// when s exceeds the envelope at the top of the grid.
double delta_inverse_conservative(const ModuliEstimate& est, double s);
/// min(t, 1.1 x the piecewise-linear rho estimate), linear from 0 below the grid.
double rho_upper_envelope(const ModuliEstimate& est, double t);

struct AlberCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double k = 0.0;
  bool violated = false;
};

struct AlberReport {
  std::vector<AlberCheck> checks;
  std::size_t violations = 0;
  double anomaly_rate = 0.0;
};

/// ||P x - P y|| <= k delta^-1(6 rho(2 ||x - y||)) with
/// k = 2 max{1, ||x - P y||, ||P x - y||}, evaluated on the conservative envelopes.
AlberReport alber_bound_check(const ConvexSet& c, const std::vector<std::pair<LpVector, LpVector>>& pairs,
                              const ModuliEstimate& est);

/// CSV with header "kind,argument,value": delta rows then rho rows.
std::string moduli_csv(const ModuliEstimate& est);

}  // namespace banachproj
