#include "banachproj/moduli.hpp"

#include "banachproj/format.hpp"
#include "banachproj/projection_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

namespace banachproj {

namespace {

using Vec = Eigen::VectorXd;

Vec unit(const Vec& v, double p) { return v / power_norm(v, p); }

void require_grid(const std::vector<double>& grid, double hi, const char* what) {
  if (grid.empty()) throw DomainError(std::string(what) + " grid is empty");
  for (double g : grid)
    if (!(g > 0.0) || g > hi) throw DomainError(std::string(what) + " grid values must lie in (0, " + format_double(hi) + "]");
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError(std::string(what) + " grid must be increasing");
}

Vec gaussian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> N;
  Vec v(static_cast<Eigen::Index>(n));
  for (auto& c : v) c = N(rng);
  return v;
}

// Minimizes (or maximizes, via sign) an objective over a raw parameter
// vector: random sampling, then compass-search rounds from the incumbent.
class PairSearch {
 public:
  using Objective = std::function<std::optional<double>(const Vec&)>;
  using Sampler = std::function<Vec(std::mt19937_64&)>;

  PairSearch(Objective f, Sampler sample, std::size_t budget, int rounds)
      : f_(std::move(f)), sample_(std::move(sample)), budget_(budget), rounds_(rounds) {}

  double minimize(std::mt19937_64& rng) {
    const std::size_t sampling = std::max<std::size_t>(1, budget_ / 2);
    for (; evals_ < sampling; ++evals_) {
      Vec theta = sample_(rng);
      const auto v = f_(theta);
      if (v && *v < best_) {
        best_ = *v;
        arg_ = std::move(theta);
      }
    }
    if (!std::isfinite(best_)) return best_;
    for (int r = 0; r < rounds_; ++r) compass(0.2 * std::pow(0.1, r));
    return best_;
  }

  std::size_t evaluations() const { return evals_; }

 private:
  void compass(double step) {
    while (step > 1e-9 && evals_ < budget_) {
      bool improved = false;
      for (Eigen::Index i = 0; i < arg_.size() && evals_ < budget_; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vec trial = arg_;
          trial[i] += sgn * step;
          ++evals_;
          const auto v = f_(trial);
          if (v && *v < best_) {
            best_ = *v;
            arg_ = std::move(trial);
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
  }

  Objective f_;
  Sampler sample_;
  std::size_t budget_;
  int rounds_;
  std::size_t evals_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  Vec arg_;
};

// Runs body(j) for every grid index; index j always goes to worker j % threads.
void for_each_grid_point(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t j = 0; j < count; ++j) body(j);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t j = w; j < count; j += threads) body(j);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Unit pair (x, y) with ||x - y|| >= eps along y(s) = unit((1-s) x + s w),
// bisected to the smallest feasible s. Returns 1 - ||(x + y)/2||.
std::optional<double> delta_objective(const Vec& theta, double p, double eps) {
  const Eigen::Index n = theta.size() / 2;
  const Vec xr = theta.head(n), wr = theta.tail(n);
  const double nx = power_norm(xr, p), nw = power_norm(wr, p);
  if (!(nx > 0.0) || !(nw > 0.0)) return std::nullopt;
  const Vec x = xr / nx, w = wr / nw;
  auto y_at = [&](double s) -> std::optional<Vec> {
    const Vec raw = (1.0 - s) * x + s * w;
    const double nr = power_norm(raw, p);
    if (!(nr > 0.0)) return std::nullopt;
    return raw / nr;
  };
  auto gap = [&](double s) -> double {
    const auto y = y_at(s);
    return y ? power_norm(x - *y, p) : 2.0;
  };
  if (gap(1.0) < eps) return std::nullopt;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) >= eps) hi = mid;
    else lo = mid;
  }
  const auto y = y_at(hi);
  if (!y) return std::nullopt;
  return 1.0 - power_norm(0.5 * (x + *y), p);
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - xs.begin());
  if (k == 0) return ys.front();
  if (k == xs.size()) return ys.back();
  const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return ys[k - 1] + w * (ys[k] - ys[k - 1]);
}

}  // namespace

std::vector<double> default_moduli_grid() {
  std::vector<double> g;
  const int count = 24;
  for (int k = 0; k < count; ++k) g.push_back(0.01 * std::pow(200.0, static_cast<double>(k) / (count - 1)));
  g.back() = 2.0;
  return g;
}

ModuliEstimate estimate_delta(double p, std::size_t n, const std::vector<double>& eps_grid, const ModuliOptions& opts) {
  (void)Exponent(p);
  if (n < 2) throw DomainError("moduli need dimension n >= 2");
  require_grid(eps_grid, 2.0, "epsilon");

  ModuliEstimate est;
  est.p = p;
  est.n = n;
  est.epsilons = eps_grid;
  est.delta_values.assign(eps_grid.size(), 0.0);
  est.refinement_rounds = opts.refinement_rounds;
  std::vector<std::size_t> evals(eps_grid.size(), 0);

  for_each_grid_point(eps_grid.size(), opts.threads, [&](std::size_t j) {
    const double eps = eps_grid[j];
    std::seed_seq seq{opts.seed, std::uint64_t{0xde17a}, static_cast<std::uint64_t>(j)};
    std::mt19937_64 rng(seq);
    PairSearch search(
        [&](const Vec& theta) { return delta_objective(theta, p, eps); },
        [&](std::mt19937_64& g) {
          // w near -x with a random spread reaches every distance in (0, 2].
          const Vec x = unit(gaussian(g, n), p);
          const double spread = std::uniform_real_distribution<double>(0.0, 3.0)(g);
          Vec theta(2 * static_cast<Eigen::Index>(n));
          theta << x, -x + spread * gaussian(g, n);
          return theta;
        },
        opts.budget, opts.refinement_rounds);
    const double best = search.minimize(rng);
    est.delta_values[j] = std::isfinite(best) ? std::clamp(best, 0.0, 1.0) : 1.0;
    evals[j] = search.evaluations();
  });

  // delta(eps)/eps is nondecreasing, so any sampled value at eps_k also
  // bounds delta(eps_j) by est_k eps_j / eps_k for eps_j <= eps_k.
  for (std::size_t j = eps_grid.size(); j-- > 0;)
    for (std::size_t k = j + 1; k < eps_grid.size(); ++k)
      est.delta_values[j] = std::min(est.delta_values[j], est.delta_values[k] * eps_grid[j] / eps_grid[k]);

  for (auto e : evals) est.sample_count += e;
  return est;
}

ModuliEstimate estimate_rho(double p, std::size_t n, const std::vector<double>& t_grid, const ModuliOptions& opts) {
  (void)Exponent(p);
  if (n < 2) throw DomainError("moduli need dimension n >= 2");
  require_grid(t_grid, std::numeric_limits<double>::max(), "t");

  ModuliEstimate est;
  est.p = p;
  est.n = n;
  est.ts = t_grid;
  est.rho_values.assign(t_grid.size(), 0.0);
  est.refinement_rounds = opts.refinement_rounds;
  std::vector<std::size_t> evals(t_grid.size(), 0);
  const auto ni = static_cast<Eigen::Index>(n);

  for_each_grid_point(t_grid.size(), opts.threads, [&](std::size_t j) {
    const double t = t_grid[j];
    std::seed_seq seq{opts.seed, std::uint64_t{0x5700}, static_cast<std::uint64_t>(j)};
    std::mt19937_64 rng(seq);
    PairSearch search(
        [&](const Vec& theta) -> std::optional<double> {
          const double nx = power_norm(theta.head(ni), p), ny = power_norm(theta.tail(ni), p);
          if (!(nx > 0.0) || !(ny > 0.0)) return std::nullopt;
          const Vec x = theta.head(ni) / nx;
          const Vec y = (t / ny) * theta.tail(ni);
          return 1.0 - 0.5 * (power_norm(x + y, p) + power_norm(x - y, p));
        },
        [&](std::mt19937_64& g) {
          Vec theta(2 * ni);
          theta << unit(gaussian(g, n), p), unit(gaussian(g, n), p);
          return theta;
        },
        opts.budget, opts.refinement_rounds);
    const double best = -search.minimize(rng);
    est.rho_values[j] = std::isfinite(best) ? std::clamp(best, 0.0, t) : 0.0;
    evals[j] = search.evaluations();
  });

  // rho is convex with rho(0) = 0, so rho(t_k) >= rho(t_j) t_k / t_j for t_j <= t_k.
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    for (std::size_t j = 0; j < k; ++j)
      est.rho_values[k] = std::min(t_grid[k], std::max(est.rho_values[k], est.rho_values[j] * t_grid[k] / t_grid[j]));

  for (auto e : evals) est.sample_count += e;
  return est;
}

ModuliEstimate estimate_moduli(double p, std::size_t n, const std::vector<double>& eps_grid,
                               const std::vector<double>& t_grid, const ModuliOptions& opts, double fit_lo,
                               double fit_hi) {
  ModuliEstimate est = estimate_delta(p, n, eps_grid, opts);
  const ModuliEstimate rho = estimate_rho(p, n, t_grid, opts);
  est.ts = rho.ts;
  est.rho_values = rho.rho_values;
  est.sample_count += rho.sample_count;
  fit_power_type(est, fit_lo, fit_hi);
  return est;
}

PowerFit fit_power_law(const std::vector<double>& args, const std::vector<double>& values, double lo, double hi) {
  if (args.size() != values.size()) throw DomainError("fit needs matching argument and value lists");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] < lo || args[i] > hi) continue;
    if (!(values[i] > 0.0)) throw DomainError("fit window contains a nonpositive value");
    lx.push_back(std::log(args[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 4) throw DomainError("fit needs at least 4 grid points in the window");
  const auto m = static_cast<Eigen::Index>(lx.size());
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = lx[static_cast<std::size_t>(i)];
    b[i] = ly[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  const double rms = std::sqrt((A * coef - b).squaredNorm() / static_cast<double>(m));
  return PowerFit{std::exp(coef[0]), coef[1], rms, lx.size()};
}

void fit_power_type(ModuliEstimate& est, double lo, double hi) {
  est.convexity = fit_power_law(est.epsilons, est.delta_values, lo, hi);
  est.smoothness = fit_power_law(est.ts, est.rho_values, lo, hi);
}

double delta_lower_envelope(const ModuliEstimate& est, double eps) {
  if (est.epsilons.empty()) throw DomainError("estimate has no delta grid");
  if (eps <= 0.0) return 0.0;
  if (eps < est.epsilons.front()) {
    const double fit = est.convexity.constant * std::pow(eps, est.convexity.exponent);
    const double linear = est.delta_values.front() * eps / est.epsilons.front();
    return 0.9 * std::min(fit, linear);
  }
  return 0.9 * interp(est.epsilons, est.delta_values, eps);
}

double delta_inverse_conservative(const ModuliEstimate& est, double s) {
  if (est.epsilons.empty()) throw DomainError("estimate has no delta grid");
  if (s <= 0.0) return 0.0;
  const double top = 0.9 * est.delta_values.back();
  if (s > top) throw DomainError("argument " + format_double(s) + " of the inverse modulus exceeds the estimated range");
  // Largest eps whose envelope is <= s: scan segments from the top.
  const auto& e = est.epsilons;
  std::vector<double> d(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) d[i] = 0.9 * est.delta_values[i];
  for (std::size_t k = e.size() - 1; k > 0; --k) {
    if (d[k - 1] <= s) {
      if (d[k] <= s) return e[k];
      return e[k - 1] + (e[k] - e[k - 1]) * (s - d[k - 1]) / (d[k] - d[k - 1]);
    }
  }
  // Below the grid: invert the smaller of the fit curve and the chord to the origin.
  double lo = 0.0, hi = e.front();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (delta_lower_envelope(est, mid) <= s) lo = mid;
    else hi = mid;
  }
  return lo;
}

double rho_upper_envelope(const ModuliEstimate& est, double t) {
  if (est.ts.empty()) throw DomainError("estimate has no rho grid");
  if (t <= 0.0) return 0.0;
  double raw;
  if (t < est.ts.front()) raw = est.rho_values.front() * t / est.ts.front();
  else if (t > est.ts.back()) raw = est.rho_values.back() * t / est.ts.back();
  else raw = interp(est.ts, est.rho_values, t);
  return std::min(t, 1.1 * raw);
}

AlberReport alber_bound_check(const ConvexSet& c, const std::vector<std::pair<LpVector, LpVector>>& pairs,
                              const ModuliEstimate& est) {
  AlberReport report;
  for (const auto& [x, y] : pairs) {
    require_in_space(c, x);
    require_in_space(c, y);
    const LpVector px = project(c, x);
    const LpVector py = project(c, y);
    AlberCheck check;
    check.lhs = lp_norm(px - py);
    check.k = 2.0 * std::max({1.0, lp_norm(x - py), lp_norm(px - y)});
    const double d = lp_norm(x - y);
    check.rhs = d == 0.0 ? 0.0 : check.k * delta_inverse_conservative(est, 6.0 * rho_upper_envelope(est, 2.0 * d));
    check.violated = check.lhs > check.rhs + 1e-12 * std::max(1.0, check.rhs);
    if (check.violated) ++report.violations;
    report.checks.push_back(check);
  }
  report.anomaly_rate = pairs.empty() ? 0.0 : static_cast<double>(report.violations) / static_cast<double>(pairs.size());
  return report;
}

std::string moduli_csv(const ModuliEstimate& est) {
  std::ostringstream out;
  out << "kind,argument,value\n";
  for (std::size_t i = 0; i < est.epsilons.size(); ++i)
    out << "delta," << format_double(est.epsilons[i]) << ',' << format_double(est.delta_values[i]) << '\n';
  for (std::size_t i = 0; i < est.ts.size(); ++i)
    out << "rho," << format_double(est.ts[i]) << ',' << format_double(est.rho_values[i]) << '\n';
  return out.str();
}

}  // namespace banachproj
