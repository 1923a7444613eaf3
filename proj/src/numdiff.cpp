#include "banachproj/numdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace banachproj {

StepSchedule StepSchedule::dyadic(int k_first, int k_last, double quotient_tol, int window) {
  StepSchedule s;
  for (int k = k_first; k <= k_last; ++k) s.t_values.push_back(std::ldexp(1.0, -k));
  s.quotient_tol = quotient_tol;
  s.window = window;
  s.validate();
  return s;
}

void StepSchedule::validate() const {
  if (t_values.empty()) throw DomainError("step schedule is empty");
  if (window < 2) throw DomainError("step schedule window must be at least 2");
  if (!(quotient_tol > 0.0)) throw DomainError("quotient tolerance must be positive");
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] > 0.0)) throw DomainError("step schedule values must be positive");
    if (i > 0 && !(t_values[i] < t_values[i - 1]))
      throw DomainError("step schedule must be strictly decreasing");
  }
}

StepSchedule StepSchedule::truncated(double t_min) const {
  StepSchedule s = *this;
  s.t_values.clear();
  for (double t : t_values)
    if (t >= t_min || s.t_values.empty()) s.t_values.push_back(t);
  return s;
}

LimitEstimate one_sided_limit(const std::function<Eigen::VectorXd(double)>& quotient,
                              const StepSchedule& schedule,
                              const std::function<double(const Eigen::VectorXd&)>& norm) {
  schedule.validate();
  LimitEstimate out;
  const auto w = static_cast<std::size_t>(schedule.window);
  auto close = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double scale = std::max({1.0, norm(a), norm(b)});
    return norm(a - b) < schedule.quotient_tol * scale;
  };

  for (double t : schedule.t_values) {
    out.t_values.push_back(t);
    out.quotients.push_back(quotient(t));
    ++out.steps_used;
    const std::size_t m = out.quotients.size();
    if (m < w) continue;
    bool agree = true;
    for (std::size_t i = m - w; i < m && agree; ++i)
      for (std::size_t j = i + 1; j < m && agree; ++j) agree = close(out.quotients[i], out.quotients[j]);
    if (agree) {
      out.converged = true;
      break;
    }
  }

  const Eigen::VectorXd& last = out.quotients.back();
  out.value = last;
  if (out.converged && out.quotients.size() >= 2) {
    const std::size_t m = out.quotients.size();
    const double ratio = out.t_values[m - 2] / out.t_values[m - 1];
    // Richardson for error linear in t: (r q(t/r) - q(t)) / (r - 1).
    const Eigen::VectorXd rich = (ratio * last - out.quotients[m - 2]) / (ratio - 1.0);
    const double scale = std::max(1.0, norm(last));
    if (norm(rich - last) <= 10.0 * schedule.quotient_tol * scale) {
      out.value = rich;
      out.extrapolated = true;
    }
  }
  return out;
}

LpVector diff_quotient(const Projector& projector, const LpVector& x, const LpVector& v, double t) {
  require_same_space(x, v);
  if (!(t > 0.0)) throw DomainError("step t must be positive");
  if (v.is_zero()) throw DomainError("direction must be nonzero");
  return (projector(x + t * v) - projector(x)) / t;
}

NumDiffResult numdiff_derivative(const Projector& projector, const LpVector& x, const LpVector& v,
                                 const StepSchedule& schedule, std::optional<double> projector_tol) {
  require_same_space(x, v);
  if (v.is_zero()) throw DomainError("direction must be nonzero");
  StepSchedule sched = schedule;
  if (projector_tol) sched = schedule.truncated(std::sqrt(*projector_tol));

  const LpVector base = projector(x);
  const Exponent p = x.exponent();
  auto quotient = [&](double t) -> Eigen::VectorXd {
    return ((projector(x + t * v) - base) / t).coords();
  };
  auto norm = [&](const Eigen::VectorXd& d) { return power_norm(d, p.value()); };
  LimitEstimate lim = one_sided_limit(quotient, sched, norm);

  std::vector<LpVector> quotients;
  quotients.reserve(lim.quotients.size());
  for (auto& q : lim.quotients) quotients.emplace_back(std::move(q), p);
  return NumDiffResult{LpVector(lim.value, p), lim.converged, lim.extrapolated, std::move(lim.t_values),
                       std::move(quotients)};
}

NumDiffResult numdiff_derivative(const Projector& projector, const LpVector& x, const LpVector& v) {
  return numdiff_derivative(projector, x, v, StepSchedule::dyadic());
}

namespace {

struct DirectionTrace {
  std::vector<double> deviations;
  std::vector<double> floors;
  double k_sup = 0.0;
};

DirectionTrace probe_direction(const Projector& projector, const LpVector& x, const LpVector& base,
                               const LpVector& v, const StepSchedule& schedule) {
  DirectionTrace tr;
  const auto& ts = schedule.t_values;
  std::vector<LpVector> images;
  images.reserve(ts.size());
  for (double t : ts) images.push_back(projector(x + t * v));

  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = 1.0 + lp_norm(x) + lp_norm(base);
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double t = ts[k];
    const double s = ts[k + 1];
    const LpVector dt = (images[k] - base) / t;
    const LpVector ds = (images[k + 1] - base) / s;
    tr.deviations.push_back(lp_norm(dt - ds));
    tr.floors.push_back(64.0 * eps * scale / s);
  }
  // Enlarged constant: sups over the sampled s < t of the four distances.
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const LpVector xs = x + ts[i] * v;
    tr.k_sup = std::max({tr.k_sup, lp_norm(images[i] - x), lp_norm(xs - base)});
    for (std::size_t j = 0; j < i; ++j) {
      const LpVector xt = x + ts[j] * v;
      tr.k_sup = std::max({tr.k_sup, lp_norm(images[j] - xs), lp_norm(xt - images[i])});
    }
  }
  return tr;
}

}  // namespace

RateReport cauchy_rate_probe(const Projector& projector, const LpVector& x,
                             const std::vector<LpVector>& directions, const StepSchedule& schedule,
                             unsigned threads) {
  schedule.validate();
  if (directions.empty()) throw DomainError("rate probe needs at least one direction");
  for (const auto& v : directions) {
    require_same_space(x, v);
    if (std::abs(lp_norm(v) - 1.0) > kSphereTol) throw DomainError("rate probe directions must be unit vectors");
  }
  if (schedule.t_values.size() < 4) throw DomainError("rate probe needs at least 3 schedule pairs");

  const LpVector base = projector(x);
  std::vector<DirectionTrace> traces(directions.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(directions.size())));
  if (threads == 1) {
    for (std::size_t d = 0; d < directions.size(); ++d)
      traces[d] = probe_direction(projector, x, base, directions[d], schedule);
  } else {
    // Direction d is owned by worker d % threads; results land in fixed slots.
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t d = w; d < directions.size(); d += threads)
          traces[d] = probe_direction(projector, x, base, directions[d], schedule);
      });
    }
    for (auto& th : pool) th.join();
  }

  RateReport rep;
  const std::size_t npairs = schedule.t_values.size() - 1;
  rep.uniform_sup_trace.assign(npairs, 0.0);
  rep.noise_floor.assign(npairs, 0.0);
  double ksup = 1.0;
  for (std::size_t d = 0; d < directions.size(); ++d) {
    const auto& tr = traces[d];
    for (std::size_t k = 0; k < npairs; ++k) {
      rep.pairs.push_back({d, schedule.t_values[k], schedule.t_values[k + 1], tr.deviations[k]});
      rep.uniform_sup_trace[k] = std::max(rep.uniform_sup_trace[k], tr.deviations[k]);
      rep.noise_floor[k] = std::max(rep.noise_floor[k], tr.floors[k]);
    }
    ksup = std::max(ksup, tr.k_sup);
  }
  rep.uniform_sup = rep.uniform_sup_trace.back();
  rep.k_enlarged = 2.0 * ksup;

  // log(dev) = log(c) + alpha log(t), least squares over positive deviations.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (const auto& pr : rep.pairs) {
    if (!(pr.deviation > 0.0)) continue;
    const double lx = std::log(pr.t);
    const double ly = std::log(pr.deviation);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  if (m >= 3 && std::abs(denom) > 0.0) {
    rep.fitted_order = (static_cast<double>(m) * sxy - sx * sy) / denom;
    rep.fitted_constant = std::exp((sy - rep.fitted_order * sx) / static_cast<double>(m));
  } else {
    rep.fitted_order = std::numeric_limits<double>::quiet_NaN();
    rep.fitted_constant = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

bool tail_non_increasing(const RateReport& report, std::size_t tail_pairs) {
  const auto& sup = report.uniform_sup_trace;
  if (sup.size() < 2) return true;
  const std::size_t start = sup.size() > tail_pairs ? sup.size() - tail_pairs : 0;
  for (std::size_t k = start + 1; k < sup.size(); ++k)
    if (sup[k] > 1.1 * sup[k - 1] + report.noise_floor[k]) return false;
  return true;
}

}  // namespace banachproj
