#pragma once

// Reference computations for the tests, written directly from the
// definitions in long double and sharing no code with the library.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;

inline long double norm(const Vec& x, double p) {
  long double s = 0.0L;
  for (double c : x) s += std::pow(std::fabs(static_cast<long double>(c)), static_cast<long double>(p));
  return std::pow(s, 1.0L / p);
}

inline long double dist(const Vec& a, const Vec& b, double p) { return norm(a - b, p); }

/// Normalized duality map from its defining formula.
inline Vec duality(const Vec& x, double p) {
  const long double nx = norm(x, p);
  Vec out = Vec::Zero(x.size());
  if (nx == 0.0L) return out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const long double a = std::fabs(static_cast<long double>(x[i]));
    const long double mag = std::pow(a, static_cast<long double>(p) - 1.0L) / std::pow(nx, p - 2.0L);
    out[i] = static_cast<double>(x[i] < 0 ? -mag : mag);
  }
  return out;
}

inline long double dot(const Vec& a, const Vec& b) {
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return s;
}

/// Radial retraction onto the ball, the nearest point in any l_p norm.
inline Vec ball_projection(const Vec& c, double r, const Vec& x, double p) {
  const long double d = dist(x, c, p);
  if (d <= r) return x;
  return c + static_cast<double>(r / d) * (x - c);
}

/// Golden-section minimizer of a unimodal f on [a, b].
inline double golden_min(const std::function<long double(double)>& f, double a, double b, int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  long double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Smallest distance from x to a grid point of spacing h inside `box`
/// (axis-aligned, lo..hi per coordinate) accepted by `member`.
inline long double grid_min_distance(const Vec& x, const Vec& lo, const Vec& hi, double h,
                                     const std::function<bool(const Vec&)>& member, double p,
                                     Vec* argmin = nullptr) {
  const Eigen::Index n = x.size();
  std::vector<long> counts(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) counts[static_cast<std::size_t>(i)] = static_cast<long>(std::floor((hi[i] - lo[i]) / h)) + 1;
  std::vector<long> idx(static_cast<std::size_t>(n), 0);
  long double best = std::numeric_limits<long double>::infinity();
  Vec z(n);
  for (;;) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = lo[i] + h * static_cast<double>(idx[static_cast<std::size_t>(i)]);
    if (member(z)) {
      const long double d = dist(x, z, p);
      if (d < best) {
        best = d;
        if (argmin) *argmin = z;
      }
    }
    Eigen::Index k = 0;
    while (k < n && ++idx[static_cast<std::size_t>(k)] == counts[static_cast<std::size_t>(k)]) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }
  return best;
}

/// Hilbert moduli.
inline double hilbert_delta(double eps) { return 1.0 - std::sqrt(1.0 - eps * eps / 4.0); }
inline double hilbert_rho(double t) { return std::sqrt(1.0 + t * t) - 1.0; }

}  // namespace oracle
