#include "banachproj/linear_program.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace banachproj::lp {

namespace {

constexpr double kEps = 1e-11;

// Tableau simplex with an auxiliary column for phase 1. Entering columns are
// chosen by most negative reduced cost with index tie-breaks; leaving rows by
// the minimum ratio with index tie-breaks.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        basis_(m_),
        nonbasis_(n_ + 1),
        d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) d_[i][j] = A(i, j);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      d_[i][n_] = -1.0;
      d_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      d_[m_][j] = -c[j];
    }
    nonbasis_[n_] = -1;
    d_[m_ + 1][n_] = 1.0;
  }

  Solution solve() {
    Solution out;
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!run(1) || d_[m_ + 1][n_ + 1] < -kEps) {
        out.status = Status::Infeasible;
        return out;
      }
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j)
          if (s == -1 || d_[i][j] < d_[i][s] || (d_[i][j] == d_[i][s] && nonbasis_[j] < nonbasis_[s])) s = j;
        pivot(i, s);
      }
    }
    if (!run(2)) {
      out.status = Status::Unbounded;
      return out;
    }
    out.status = Status::Optimal;
    out.x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) out.x[basis_[i]] = d_[i][n_ + 1];
    out.objective = d_[m_][n_ + 1];
    return out;
  }

 private:
  void pivot(int r, int s) {
    const double inv = 1.0 / d_[r][s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = d_[i][s] * inv;
      if (f == 0.0) continue;
      for (int j = 0; j < n_ + 2; ++j)
        if (j != s) d_[i][j] -= d_[r][j] * f;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) d_[r][j] *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) d_[i][s] *= -inv;
    d_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool run(int phase) {
    const int x = phase == 1 ? m_ + 1 : m_;
    for (int guard = 0; guard < 50000; ++guard) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (s == -1 || d_[x][j] < d_[x][s] || (d_[x][j] == d_[x][s] && nonbasis_[j] < nonbasis_[s])) s = j;
      }
      if (d_[x][s] > -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_[i][s] < kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = d_[i][n_ + 1] / d_[i][s];
        const double rhs = d_[r][n_ + 1] / d_[r][s];
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    return true;
  }

  int m_, n_;
  std::vector<int> basis_, nonbasis_;
  std::vector<std::vector<double>> d_;
};

}  // namespace

Solution maximize_nonneg(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  return Tableau(A, b, c).solve();
}

Solution maximize_free(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const Eigen::Index n = c.size();
  Eigen::MatrixXd split(A.rows(), 2 * n);
  split << A, -A;
  Eigen::VectorXd c2(2 * n);
  c2 << c, -c;
  Solution s = maximize_nonneg(split, b, c2);
  if (s.status == Status::Optimal) s.x = (s.x.head(n) - s.x.tail(n)).eval();
  return s;
}

Solution maximize_boxed(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const Eigen::Index n = c.size();
  const Eigen::Index m = A.rows();
  // Shift x = lo + s with 0 <= s <= hi - lo.
  Eigen::MatrixXd A2(m + n, n);
  A2 << A, Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b2(m + n);
  b2 << b - A * lo, hi - lo;
  Solution s = maximize_nonneg(A2, b2, c);
  if (s.status == Status::Optimal) {
    s.x = (lo + s.x).eval();
    s.objective += c.dot(lo);
  }
  return s;
}

}  // namespace banachproj::lp
