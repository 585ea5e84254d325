#include "f1grasp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace f1grasp::lp {

namespace {

// Tableau with m constraint rows and one objective row; last column is the rhs.
class Tableau {
 public:
  Tableau(int m, int n) : m_(m), n_(n), t_(static_cast<std::size_t>(m + 1) * (n + 1), 0.0), basis_(m, -1) {}

  double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * (n_ + 1) + c]; }
  double at(int r, int c) const { return t_[static_cast<std::size_t>(r) * (n_ + 1) + c]; }
  double& rhs(int r) { return at(r, n_); }
  double& cost(int c) { return at(m_, c); }
  int m() const { return m_; }
  int n() const { return n_; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int row, int col) {
    const double p = at(row, col);
    for (int c = 0; c <= n_; ++c) at(row, c) /= p;
    for (int r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const double f = at(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c <= n_; ++c) at(r, c) -= f * at(row, c);
    }
    basis_[row] = col;
  }

  // Runs primal simplex on columns [0, allowed). Returns false when unbounded.
  Status optimize(int allowed, const Options& opts, int& iterations) {
    while (true) {
      if (iterations >= opts.max_iterations) return Status::iteration_limit;
      int enter = -1;
      for (int c = 0; c < allowed; ++c) {
        if (cost(c) < -opts.pivot_tol) {
          enter = c;  // Bland: lowest index
          break;
        }
      }
      if (enter < 0) return Status::optimal;
      int leave = -1;
      double best = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= opts.pivot_tol) continue;
        const double ratio = rhs(r) / a;
        if (leave < 0 || ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return Status::unbounded;
      pivot(leave, enter);
      ++iterations;
    }
  }

 private:
  int m_;
  int n_;
  std::vector<double> t_;
  std::vector<int> basis_;
};

}  // namespace

Result solve(const Matrix& A, std::span<const double> b, std::span<const double> c, const Options& opts) {
  const int m = A.rows;
  const int n = A.cols;
  if (static_cast<int>(b.size()) != m) throw std::invalid_argument("lp: rhs size mismatch");
  if (!c.empty() && static_cast<int>(c.size()) != n) throw std::invalid_argument("lp: cost size mismatch");

  Result result;
  // Columns: n structural, m artificial.
  Tableau tab(m, n + m);
  double scale = 1.0;
  for (int r = 0; r < m; ++r) {
    const double sign = b[static_cast<std::size_t>(r)] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) tab.at(r, j) = sign * A(r, j);
    tab.at(r, n + r) = 1.0;
    tab.rhs(r) = sign * b[static_cast<std::size_t>(r)];
    scale = std::max(scale, std::abs(b[static_cast<std::size_t>(r)]));
    tab.basis()[r] = n + r;
  }
  // Phase one: minimize the sum of artificials, priced out against the basis.
  for (int j = 0; j <= n + m; ++j) {
    double s = 0.0;
    if (j < n || j == n + m) {
      for (int r = 0; r < m; ++r) s += (j == n + m) ? tab.rhs(r) : tab.at(r, j);
      tab.at(m, j) = -s;
    }
  }
  Status st = tab.optimize(n + m, opts, result.iterations);
  if (st == Status::iteration_limit) {
    result.status = st;
    return result;
  }
  result.infeasibility = -tab.at(m, n + m);
  if (result.infeasibility > opts.feasibility_tol * scale) {
    result.status = Status::infeasible;
    return result;
  }
  // Drive remaining artificials out of the basis where possible.
  for (int r = 0; r < m; ++r) {
    if (tab.basis()[r] < n) continue;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tab.at(r, j)) > opts.pivot_tol) {
        tab.pivot(r, j);
        break;
      }
    }
  }

  // Phase two over the structural columns.
  for (int j = 0; j <= n + m; ++j) tab.at(m, j) = 0.0;
  if (!c.empty()) {
    for (int j = 0; j < n; ++j) tab.at(m, j) = c[static_cast<std::size_t>(j)];
    for (int r = 0; r < m; ++r) {
      const int bj = tab.basis()[r];
      if (bj >= n) continue;
      const double f = tab.at(m, bj);
      if (f == 0.0) continue;
      for (int j = 0; j <= n + m; ++j) tab.at(m, j) -= f * tab.at(r, j);
    }
    st = tab.optimize(n, opts, result.iterations);
    if (st != Status::optimal) {
      result.status = st;
      return result;
    }
  }

  result.status = Status::optimal;
  result.x.assign(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < m; ++r) {
    const int bj = tab.basis()[r];
    if (bj < n) result.x[static_cast<std::size_t>(bj)] = std::max(0.0, tab.rhs(r));
  }
  double obj = 0.0;
  for (int j = 0; j < n && !c.empty(); ++j) obj += c[static_cast<std::size_t>(j)] * result.x[static_cast<std::size_t>(j)];
  result.objective = obj;
  return result;
}

bool feasible(const Matrix& A, std::span<const double> b, const Options& opts) {
  return solve(A, b, {}, opts).status == Status::optimal;
}

}  // namespace f1grasp::lp
