#pragma once

#include <span>
#include <vector>

namespace f1grasp::lp {

/// Dense row-major matrix for small linear programs.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Result {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  /// Phase-one residual: sum of artificial variables at the end of phase one.
  double infeasibility = 0.0;
  int iterations = 0;
};

struct Options {
  double pivot_tol = 1e-11;
  double feasibility_tol = 1e-9;
  int max_iterations = 5000;
};

/// minimize c.x subject to A x = b, x >= 0 (two-phase simplex, Bland's rule).
/// An empty `c` solves the feasibility problem only.
Result solve(const Matrix& A, std::span<const double> b, std::span<const double> c = {},
             const Options& opts = {});

/// True iff {x >= 0 : A x = b} is non-empty.
bool feasible(const Matrix& A, std::span<const double> b, const Options& opts = {});

}  // namespace f1grasp::lp
