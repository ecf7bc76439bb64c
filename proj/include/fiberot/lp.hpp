#pragma once

#include <string>
#include <vector>

namespace fiberot::lp {

/// min c^T x  subject to  A x = b, x >= 0, with A stored by sparse columns.
struct Problem {
  int rows = 0;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<int> col_start{0};
  std::vector<int> row_index;
  std::vector<double> value;

  int cols() const { return static_cast<int>(c.size()); }

  /// Appends a column; returns its index.
  int add_column(double cost, const std::vector<std::pair<int, double>>& entries);
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Options {
  int max_iterations = 200000;
  int refactor_every = 64;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-11;
  double pivot_tol = 1e-10;
};

struct Solution {
  Status status = Status::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  /// Row duals: A^T y <= c at optimality, objective = b^T y.
  std::vector<double> y;
  int iterations = 0;
};

/// Two-phase revised simplex with a dense basis inverse (Eigen LU
/// refactorization, product-form updates in between).
Solution solve(const Problem& problem, const Options& options = {});

std::string to_string(Status status);

}  // namespace fiberot::lp
