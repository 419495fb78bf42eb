#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

namespace ibtree {

enum class RowSense { kLessEqual, kGreaterEqual, kEqual };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

const char* to_string(LpStatus status);

// minimize c'x  subject to  A_i x (sense_i) b_i,  lower <= x <= upper.
// Bounds may be infinite.
struct LinearProgram {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  std::vector<RowSense> sense;
  Eigen::VectorXd c;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-10;
  double optimality_tolerance = 1e-11;
  double feasibility_tolerance = 1e-9;
  // Eta updates kept before the basis is factorized afresh.
  int refactor_interval = 16;
  // Consecutive degenerate pivots tolerated before switching to Bland's rule.
  int degenerate_limit = 50;
  long max_iterations = 1000000;
};

struct SimplexResult {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  // Row multipliers: y_i = d(objective) / d(b_i).  Non-negative on binding
  // >= rows, non-positive on binding <= rows.
  Eigen::VectorXd y;
  double objective = 0.0;
  long iterations = 0;
};

// Two-phase bounded-variable revised simplex.  Each row gets a slack
// (A_i x + s_i = b_i); artificials are added only for rows the starting
// point violates.  The basis is held as a sparse LU factorization plus
// product-form updates.  Pricing is Dantzig's rule; a long run of degenerate
// pivots switches to Bland's rule until the objective moves again.
// Deterministic.
SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace ibtree
