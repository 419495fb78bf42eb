#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ibtree/information.hpp"
#include "ibtree/quadtree.hpp"
#include "ibtree/simplex.hpp"

namespace ibtree {

// The tree-selection integer program
//   min z'dx  s.t.  z'dy >= D,  z_child - z_parent <= 0,  z in {0,1}^n,
// with one variable per interior node in lexicographic order.  Hierarchy
// rows exist for every parent whose children are interior.
struct IlpModel {
  int ell = 0;
  std::vector<NodeId> nodes;
  // (child_index, parent_index) into `nodes`.
  std::vector<std::pair<int, int>> hierarchy_rows;
  Eigen::VectorXd delta_x;
  Eigen::VectorXd delta_y;
  double D = 0.0;

  int num_vars() const { return static_cast<int>(nodes.size()); }
  // The hierarchy matrix A: +1 at the child, -1 at the parent of each row.
  Eigen::SparseMatrix<double> hierarchy_matrix() const;
  // Dense integer copy of the hierarchy matrix.
  Eigen::MatrixXi hierarchy_matrix_int() const;
  int index_of(const NodeId& t) const;
  Eigen::VectorXd indicator(const TreeSelection& sel) const;
  TreeSelection selection(const Eigen::VectorXd& z, double threshold = 0.5) const;
};

IlpModel build_ilp(const InfoIncrements& inc, double D);

struct IlpSolution {
  TreeSelection tree;
  Eigen::VectorXd z;
  double value = 0.0;
};

// Exact optimum by enumerating every tree (ell <= 3).  Ties go to the
// lexicographically smallest expanded set.  Throws InfeasibleError when no
// tree reaches D.
IlpSolution solve_ilp_bruteforce(const IlpModel& model);

struct LpSolution {
  Eigen::VectorXd z;
  double objective = 0.0;
  // Multiplier of the z'dy >= D row.
  double dual_beta = 0.0;
  LpStatus status = LpStatus::kInfeasible;
};

// Relaxation with 0 <= z <= 1.
LpSolution solve_lp_relaxation(const IlpModel& model, const SimplexOptions& options = {});

// min z'(dx - beta dy) over the relaxed hierarchy polytope.
LpSolution solve_lp_soft(const IlpModel& model, double beta, const SimplexOptions& options = {});

// Multiplier of the relevance row at the relaxation optimum.  Throws
// InfeasibleError when the relaxation is infeasible.
double lp_dual_beta(const IlpModel& model, const SimplexOptions& options = {});

// d_bar(beta) = beta D + min z'(dx - beta dy) over the relaxed polytope.
double lp_dual_function(const IlpModel& model, double beta, const SimplexOptions& options = {});

struct TuCheckMode {
  enum Kind { kExhaustive, kSampled } kind = kExhaustive;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0x5eed;

  static TuCheckMode exhaustive() { return {}; }
  static TuCheckMode sampled(std::uint64_t n, std::uint64_t seed = 0x5eed) { return {kSampled, n, seed}; }
};

struct TuCheckResult {
  // Every checked square submatrix has determinant in {-1, 0, 1}.
  bool totally_unimodular = false;
  // Every row holds exactly one +1 and one -1 and nothing else.
  bool structural_witness = false;
  std::uint64_t submatrices_checked = 0;

  explicit operator bool() const { return totally_unimodular; }
};

// Determinant test of square submatrices: all of them (at most 6 rows), or
// `samples` uniformly drawn ones.
TuCheckResult tu_check(const Eigen::MatrixXi& A, TuCheckMode mode);
// The same on a sparse matrix, which must hold integers.  Exhaustive mode
// densifies; sampled mode works on the sparse structure.
TuCheckResult tu_check(const Eigen::SparseMatrix<double>& A, TuCheckMode mode);

// Exact integer determinant (fraction-free elimination).
std::int64_t integer_determinant(const Eigen::MatrixXi& M);

// Plain-text dump of rows, columns, bounds and right-hand side.
std::string ilp_to_mps(const IlpModel& model);

}  // namespace ibtree
