#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "ibtree/information.hpp"
#include "ibtree/quadtree.hpp"

namespace ibtree {

// Q-values at or above -kQZeroTolerance count as zero: such nodes stay
// unexpanded, so searches return the minimal optimal tree.
inline constexpr double kQZeroTolerance = 1e-12;

// Q(t; beta) for every node of the finest tree, level order.
struct QTable {
  double beta = 0.0;
  int ell = 0;
  Eigen::VectorXd q;

  double at(const NodeId& t) const { return q(static_cast<Eigen::Index>(linear_index(t))); }
  double root() const { return q(0); }
};

// Bottom-up: q = 0 at depth ell, otherwise
//   q[t] = min(dx[t] - beta * dy[t] + sum_children q, 0).
// Throws std::invalid_argument for negative beta.
QTable compute_q(const InfoIncrements& inc, double beta);

// Top-down expansion of every reached node with q[t] < -kQZeroTolerance.
TreeSelection qtree_search(const QTable& table);
TreeSelection qtree_search(const InfoIncrements& inc, double beta);

// Same traversal, expanding on the one-step cost dx - beta * dy < -tol.
TreeSelection greedy_search(const InfoIncrements& inc, double beta);

// I_X(T) - beta * I_Y(T).
double objective(const TreeSelection& sel, const InfoIncrements& inc, double beta);

// dx/dy for interior nodes with dy > 0, +infinity otherwise.
double critical_beta_one_step(const InfoIncrements& inc, const NodeId& t);

struct SweepRow {
  double beta = 0.0;
  double ix = 0.0;
  double iy = 0.0;
  double objective = 0.0;
  std::size_t num_leaves = 0;
};

// Q-tree search at each beta (expected ascending).
std::vector<SweepRow> beta_sweep(const InfoIncrements& inc, std::span<const double> betas);
std::string sweep_to_csv(std::span<const SweepRow> rows);

}  // namespace ibtree
