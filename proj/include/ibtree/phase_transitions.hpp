#pragma once

#include <span>
#include <string>
#include <vector>

#include "ibtree/information.hpp"
#include "ibtree/quadtree.hpp"

namespace ibtree {

// Breakpoints closer than this (relative) are treated as one simultaneous
// tree change.
inline constexpr double kTransitionMergeTolerance = 1e-9;

// Tree phase transitions of the soft problem in ascending order, with the
// total information of the minimal optimal tree just above each breakpoint.
struct PhaseTransitionSet {
  std::vector<double> betas;
  std::vector<double> cum_x;
  std::vector<double> cum_y;

  std::size_t size() const { return betas.size(); }
  bool empty() const { return betas.empty(); }
};

// A candidate breakpoint: expanding `node` (together with every descendant
// whose critical value it dominates) adds dx / dy bits of information.
struct TransitionEntry {
  double beta = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  NodeId node;
};

// Per interior node: beta^Q_cr(t) and the candidate transitions of the
// subtree rooted at t that survive (all >= beta_q_cr), the node's own first.
struct NodePTRecord {
  double beta_q_cr = 0.0;
  std::vector<TransitionEntry> transitions;
};

// Bottom-up computation of beta^Q_cr for every interior node and of the
// surviving candidate transitions.  Indexed in level order.
std::vector<NodePTRecord> node_phase_records(const InfoIncrements& inc);

// The root record sorted, merged within kTransitionMergeTolerance and
// accumulated.
PhaseTransitionSet tree_phase_transitions(const InfoIncrements& inc);
PhaseTransitionSet phase_set_from_records(const std::vector<NodePTRecord>& records);

// sup{beta >= 0 : Q(t; beta) = 0}; +infinity for depth-ell nodes.
double beta_q_critical(const std::vector<NodePTRecord>& records, const NodeId& t, int ell);
double beta_q_critical(const InfoIncrements& inc, const NodeId& t);

struct BetaBracket {
  double lo = 0.0;
  double hi = 0.0;
};

// Independent check of the transitions: evaluates Q-tree search on `grid`
// and refines every interval whose endpoints disagree by bisection down to
// `width`.  Minimal optimal trees are nested in beta, so equal endpoints
// mean no change inside; each bracket holds one change in (lo, hi].
std::vector<BetaBracket> sweep_transition_oracle(const InfoIncrements& inc, std::span<const double> grid,
                                                 double width = 1e-9);

// d(beta) from the transition table:
//   cum_x[j-1] + beta * (D - cum_y[j-1]),  j = first index with beta <= betas[j],
// where index 0 stands for the root tree (zero information).
double dual_value_from_pts(const PhaseTransitionSet& pts, double D, double beta);

// index,beta,cum_x,cum_y with 1-based index.
std::string phases_to_csv(const PhaseTransitionSet& pts);

}  // namespace ibtree
