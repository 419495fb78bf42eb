#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ibtree/information.hpp"
#include "ibtree/phase_transitions.hpp"
#include "ibtree/quadtree.hpp"

namespace ibtree {

// D within this of I(X;Y) is accepted and clamped to I(X;Y).
inline constexpr double kInformationLevelSlack = 1e-12;
// Distance to a cumulative relevant-information level that still counts as
// landing on it.
inline constexpr double kStrongDualityTolerance = 1e-9;

struct DualSolution {
  double beta_star = 0.0;
  double d_star = 0.0;
  // Index of the last transition whose cumulative relevance D reaches,
  // counted from 1 (0 when D lies below the first).
  int j_star = 0;
  double D = 0.0;
  std::optional<double> gap;
};

// Validates 0 <= D <= I(X;Y) (with the slack above) and returns the clamped
// level.  Throws InfeasibleError when D exceeds I(X;Y), std::invalid_argument
// for negative or non-finite D.
double checked_information_level(double D, double total);

// d(beta) = min_T I_X(T) + beta (D - I_Y(T)) = q[root; beta] + beta D.
double dual_function(const InfoIncrements& inc, double beta, double D);

// I_X(T) + beta (D - I_Y(T)).
double lagrangian(const TreeSelection& sel, const InfoIncrements& inc, double beta, double D);

// Maximizes d over beta >= 0 using the transition table: the maximum sits at
// the transition where the slope D - cum_y changes sign.  With no
// transitions only D = 0 is feasible and the result is beta* = 0, d* = 0.
DualSolution solve_dual(const PhaseTransitionSet& pts, double D);

// True iff D = 0 or D lies on one of the cumulative relevance levels.
bool strong_duality_holds(const PhaseTransitionSet& pts, double D);

// The minimal soft-optimal tree at beta and its relevant information.
std::pair<TreeSelection, double> everett_pair(const InfoIncrements& inc, double beta);

struct RecoveredTree {
  TreeSelection tree;
  double beta = 0.0;
  // Upper bound on I_X(tree) - v(D).
  double bound = 0.0;
};

// A tree with I_Y >= D from the soft problem near beta*.  The minimal tree at
// beta* is used when it already reaches D (this is the case whenever strong
// duality holds); otherwise the tree just past the transition, at beta* +
// epsilon.  bound = beta (I_Y - D) for the beta actually used.  A
// non-positive epsilon selects max(1e-9, 1e-9 beta*).
RecoveredTree recover_primal_feasible(const InfoIncrements& inc, const PhaseTransitionSet& pts, double D,
                                      double epsilon = 0.0);

// (I_X, I_Y) of every tree of depth <= 3, for exact primal values v(D).
class PrimalEnumerator {
 public:
  explicit PrimalEnumerator(const InfoIncrements& inc);

  // min I_X over trees with I_Y >= D; throws InfeasibleError if none.
  double value(double D) const;
  // The minimizer, ties broken by the lexicographically smallest expanded set.
  TreeSelection argmin(double D) const;
  std::size_t size() const { return points_.size(); }
  const std::vector<TreeInformation>& points() const { return points_; }

 private:
  const InfoIncrements* inc_;
  std::vector<TreeInformation> points_;
};

struct GapReport {
  double D = 0.0;
  std::optional<double> v;
  double d_star = 0.0;
  std::optional<double> gap;
};

// v(D), d* and v - d*.  v is computed by enumeration for ell <= 3 and left
// empty for larger trees.
GapReport duality_gap(const InfoIncrements& inc, double D);
GapReport duality_gap(const InfoIncrements& inc, const PhaseTransitionSet& pts, const PrimalEnumerator* primal,
                      double D);

}  // namespace ibtree
