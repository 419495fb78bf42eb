#include "ibtree/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ibtree/error.hpp"
#include "ibtree/qsearch.hpp"

namespace ibtree {

namespace {

// Feasibility slack when comparing a tree's I_Y against D.
constexpr double kFeasibilitySlack = 1e-12;

}  // namespace

double checked_information_level(double D, double total) {
  if (!std::isfinite(D) || D < 0.0) throw std::invalid_argument("information level D must be finite and >= 0");
  if (D > total + kInformationLevelSlack) {
    throw InfeasibleError("D = " + std::to_string(D) + " exceeds I(X;Y) = " + std::to_string(total));
  }
  return std::min(D, std::max(total, 0.0));
}

double dual_function(const InfoIncrements& inc, double beta, double D) {
  D = checked_information_level(D, inc.total_relevant_information());
  return compute_q(inc, beta).root() + beta * D;
}

double lagrangian(const TreeSelection& sel, const InfoIncrements& inc, double beta, double D) {
  const TreeInformation info = tree_information(sel, inc);
  return info.ix + beta * (D - info.iy);
}

DualSolution solve_dual(const PhaseTransitionSet& pts, double D) {
  DualSolution sol;
  if (pts.empty()) {
    sol.D = checked_information_level(D, 0.0);
    return sol;
  }
  // The last cumulative level equals I(X;Y) up to summation order.
  D = checked_information_level(D, pts.cum_y.back());
  sol.D = D;
  const int n = static_cast<int>(pts.size());

  // Paper indexing is 1-based: cum(j) = cum_y[j - 1], beta(j) = betas[j - 1].
  int j = 0;
  if (D < pts.cum_y.front()) {
    j = 0;
  } else if (D >= pts.cum_y.back()) {
    j = n - 1;
  } else {
    for (int k = 1; k <= n; ++k) {
      if (D - pts.cum_y[static_cast<std::size_t>(k - 1)] >= 0.0) j = k;
    }
  }
  sol.j_star = j;
  sol.beta_star = pts.betas[static_cast<std::size_t>(j)];
  if (j == 0) {
    sol.d_star = sol.beta_star * D;
  } else {
    const auto k = static_cast<std::size_t>(j - 1);
    sol.d_star = pts.cum_x[k] + sol.beta_star * (D - pts.cum_y[k]);
  }
  return sol;
}

bool strong_duality_holds(const PhaseTransitionSet& pts, double D) {
  if (D == 0.0) return true;
  return std::any_of(pts.cum_y.begin(), pts.cum_y.end(),
                     [&](double c) { return std::abs(D - c) <= kStrongDualityTolerance; });
}

std::pair<TreeSelection, double> everett_pair(const InfoIncrements& inc, double beta) {
  TreeSelection sel = qtree_search(inc, beta);
  const double iy = tree_information(sel, inc).iy;
  return {std::move(sel), iy};
}

RecoveredTree recover_primal_feasible(const InfoIncrements& inc, const PhaseTransitionSet& pts, double D,
                                      double epsilon) {
  D = checked_information_level(D, inc.total_relevant_information());
  const DualSolution sol = solve_dual(pts, D);
  const double beta_star = sol.beta_star;
  if (!(epsilon > 0.0)) epsilon = std::max(1e-9, 1e-9 * beta_star);

  auto attempt = [&](double beta) -> std::optional<RecoveredTree> {
    TreeSelection sel = qtree_search(inc, beta);
    const double iy = tree_information(sel, inc).iy;
    if (iy < D - kFeasibilitySlack) return std::nullopt;
    return RecoveredTree{std::move(sel), beta, beta * std::max(iy - D, 0.0)};
  };

  if (auto at_star = attempt(beta_star)) return *at_star;
  if (auto past = attempt(beta_star + epsilon)) return *past;
  // Round-off left the tree just short of D: step over the later
  // transitions until one reaches it.
  for (double b : pts.betas) {
    if (b <= beta_star) continue;
    const double beta = b + std::max(1e-9, 1e-9 * b);
    if (auto later = attempt(beta)) return *later;
  }
  throw InfeasibleError("no soft-optimal tree reaches D = " + std::to_string(D));
}

PrimalEnumerator::PrimalEnumerator(const InfoIncrements& inc) : inc_(&inc) {
  points_.reserve(static_cast<std::size_t>(tree_count(inc.ell)));
  for_each_tree(inc.ell, [&](const TreeSelection& sel) { points_.push_back(tree_information(sel, inc)); });
}

double PrimalEnumerator::value(double D) const {
  double best = std::numeric_limits<double>::infinity();
  for (const TreeInformation& p : points_) {
    if (p.iy >= D - kFeasibilitySlack) best = std::min(best, p.ix);
  }
  if (!std::isfinite(best)) throw InfeasibleError("no tree reaches D = " + std::to_string(D));
  return best;
}

TreeSelection PrimalEnumerator::argmin(double D) const {
  const double best = value(D);
  std::optional<TreeSelection> chosen;
  for_each_tree(inc_->ell, [&](const TreeSelection& sel) {
    const TreeInformation info = tree_information(sel, *inc_);
    if (info.iy < D - kFeasibilitySlack || info.ix > best + kFeasibilitySlack) return;
    if (!chosen || sel < *chosen) chosen = sel;
  });
  return *chosen;
}

GapReport duality_gap(const InfoIncrements& inc, const PhaseTransitionSet& pts, const PrimalEnumerator* primal,
                      double D) {
  GapReport report;
  D = checked_information_level(D, inc.total_relevant_information());
  report.D = D;
  report.d_star = solve_dual(pts, D).d_star;
  if (primal != nullptr) {
    report.v = primal->value(D);
    report.gap = *report.v - report.d_star;
  }
  return report;
}

GapReport duality_gap(const InfoIncrements& inc, double D) {
  const PhaseTransitionSet pts = tree_phase_transitions(inc);
  if (inc.ell <= 3) {
    const PrimalEnumerator primal(inc);
    return duality_gap(inc, pts, &primal, D);
  }
  return duality_gap(inc, pts, nullptr, D);
}

}  // namespace ibtree
