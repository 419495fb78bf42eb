#include "ibtree/qsearch.hpp"

#include <cstdio>
#include <limits>
#include <stdexcept>

namespace ibtree {

QTable compute_q(const InfoIncrements& inc, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  QTable table;
  table.beta = beta;
  table.ell = inc.ell;
  table.q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(node_count(inc.ell)));
  // Level order puts every child after its parent, so a reverse sweep over
  // the interior range sees children first.
  for (auto i = static_cast<Eigen::Index>(interior_count(inc.ell)) - 1; i >= 0; --i) {
    const auto first_child = 4 * i + 1;
    const double below = table.q.segment(first_child, 4).sum();
    table.q(i) = std::min(inc.delta_x(i) - beta * inc.delta_y(i) + below, 0.0);
  }
  return table;
}

namespace {

template <typename ExpandRule>
TreeSelection expand_top_down(int ell, ExpandRule&& expand) {
  std::vector<NodeId> expanded;
  std::vector<NodeId> stack{NodeId::root()};
  while (!stack.empty()) {
    const NodeId t = stack.back();
    stack.pop_back();
    if (t.depth >= ell || !expand(t)) continue;
    expanded.push_back(t);
    for (int c = kBranching - 1; c >= 0; --c) stack.push_back(t.child(c));
  }
  return TreeSelection(std::move(expanded));
}

}  // namespace

TreeSelection qtree_search(const QTable& table) {
  return expand_top_down(table.ell, [&](const NodeId& t) { return table.at(t) < -kQZeroTolerance; });
}

TreeSelection qtree_search(const InfoIncrements& inc, double beta) { return qtree_search(compute_q(inc, beta)); }

TreeSelection greedy_search(const InfoIncrements& inc, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  return expand_top_down(inc.ell, [&](const NodeId& t) { return inc.dx(t) - beta * inc.dy(t) < -kQZeroTolerance; });
}

double objective(const TreeSelection& sel, const InfoIncrements& inc, double beta) {
  const TreeInformation info = tree_information(sel, inc);
  return info.ix - beta * info.iy;
}

double critical_beta_one_step(const InfoIncrements& inc, const NodeId& t) {
  if (t.depth >= inc.ell) return std::numeric_limits<double>::infinity();
  const double dy = inc.dy(t);
  return dy > 0.0 ? inc.dx(t) / dy : std::numeric_limits<double>::infinity();
}

std::vector<SweepRow> beta_sweep(const InfoIncrements& inc, std::span<const double> betas) {
  std::vector<SweepRow> rows;
  rows.reserve(betas.size());
  for (double beta : betas) {
    const TreeSelection sel = qtree_search(inc, beta);
    const TreeInformation info = tree_information(sel, inc);
    // Each expansion trades one leaf for four.
    rows.push_back({beta, info.ix, info.iy, info.ix - beta * info.iy, 1 + 3 * sel.size()});
  }
  return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::string out = "beta,I_X,I_Y,objective,num_leaves\n";
  char buf[160];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%zu\n", r.beta, r.ix, r.iy, r.objective, r.num_leaves);
    out += buf;
  }
  return out;
}

}  // namespace ibtree
