#include "ibtree/information.hpp"

#include <algorithm>
#include <cstdio>

namespace ibtree {

InfoIncrements compute_increments(const Environment& env) {
  const int ell = env.ell();
  InfoIncrements inc;
  inc.ell = ell;
  const auto nodes = static_cast<Eigen::Index>(node_count(ell));
  const auto interior = static_cast<Eigen::Index>(interior_count(ell));
  inc.node_prob = Eigen::VectorXd::Zero(nodes);
  inc.node_relevance = Eigen::VectorXd::Zero(nodes);
  inc.delta_x = Eigen::VectorXd::Zero(interior);
  inc.delta_y = Eigen::VectorXd::Zero(interior);

  // Joint mass p(t, Y=1), aggregated bottom-up.
  Eigen::VectorXd joint = Eigen::VectorXd::Zero(nodes);
  const auto cell_of = finest_cell_order(ell);
  const auto leaf_base = static_cast<Eigen::Index>(level_offset(ell));
  for (std::size_t k = 0; k < cell_of.size(); ++k) {
    const auto cell = static_cast<Eigen::Index>(cell_of[k]);
    inc.node_prob(leaf_base + static_cast<Eigen::Index>(k)) = env.prior()(cell);
    joint(leaf_base + static_cast<Eigen::Index>(k)) = env.prior()(cell) * env.relevance()(cell);
    inc.node_relevance(leaf_base + static_cast<Eigen::Index>(k)) = env.relevance()(cell);
  }

  for (int depth = ell - 1; depth >= 0; --depth) {
    const std::uint64_t width = std::uint64_t{1} << (2 * depth);
    for (std::uint64_t k = 0; k < width; ++k) {
      const NodeId t{depth, k};
      const auto self = static_cast<Eigen::Index>(linear_index(t));
      double p = 0.0;
      double pj = 0.0;
      Eigen::Vector4d child_prob;
      Eigen::Matrix<double, 2, 4> child_y;
      for (int c = 0; c < kBranching; ++c) {
        const auto ci = static_cast<Eigen::Index>(linear_index(t.child(c)));
        child_prob(c) = inc.node_prob(ci);
        const double r = inc.node_relevance(ci);
        child_y.col(c) << 1.0 - r, r;
        p += inc.node_prob(ci);
        pj += joint(ci);
      }
      inc.node_prob(self) = p;
      joint(self) = pj;
      inc.node_relevance(self) = p > 0.0 ? std::clamp(pj / p, 0.0, 1.0) : 0.0;
      if (p <= 0.0) continue;
      const Eigen::Vector4d pi = child_prob / p;
      inc.delta_x(self) = p * entropy(pi);
      inc.delta_y(self) = p * js_divergence(child_y, pi);
    }
  }
  return inc;
}

TreeInformation tree_information(const TreeSelection& sel, const InfoIncrements& inc) {
  if (!validate_selection(sel, inc.ell)) throw std::invalid_argument("invalid tree selection");
  TreeInformation info;
  for (const NodeId& t : sel.expanded()) {
    info.ix += inc.dx(t);
    info.iy += inc.dy(t);
  }
  return info;
}

std::string increments_to_csv(const InfoIncrements& inc) {
  std::string out = "node_path,prob,delta_x,delta_y\n";
  char buf[128];
  for (const NodeId& t : interior_nodes_lexicographic(inc.ell)) {
    std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g\n", t.path().c_str(), inc.prob(t), inc.dx(t), inc.dy(t));
    out += buf;
  }
  return out;
}

}  // namespace ibtree
