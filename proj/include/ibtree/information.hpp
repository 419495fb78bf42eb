#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "ibtree/environment.hpp"
#include "ibtree/quadtree.hpp"

namespace ibtree {

// All information quantities are in bits with 0 log 0 = 0.

inline double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

inline double binary_entropy(double p) { return -(xlog2x(p) + xlog2x(1.0 - p)); }

namespace detail {

inline constexpr double kDistributionSumTolerance = 1e-9;

template <typename Derived>
void check_distribution(const Eigen::MatrixBase<Derived>& p, const char* what) {
  if ((p.array() < 0.0).any()) throw std::invalid_argument(std::string(what) + " has a negative entry");
  if (std::abs(p.sum() - 1.0) > kDistributionSumTolerance) {
    throw std::invalid_argument(std::string(what) + " does not sum to 1");
  }
}

}  // namespace detail

template <typename Derived>
double entropy(const Eigen::MatrixBase<Derived>& dist) {
  detail::check_distribution(dist, "distribution");
  double h = 0.0;
  for (Eigen::Index i = 0; i < dist.size(); ++i) h -= xlog2x(dist(i));
  return h;
}

// +infinity when p puts mass where q has none.
template <typename DerivedP, typename DerivedQ>
double kl_divergence(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  detail::check_distribution(p, "p");
  detail::check_distribution(q, "q");
  double d = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    if (q(i) <= 0.0) return std::numeric_limits<double>::infinity();
    d += p(i) * std::log2(p(i) / q(i));
  }
  return std::max(d, 0.0);
}

// Generalized Jensen-Shannon divergence of the columns of `dists` under
// `weights`: sum_i w_i KL(dists_i || sum_j w_j dists_j).
template <typename DerivedD, typename DerivedW>
double js_divergence(const Eigen::MatrixBase<DerivedD>& dists, const Eigen::MatrixBase<DerivedW>& weights) {
  if (dists.cols() != weights.size()) throw std::invalid_argument("js_divergence: shape mismatch");
  detail::check_distribution(weights, "weights");
  for (Eigen::Index j = 0; j < dists.cols(); ++j) detail::check_distribution(dists.col(j), "component");
  const Eigen::VectorXd mixture = dists * weights;
  double js = 0.0;
  for (Eigen::Index j = 0; j < dists.cols(); ++j) {
    if (weights(j) > 0.0) js += weights(j) * kl_divergence(dists.col(j), mixture);
  }
  return js;
}

// Per-node quantities of the finest quadtree, stored in level order
// (see linear_index).  delta_x / delta_y cover interior nodes only.
struct InfoIncrements {
  int ell = 0;
  Eigen::VectorXd delta_x;
  Eigen::VectorXd delta_y;
  Eigen::VectorXd node_prob;
  Eigen::VectorXd node_relevance;

  double dx(const NodeId& t) const { return t.depth < ell ? delta_x(static_cast<Eigen::Index>(linear_index(t))) : 0.0; }
  double dy(const NodeId& t) const { return t.depth < ell ? delta_y(static_cast<Eigen::Index>(linear_index(t))) : 0.0; }
  double prob(const NodeId& t) const { return node_prob(static_cast<Eigen::Index>(linear_index(t))); }
  double relevance(const NodeId& t) const { return node_relevance(static_cast<Eigen::Index>(linear_index(t))); }

  // I(X;Y): the relevant information of the finest tree.
  double total_relevant_information() const { return delta_y.sum(); }
};

// For each interior node s with p(s) > 0:
//   delta_x[s] = p(s) * H(Pi),  delta_y[s] = p(s) * JS_Pi(p(y|s'_1..4)),
// with Pi the conditional child distribution.  The p(s) weight makes the
// increments sum to H(X) and I(X;Y) over the finest tree.
InfoIncrements compute_increments(const Environment& env);

struct TreeInformation {
  double ix = 0.0;
  double iy = 0.0;
};

// Sums of the increments over the expanded nodes.  Throws
// std::invalid_argument for an invalid selection.
TreeInformation tree_information(const TreeSelection& sel, const InfoIncrements& inc);

// node_path,prob,delta_x,delta_y for interior nodes in lexicographic order.
std::string increments_to_csv(const InfoIncrements& inc);

}  // namespace ibtree
