#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ibtree/information.hpp"
#include "test_support.hpp"

namespace ibtree {
namespace {

TEST(Entropy, ClosedForms) {
  EXPECT_DOUBLE_EQ(entropy(Eigen::Vector4d(0.25, 0.25, 0.25, 0.25)), 2.0);
  EXPECT_DOUBLE_EQ(entropy(Eigen::Vector2d(1.0, 0.0)), 0.0);
  EXPECT_NEAR(entropy(Eigen::Vector2d(0.25, 0.75)), 0.811278, 5e-7);
  EXPECT_THROW(entropy(Eigen::Vector2d(0.5, 0.6)), std::invalid_argument);
  EXPECT_THROW(entropy(Eigen::Vector2d(1.5, -0.5)), std::invalid_argument);
}

TEST(KlDivergence, ClosedForms) {
  const Eigen::Vector2d p(0.3, 0.7);
  EXPECT_DOUBLE_EQ(kl_divergence(p, p), 0.0);
  EXPECT_NEAR(kl_divergence(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.25, 0.75)), 2.0, 1e-15);
  EXPECT_EQ(kl_divergence(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1.0, 0.0)),
            std::numeric_limits<double>::infinity());
}

TEST(JsDivergence, ClosedForms) {
  Eigen::Matrix2d same;
  same << 0.3, 0.3, 0.7, 0.7;
  EXPECT_NEAR(js_divergence(same, Eigen::Vector2d(0.4, 0.6)), 0.0, 1e-15);
  EXPECT_NEAR(js_divergence(Eigen::Matrix2d::Identity(), Eigen::Vector2d(0.5, 0.5)), 1.0, 1e-15);
  Eigen::Matrix<double, 2, 4> split;
  split << 1, 0, 0, 0, 0, 1, 1, 1;
  EXPECT_NEAR(js_divergence(split, Eigen::Vector4d::Constant(0.25)), testing::E4Closed{}.h_quarter, 1e-15);
}

TEST(Increments, E4Values) {
  const InfoIncrements inc = compute_increments(testing::e4_environment());
  EXPECT_NEAR(inc.dx(NodeId::root()), 2.0, 1e-15);
  EXPECT_NEAR(inc.dy(NodeId::root()), testing::E4Closed{}.h_quarter, 1e-15);
  for (int q = 0; q < 4; ++q) {
    EXPECT_NEAR(inc.dx(NodeId::root().child(q)), 0.5, 1e-15);
    EXPECT_EQ(inc.dy(NodeId::root().child(q)), 0.0);
  }
  EXPECT_NEAR(inc.total_relevant_information(), mutual_information_xy(testing::e4_environment()), 1e-15);
}

TEST(Increments, FullTreeSumsToMarginals) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Environment env = testing::random_environment(1 + static_cast<int>(seed % 5), seed);
    const InfoIncrements inc = compute_increments(env);
    EXPECT_NEAR(inc.delta_x.sum(), entropy(env.prior()), 1e-10);
    EXPECT_NEAR(inc.total_relevant_information(), mutual_information_xy(env), 1e-10);
    EXPECT_GE(inc.delta_x.minCoeff(), 0.0);
    EXPECT_GE(inc.delta_y.minCoeff(), 0.0);
  }
}

TEST(Increments, ZeroMassNodes) {
  Eigen::VectorXd prior = Eigen::VectorXd::Zero(16);
  prior.head(4).setConstant(0.25);
  const InfoIncrements inc = compute_increments(Environment(2, prior, Eigen::VectorXd::Constant(16, 0.5)));
  EXPECT_TRUE(inc.delta_x.allFinite());
  EXPECT_EQ(inc.dx(NodeId::from_path("3")), 0.0);
}

TEST(TreeInformation, Examples) {
  const InfoIncrements inc = compute_increments(testing::e4_environment());
  const TreeInformation root_tree = tree_information(TreeSelection(), inc);
  EXPECT_EQ(root_tree.ix, 0.0);
  EXPECT_EQ(root_tree.iy, 0.0);
  const TreeInformation split = tree_information(TreeSelection({NodeId::root()}), inc);
  EXPECT_NEAR(split.ix, 2.0, 1e-15);
  EXPECT_NEAR(split.iy, 0.811278, 5e-7);
  const TreeInformation full = tree_information(TreeSelection(interior_nodes_lexicographic(2)), inc);
  EXPECT_NEAR(full.ix, 4.0, 1e-14);
  EXPECT_NEAR(full.iy, testing::E4Closed{}.h_quarter, 1e-15);
  EXPECT_THROW(tree_information(TreeSelection({NodeId::from_path("0")}), inc), std::invalid_argument);
}

TEST(TreeInformation, MatchesDirectEncoderEvaluation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (int ell = 1; ell <= 2; ++ell) {
      const Environment env = testing::random_environment(ell, seed);
      const InfoIncrements inc = compute_increments(env);
      for (const TreeSelection& sel : enumerate_all_trees(ell)) {
        const TreeInformation got = tree_information(sel, inc);
        const testing::EncoderInformation want = testing::encoder_information(env, sel);
        EXPECT_NEAR(got.ix, want.itx, 1e-10);
        EXPECT_NEAR(got.iy, want.ity, 1e-10);
      }
    }
  }
}

TEST(TreeInformation, MonotoneAndDataProcessing) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Environment env = testing::random_environment(2, 100 + seed);
    const InfoIncrements inc = compute_increments(env);
    const auto trees = enumerate_all_trees(2);
    for (const TreeSelection& a : trees) {
      const TreeInformation ia = tree_information(a, inc);
      EXPECT_GE(ia.ix, ia.iy - 1e-12);
      for (const TreeSelection& b : trees) {
        if (!a.is_subset_of(b)) continue;
        const TreeInformation ib = tree_information(b, inc);
        EXPECT_GE(ib.ix, ia.ix - 1e-15);
        EXPECT_GE(ib.iy, ia.iy - 1e-15);
      }
    }
  }
}

TEST(Increments, CsvExport) {
  const std::string csv = increments_to_csv(compute_increments(testing::e4_environment()));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "node_path,prob,delta_x,delta_y");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

}  // namespace
}  // namespace ibtree
