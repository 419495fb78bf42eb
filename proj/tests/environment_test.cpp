#include <gtest/gtest.h>

#include <cmath>

#include "ibtree/environment.hpp"
#include "ibtree/error.hpp"
#include "test_support.hpp"

namespace ibtree {
namespace {

using testing::TempDir;

TEST(LoadEnvironment, WhitePgmSaturates) {
  TempDir dir("env");
  const auto path = dir.write("white.pgm", "P2\n2 2\n255\n255 255\n255 255\n");
  const Environment env = load_environment(path, EnvFormat::kPgm);
  EXPECT_EQ(env.ell(), 1);
  EXPECT_EQ(env.relevance(), Eigen::VectorXd::Ones(4));
  EXPECT_EQ(env.prior(), Eigen::VectorXd::Constant(4, 0.25));
}

TEST(LoadEnvironment, BinaryPgmWithComment) {
  TempDir dir("env");
  std::string data = "P5\n# made by hand\n2 2\n100\n";
  data += std::string{0, 50, 100, 25};
  const Environment env = load_environment(dir.write("b.pgm", data), EnvFormat::kPgm);
  EXPECT_DOUBLE_EQ(env.relevance()(1), 0.5);
  EXPECT_DOUBLE_EQ(env.relevance()(2), 1.0);
  EXPECT_DOUBLE_EQ(env.relevance()(3), 0.25);
}

TEST(LoadEnvironment, LargeRandomPgm) {
  TempDir dir("env");
  const Environment env = load_environment(dir.write("r.pgm", testing::random_pgm(128, 1)), EnvFormat::kPgm);
  EXPECT_EQ(env.ell(), 7);
  EXPECT_EQ(env.num_cells(), 16384);
  EXPECT_NEAR(env.prior().maxCoeff(), 1.0 / 16384, 1e-18);
  EXPECT_NEAR(env.prior().minCoeff(), 1.0 / 16384, 1e-18);
}

TEST(LoadEnvironment, CsvEchoesFile) {
  TempDir dir("env");
  const auto path = dir.write("e4.csv", testing::e4_csv());
  const Environment env = load_environment(path, format_from_extension(path));
  EXPECT_EQ(env.relevance(), testing::e4_environment().relevance());
  EXPECT_EQ(relevance_to_csv(env), testing::e4_csv());
}

TEST(LoadEnvironment, CsvRoundTripIsByteIdentical) {
  TempDir dir("env");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Environment env = testing::random_environment(3, seed);
    const std::string text = relevance_to_csv(env);
    const Environment back = load_environment(dir.write("x.csv", text), EnvFormat::kCsv);
    EXPECT_EQ(relevance_to_csv(back), text);
    EXPECT_EQ(back.relevance(), env.relevance());
  }
}

TEST(LoadEnvironment, PriorSidecar) {
  TempDir dir("env");
  const auto env_path = dir.write("e.csv", "1,0\n0,0\n");
  const auto prior_path = dir.write("p.csv", "0.5,0.25\n0.125,0.125\n");
  const Environment env = load_environment(env_path, EnvFormat::kCsv, prior_path);
  EXPECT_DOUBLE_EQ(env.prior()(0), 0.5);
  EXPECT_DOUBLE_EQ(env.prior()(3), 0.125);

  const auto bad = dir.write("bad.csv", "0.5,0.5\n0.5,0.5\n");
  EXPECT_THROW(load_environment(env_path, EnvFormat::kCsv, bad), FormatError);
  const auto wrong_shape = dir.write("shape.csv", "1\n");
  EXPECT_THROW(load_environment(env_path, EnvFormat::kCsv, wrong_shape), FormatError);
}

TEST(LoadEnvironment, RejectsMalformedInput) {
  TempDir dir("env");
  EXPECT_THROW(load_environment(dir.path() / "missing.csv", EnvFormat::kCsv), FormatError);
  EXPECT_THROW(load_environment(dir.write("a.csv", "1,0,0\n0,0,0\n0,0,0\n"), EnvFormat::kCsv), FormatError);
  EXPECT_THROW(load_environment(dir.write("b.csv", "1,0\n0\n"), EnvFormat::kCsv), FormatError);
  EXPECT_THROW(load_environment(dir.write("c.csv", "1,x\n0,0\n"), EnvFormat::kCsv), FormatError);
  EXPECT_THROW(load_environment(dir.write("d.csv", "1.5,0\n0,0\n"), EnvFormat::kCsv), FormatError);
  EXPECT_THROW(load_environment(dir.write("e.pgm", "P2\n2 3\n255\n0 0 0 0 0 0\n"), EnvFormat::kPgm), FormatError);
  EXPECT_THROW(load_environment(dir.write("f.pgm", "P2\n2 2\n255\n0 0 0\n"), EnvFormat::kPgm), FormatError);
  EXPECT_THROW(load_environment(dir.write("g.pgm", "P5\n2 2\n255\n\x01"), EnvFormat::kPgm), FormatError);
  EXPECT_THROW(load_environment(dir.write("h.pgm", "P6\n2 2\n255\n"), EnvFormat::kPgm), FormatError);
  EXPECT_THROW(format_from_extension("env.txt"), std::invalid_argument);
}

TEST(Environment, ValidatesArrays) {
  EXPECT_THROW(Environment(1, Eigen::VectorXd::Constant(4, 0.3), Eigen::VectorXd::Zero(4)), std::invalid_argument);
  EXPECT_THROW(Environment(1, Eigen::VectorXd::Constant(3, 1.0 / 3), Eigen::VectorXd::Zero(3)), std::invalid_argument);
  EXPECT_THROW(Environment::with_uniform_prior(1, Eigen::VectorXd::Constant(4, -0.1)), std::invalid_argument);
}

TEST(MutualInformation, ClosedForms) {
  EXPECT_NEAR(mutual_information_xy(testing::constant_environment(2, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(mutual_information_xy(testing::e4_environment()), testing::E4Closed{}.h_quarter, 1e-12);
  EXPECT_NEAR(mutual_information_xy(testing::e4_environment()), 0.811278, 5e-7);
  Eigen::VectorXd half = Eigen::VectorXd::Zero(16);
  half.head(8).setOnes();
  EXPECT_NEAR(mutual_information_xy(Environment::with_uniform_prior(2, half)), 1.0, 1e-12);
}

TEST(MutualInformation, BoundedByMarginalEntropies) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Environment env = testing::random_environment(1 + static_cast<int>(seed % 4), seed);
    const double hx = entropy(env.prior());
    const double hy = binary_entropy(env.prior().dot(env.relevance()));
    const double i = mutual_information_xy(env);
    EXPECT_GE(i, 0.0);
    EXPECT_LE(i, std::min(hx, hy) + 1e-12);
  }
}

}  // namespace
}  // namespace ibtree
