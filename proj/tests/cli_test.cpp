#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ibtree/environment.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace {

using ibtree::testing::TempDir;

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(IBTREE_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_("cli") {
    e4_ = dir_.write("e4.csv", ibtree::testing::e4_csv()).string();
    constant_ = dir_.write("flat.csv", "0.5,0.5\n0.5,0.5\n").string();
  }
  TempDir dir_;
  std::string e4_;
  std::string constant_;
};

TEST_F(CliTest, Search) {
  CliResult r = run("search --env " + e4_ + " --beta 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "{\"ell\":2,\"expanded\":[\"\"]}\n");
  r = run("search --env " + e4_ + " --beta 0");
  EXPECT_EQ(r.out, "{\"ell\":2,\"expanded\":[]}\n");
  EXPECT_EQ(run("search --env " + e4_).code, 3);
  EXPECT_EQ(run("search --env " + e4_ + " --beta -1").code, 3);
  EXPECT_EQ(run("search --env " + e4_ + " --beta abc").code, 3);
  EXPECT_EQ(run("search --env " + dir_.path().string() + "/missing.csv --beta 1").code, 2);
  EXPECT_EQ(run("search --env " + dir_.write("bad.csv", "1,2\n").string() + " --beta 1").code, 2);
  EXPECT_EQ(run("").code, 3);
  EXPECT_EQ(run("frobnicate").code, 3);
}

TEST_F(CliTest, SummaryLine) {
  const std::string cmd = std::string(IBTREE_CLI_PATH) + " search --env " + e4_ + " --beta 3 2>&1 >/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  char buf[256] = {};
  const std::size_t n = fread(buf, 1, sizeof(buf) - 1, pipe);
  pclose(pipe);
  EXPECT_EQ(std::string(buf, n), "I_X=2 I_Y=0.811278124 objective=-0.433834373\n");
}

TEST_F(CliTest, Phases) {
  CliResult r = run("phases --env " + e4_);
  EXPECT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"index", "beta", "cum_x", "cum_y"}));
  EXPECT_EQ(rows[1][0], "1");
  EXPECT_NEAR(std::stod(rows[1][1]), 2.0 / ibtree::testing::E4Closed{}.h_quarter, 1e-8);
  EXPECT_EQ(run("phases --env " + constant_).out, "index,beta,cum_x,cum_y\n");
}

TEST_F(CliTest, Dual) {
  const double i = ibtree::testing::E4Closed{}.h_quarter;
  CliResult r = run("dual --env " + e4_ + " --D 0.5");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["beta_star"].get<double>(), 2.0 / i, 1e-8);
  EXPECT_NEAR(j["d_star"].get<double>(), 1.0 / i, 1e-8);
  EXPECT_FALSE(j["strong_duality"].get<bool>());
  EXPECT_EQ(j["recovered_tree"]["expanded"], nlohmann::json::array({""}));
  EXPECT_GT(j["suboptimality_bound"].get<double>(), 0.0);

  j = nlohmann::json::parse(run("dual --env " + e4_ + " --D 0").out);
  EXPECT_EQ(j["d_star"].get<double>(), 0.0);
  EXPECT_TRUE(j["strong_duality"].get<bool>());

  char level[64];
  std::snprintf(level, sizeof(level), "%.17g", i);
  j = nlohmann::json::parse(run("dual --env " + e4_ + " --D " + level).out);
  EXPECT_TRUE(j["strong_duality"].get<bool>());
  EXPECT_NEAR(j["d_star"].get<double>(), 2.0, 1e-8);

  EXPECT_EQ(run("dual --env " + e4_ + " --D 0.9").code, 4);
  EXPECT_EQ(run("dual --env " + e4_).code, 3);
}

TEST_F(CliTest, Gap) {
  CliResult r = run("gap --env " + e4_ + " --steps 4");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"D", "v", "d_star", "gap"}));
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const bool zero = std::stod(rows[k][3]) == 0.0;
    EXPECT_EQ(zero, k == 1 || k == 5) << k;
  }
  EXPECT_EQ(run("gap --env " + constant_).code, 4);

  const auto env = ibtree::testing::random_environment(3, 77, false);
  const std::string path = dir_.write("r3.csv", ibtree::relevance_to_csv(env)).string();
  for (const auto& row : csv_rows(run("gap --env " + path + " --steps 50").out)) {
    if (row[0] == "D") continue;
    EXPECT_GE(std::stod(row[3]), -1e-9);
  }
}

TEST_F(CliTest, GapWithoutEnumeration) {
  const std::string path =
      dir_.write("r4.csv", ibtree::relevance_to_csv(ibtree::testing::random_environment(4, 5, false))).string();
  const auto rows = csv_rows(run("gap --env " + path + " --steps 3").out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[2][1], "nan");
  EXPECT_EQ(rows[2][3], "nan");
}

TEST_F(CliTest, DualShape) {
  CliResult r = run("dualshape --env " + e4_ + " --D 0.5 --beta-min 2 --beta-max 3 --steps 10");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("# transitions: 2.46524581\n"), std::string::npos);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 12u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double beta = std::stod(rows[k][0]);
    EXPECT_NEAR(std::stod(rows[k][1]), std::stod(rows[k][2]), 1e-9);
    if (beta < 2.46) {
      EXPECT_NEAR(std::stod(rows[k][1]), 0.5 * beta, 1e-9);
    }
  }
  EXPECT_EQ(run("dualshape --env " + e4_ + " --D 0.5 --D-ratio 0.5").code, 3);
  EXPECT_EQ(run("dualshape --env " + e4_ + " --D-ratio 0.5 --beta-min 3 --beta-max 2").code, 3);
}

TEST_F(CliTest, IlpAndMps) {
  const std::string mps = (dir_.path() / "m.mps").string();
  CliResult r = run("ilp --env " + e4_ + " --D 0.5 --mps " + mps);
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["num_vars"], 5);
  EXPECT_EQ(j["lp_relaxation"]["status"], "optimal");
  EXPECT_NEAR(j["ilp"]["v"].get<double>(), 2.0, 1e-12);
  EXPECT_TRUE(j["structural_witness"].get<bool>());
  EXPECT_TRUE(std::filesystem::exists(mps));
  EXPECT_EQ(run("ilp --env " + e4_ + " --D 2").code, 4);
}

TEST_F(CliTest, Render) {
  const std::string tree = dir_.write("t.json", "{\"ell\":2,\"expanded\":[\"\"]}").string();
  CliResult r = run("render --env " + e4_ + " --tree " + tree);
  ASSERT_EQ(r.code, 0);
  std::size_t rects = 0;
  for (std::size_t p = r.out.find("<rect"); p != std::string::npos; p = r.out.find("<rect", p + 1)) ++rects;
  EXPECT_EQ(rects, 4u);
  EXPECT_EQ(run("render --env " + e4_ + " --tree " + dir_.write("d.json", "{\"ell\":3,\"expanded\":[]}").string()).code,
            4);
  EXPECT_EQ(run("render --env " + e4_ + " --tree " + dir_.write("o.json", "{\"ell\":2,\"expanded\":[\"0\"]}").string())
                .code,
            4);
  EXPECT_EQ(run("render --env " + e4_ + " --tree " + dir_.write("x.json", "nope").string()).code, 2);
}

TEST_F(CliTest, OutputFileAndDeterminism) {
  const std::string pgm = dir_.write("r.pgm", ibtree::testing::random_pgm(16, 3)).string();
  const std::string out = (dir_.path() / "sweep.csv").string();
  ASSERT_EQ(run("sweep --env " + pgm + " --steps 40 --out " + out).code, 0);
  std::ifstream in(out);
  std::stringstream saved;
  saved << in.rdbuf();
  EXPECT_EQ(saved.str(), run("sweep --env " + pgm + " --steps 40").out);
  EXPECT_EQ(csv_rows(saved.str()).size(), 42u);
  for (const char* cmd : {"phases", "gap", "dualshape --D-ratio 0.59"}) {
    EXPECT_EQ(run(std::string(cmd) + " --env " + pgm).out, run(std::string(cmd) + " --env " + pgm).out) << cmd;
  }
  EXPECT_EQ(run("phases --env " + pgm + " --format csv").code, 2);
  EXPECT_EQ(run("phases --env " + pgm + " --format tiff").code, 3);
}

}  // namespace
