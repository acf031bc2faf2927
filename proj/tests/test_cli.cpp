#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "drdmf/dro/solution_io.hpp"
#include "drdmf/netdata/io.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("drdmf_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    drdmf::save_case(drdmf::fixture::four_node_fixture(), (dir_ / "case.json").string());
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(DRDMF_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string slurp(const std::string& name) const {
    std::ifstream in(dir_ / name);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenCaseWritesValidCase) {
  ASSERT_EQ(run("gen-case --out " + path("ieee.json") + " --k 1 --horizon 3"), 0) << slurp("stderr.txt");
  const auto c = drdmf::load_case(path("ieee.json"));
  EXPECT_EQ(c.horizon_steps, 3);
  EXPECT_EQ(c.k, 1);
  EXPECT_EQ(c.edges.size(), 39u);
}

TEST_F(Cli, SolveEvaluateCompare) {
  const std::string base = "--case " + path("case.json") + " --out " + path("out");
  ASSERT_EQ(run("solve " + base + " --method ro-dmf --method dr-smf --method dr-dmf --tol 1e-7"), 0)
      << slurp("stderr.txt");
  for (const char* m : {"ro-dmf", "dr-smf", "dr-dmf"}) {
    EXPECT_TRUE(fs::exists(path(std::string("out/solution_") + m + ".json")));
    EXPECT_TRUE(fs::exists(path(std::string("out/iterations_") + m + ".csv")));
  }
  ASSERT_EQ(run("evaluate " + base + " --method dr-dmf --scenarios 30 --seed 5"), 0) << slurp("stderr.txt");
  const auto stats = drdmf::read_json_file(path("out/stats_dr-dmf.json"));
  EXPECT_EQ(stats["seed"], 5);
  EXPECT_EQ(stats["stats"]["scenarios"], 30);
  ASSERT_EQ(run("compare " + base + " --method dr-dmf --method dr-smf --method ro-dmf --scenarios 30"), 0)
      << slurp("stderr.txt");
  EXPECT_TRUE(fs::exists(path("out/comparison.csv")));
  EXPECT_TRUE(fs::exists(path("out/boxplot.csv")));
  EXPECT_NE(slurp("stdout.txt").find("Total,"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("solve --case " + path("missing.json") + " --out " + path("o")), 4);
  EXPECT_NE(slurp("stderr.txt").find("missing.json"), std::string::npos);
  EXPECT_EQ(run("solve --case " + path("case.json") + " --out " + path("o") + " --method dro"), 1);
  EXPECT_EQ(run("solve --case " + path("case.json") + " --out " + path("o") + " --backend nope"), 5);
  EXPECT_EQ(run("solve --case " + path("case.json") + " --out " + path("o") + " --max-iter 1 --tol 1e-12"), 2);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("--help"), 0);
  // Solution computed for another case.
  auto other = drdmf::fixture::four_node_fixture();
  other.edges[0].mu_max = {0.07, 0.3};
  drdmf::save_case(other, path("other.json"));
  ASSERT_EQ(run("solve --case " + path("other.json") + " --out " + path("o") + " --method ro-dmf"), 0);
  EXPECT_EQ(run("evaluate --case " + path("case.json") + " --out " + path("o") + " --method ro-dmf"), 4);
  EXPECT_NE(slurp("stderr.txt").find("different case"), std::string::npos);
}

TEST_F(Cli, InvalidCaseIsReported) {
  auto c = drdmf::fixture::four_node_fixture();
  c.dgs.clear();
  drdmf::save_case(c, path("bad.json"));
  EXPECT_EQ(run("solve --case " + path("bad.json") + " --out " + path("o")), 4);
  EXPECT_NE(slurp("stderr.txt").find("grid-forming"), std::string::npos);
}
