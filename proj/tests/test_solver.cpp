#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "drdmf/solver/lp_format.hpp"
#include "drdmf/solver/solve.hpp"

using namespace drdmf::solver;

namespace {

class BothBackends : public ::testing::TestWithParam<std::string> {
 protected:
  SolveOptions opts() const {
    SolveOptions o;
    o.backend = GetParam();
    return o;
  }
};

// min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, x,y >= 0  ->  x = 8/5, y = 6/5
ProblemSpec small_lp() {
  ProblemSpec p;
  p.add_column(0, kInf, -1.0, false, "x");
  p.add_column(0, kInf, -1.0, false, "y");
  p.add_row({0, 1}, {1, 2}, Sense::kLessEqual, 4);
  p.add_row({0, 1}, {3, 1}, Sense::kLessEqual, 6);
  return p;
}

// 2 supplies (20, 30), 3 demands (10, 25, 15), costs per unit.
ProblemSpec transportation() {
  const double cost[2][3] = {{8, 6, 10}, {9, 12, 13}};
  const double supply[2] = {20, 30}, demand[3] = {10, 25, 15};
  ProblemSpec p;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) p.add_column(0, kInf, cost[i][j]);
  for (int i = 0; i < 2; ++i) p.add_row({3 * i, 3 * i + 1, 3 * i + 2}, {1, 1, 1}, Sense::kLessEqual, supply[i]);
  for (int j = 0; j < 3; ++j) p.add_row({j, 3 + j}, {1, 1}, Sense::kGreaterEqual, demand[j]);
  return p;
}

}  // namespace

TEST_P(BothBackends, SmallLpVertex) {
  const auto r = solve(small_lp(), opts());
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.primal[0], 1.6, 1e-9);
  EXPECT_NEAR(r.primal[1], 1.2, 1e-9);
  EXPECT_NEAR(r.objective, -2.8, 1e-9);
}

TEST_P(BothBackends, InfeasibleDetected) {
  ProblemSpec p;
  p.add_column(0, 1, 1.0);
  p.add_row({0}, {1}, Sense::kGreaterEqual, 2);
  EXPECT_EQ(solve(p, opts()).status, Status::kInfeasible);
}

TEST_P(BothBackends, TransportationComplementarySlackness) {
  const auto p = transportation();
  const auto r = solve(p, opts());
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.objective, 10 * 9 + 20 * 6 + 5 * 12 + 15 * 13, 1e-7);
  const auto rep = verify_solution(p, r);
  EXPECT_TRUE(rep.feasible());
  ASSERT_TRUE(rep.duality_gap.has_value());
  EXPECT_LT(*rep.duality_gap, 1e-7);
  // Binding rows carry the duals, slack rows none.
  for (int i = 0; i < p.num_rows(); ++i) {
    const double slack = row_violation(p.rows[i], row_activity(p.rows[i], r.primal));
    EXPECT_LT(slack, 1e-9);
    const double act = row_activity(p.rows[i], r.primal);
    if (std::abs(act - p.rows[i].rhs) > 1e-7) {
      EXPECT_NEAR(r.row_dual[i], 0.0, 1e-9) << "row " << i;
    }
  }
  // Reduced costs of basic columns vanish.
  for (int j = 0; j < p.num_columns(); ++j)
    if (r.primal[j] > 1e-7) {
      EXPECT_NEAR(r.col_dual[j], 0.0, 1e-9) << "col " << j;
    }
}

TEST_P(BothBackends, KnapsackMip) {
  // max 10a + 13b + 7c  s.t. 3a + 4b + 2c <= 6, binary -> a + c = 17
  ProblemSpec p;
  for (double v : {10.0, 13.0, 7.0}) p.add_column(0, 1, -v, true);
  p.add_row({0, 1, 2}, {3, 4, 2}, Sense::kLessEqual, 6);
  const auto r = solve(p, opts());
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.objective, -20.0, 1e-9);  // b + c = 13 + 7
  const auto rep = verify_solution(p, r);
  EXPECT_LT(rep.max_integrality_violation, 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Backends, BothBackends, ::testing::Values("highs", "reference"));

TEST(Solver, VerifyCatchesTamperedPrimal) {
  const auto p = small_lp();
  auto r = solve(p);
  r.primal[0] += 0.5;
  const auto rep = verify_solution(p, r);
  EXPECT_FALSE(rep.feasible());
  EXPECT_EQ(rep.worst_row, 1);
  EXPECT_NEAR(rep.max_row_residual, 1.5, 1e-9);
  EXPECT_GT(rep.objective_mismatch, 0.4);
}

TEST(Solver, BackendsAgreeOnRandomLps) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.5, 3.0);
  for (int k = 0; k < 20; ++k) {
    ProblemSpec p;
    const int n = 5, m = 4;
    for (int j = 0; j < n; ++j) p.add_column(0, pos(rng) * 3, u(rng));
    for (int i = 0; i < m; ++i) {
      std::vector<int> idx;
      std::vector<double> val;
      for (int j = 0; j < n; ++j) {
        idx.push_back(j);
        val.push_back(u(rng));
      }
      p.add_row(idx, val, i % 2 ? Sense::kLessEqual : Sense::kGreaterEqual, u(rng));
    }
    SolveOptions a, b;
    b.backend = "reference";
    const auto ra = solve(p, a), rb = solve(p, b);
    ASSERT_EQ(ra.status, rb.status) << "instance " << k;
    if (ra.status == Status::kOptimal) {
      EXPECT_NEAR(ra.objective, rb.objective, 1e-7) << "instance " << k;
    }
  }
}

TEST(Solver, ResolveFixedKeepsIntegers) {
  ProblemSpec p;
  p.add_column(0, 1, -3.0, true);
  p.add_column(0, 5, -1.0);
  p.add_row({0, 1}, {2, 1}, Sense::kLessEqual, 4.5);
  const auto mip = solve(p);
  ASSERT_TRUE(mip.has_solution());
  const auto lp = resolve_fixed(p, mip);
  ASSERT_EQ(lp.status, Status::kOptimal);
  EXPECT_EQ(lp.primal[0], 1.0);
  EXPECT_NEAR(lp.primal[1], 2.5, 1e-9);
  EXPECT_EQ(lp.row_dual.size(), 1u);
}

TEST(Solver, UnknownBackendThrows) {
  SolveOptions o;
  o.backend = "nope";
  EXPECT_THROW(solve(small_lp(), o), BackendError);
}

TEST(Solver, LpDumpNamesColumnsAndTags) {
  auto p = small_lp();
  p.rows[0].tag = "capacity";
  const auto s = to_lp_string(p, "demo");
  EXPECT_NE(s.find("x"), std::string::npos);
  EXPECT_NE(s.find("capacity"), std::string::npos);
}
