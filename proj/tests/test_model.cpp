#include <gtest/gtest.h>

#include <random>

#include "drdmf/model/dispatch.hpp"
#include "drdmf/model/radiality.hpp"
#include "drdmf/netdata/ieee37.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace drdmf;
using fixture::make_case;

namespace {

FirstStageDecision from_closed(const CaseData& c, const Grid<int>& closed) {
  const auto x = decision_from_status(c, Topology::build(c), closed);
  if (!x) throw std::runtime_error("pattern is not radial");
  return *x;
}

// Two buses: root "a" (100 kW, weight 10, 200 kW unit) feeding "b" (80 kW, weight 1).
CaseData two_bus(double dg = 200.0) {
  return make_case({{"a", 100.0, 10.0, dg}, {"b", 80.0, 1.0}}, {{"a", "b", {0.1, 0.2}}}, 2, 1);
}

}  // namespace

TEST(Index, CountsAndDecode) {
  const auto c = build_ieee37_case();
  const auto idx = index_variables(c);
  const int T = 4, N = 36, E = 39, G = 3;
  EXPECT_EQ(idx.count(VarKind::kC), 2 * E * T);
  EXPECT_EQ(idx.count(VarKind::kPG), G * T);
  EXPECT_EQ(idx.count(VarKind::kV), N * T);
  EXPECT_EQ(idx.total(), T * (2 * E * 2 + N + 2 * E + 2 * G + 2 * N + 2 * E + N + 2 * E));
  for (int col = 0; col < idx.total(); col += 37) {
    const auto [k, e, t] = idx.decode(col);
    EXPECT_EQ(idx.col(k, e, t), col);
  }
  EXPECT_THROW((void)idx.col(VarKind::kU, E, 0), std::out_of_range);
}

TEST(Radiality, TriangleEnumeration) {
  // One root: 64 arc patterns; the accepted ones are spanning forests
  // oriented away from the root.
  const auto c = make_case({{"r", 10, 1, 50}, {"p", 10, 1}, {"q", 10, 1}},
                           {{"r", "p"}, {"p", "q"}, {"q", "r"}}, 1, 1);
  const auto res = oracle::arc_enumeration(c);
  EXPECT_EQ(res.patterns, 64);
  EXPECT_TRUE(res.mismatches.empty()) << "first mismatch mask " << res.mismatches.front();
  // empty, r-p, r-q, r-p-q, r-q-p, p-r-q
  EXPECT_EQ(res.accepted, 6);
}

TEST(Radiality, MilpMatchesGraphOnSmallNetworks) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 6; ++k) {
    const auto c = fixture::random_case(rng, 5, 1, 1);
    const auto res = oracle::arc_enumeration(c);
    EXPECT_TRUE(res.mismatches.empty()) << "case " << k << " mask " << res.mismatches.front();
    EXPECT_GE(res.accepted, 1);
  }
  const auto f = oracle::arc_enumeration(fixture::four_node_fixture());
  EXPECT_TRUE(f.mismatches.empty());
}

TEST(Radiality, CheckerReportsViolations) {
  const auto c = fixture::four_node_fixture();
  Grid<int> closed{{1, 1}, {0, 0}, {1, 1}, {0, 0}};
  auto x = from_closed(c, closed);
  EXPECT_TRUE(check_radiality_all(x, c).ok);

  auto cyc = x;
  cyc.c[2][0] = 1;  // close 2-3 as well: two roots joined
  auto r = check_radiality(cyc, c, 0);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.violations.front().find("multiple roots"), std::string::npos);

  auto flipped = x;
  std::swap(flipped.c[0][1], flipped.c[1][1]);
  r = check_radiality_all(flipped, c);
  ASSERT_FALSE(r.ok);
  EXPECT_EQ(r.violations.front().rfind("t=1: arc orientation", 0), 0u) << r.violations.front();

  auto orphan = x;
  orphan.sv_tp[1][0] = 1.0;
  EXPECT_FALSE(check_radiality(orphan, c, 0).ok);
}

TEST(Radiality, DecisionFromStatusRejectsLoops) {
  const auto c = fixture::four_node_fixture();
  const Topology topo = Topology::build(c);
  EXPECT_FALSE(decision_from_status(c, topo, {{1, 1}, {1, 1}, {0, 0}, {0, 0}}).has_value());  // joins both roots
  EXPECT_TRUE(decision_from_status(c, topo, {{0, 0}, {0, 0}, {0, 0}, {0, 0}}).has_value());
  const auto x = decision_from_status(c, topo, {{1, 0}, {0, 0}, {0, 0}, {0, 1}});
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ(x->v_op[0][1], 1);
  EXPECT_EQ(x->v_cl[3][1], 1);
  EXPECT_EQ(x->v_cl[3][0], 0);
}

TEST(Dispatch, IntactNetworkServesEverything) {
  const auto c = two_bus();
  const auto x = from_closed(c, {{1, 1}});
  const auto d = evaluate_q(x, all_intact(1, 2), c);
  EXPECT_NEAR(d.objective, 0.0, 1e-7);
  EXPECT_LT(balance_residual(d, c), 1e-9);
  EXPECT_NEAR(d.v[0][0], 1.0, 1e-12);
  EXPECT_NEAR(d.pf[0][0], 80.0, 1e-6);
}

TEST(Dispatch, FailedLineShedsDownstreamLoad) {
  const auto c = two_bus();
  const auto x = from_closed(c, {{1, 1}});
  ScenarioRealization u = all_intact(1, 2);
  u.u[0][1] = 0;
  const auto d = evaluate_q(x, u, c);
  EXPECT_NEAR(d.objective, 80.0, 1e-6);  // weight 1 * 80 kW in the second step
  EXPECT_NEAR(d.shed[1][1], 80.0, 1e-6);
  EXPECT_NEAR(recomputed_objective(d, c), d.objective, 1e-6);
}

TEST(Dispatch, CapacityShortfallShedsCheapestLoad) {
  const auto c = two_bus(150.0);
  auto big = c;
  big.nodes[1].demand_p = {80.0, 80.0};
  big.dgs[0].p_max = {150.0, 150.0};
  const auto x = from_closed(big, {{1, 1}});
  const auto d = evaluate_q(x, all_intact(1, 2), big);
  // 180 kW of load, 150 kW of supply: 30 kW at weight 1 in each step.
  EXPECT_NEAR(d.objective, 60.0, 1e-6);
  EXPECT_NEAR(d.shed[0][0], 0.0, 1e-6);
}

TEST(Dispatch, OpenLineIsolatesBus) {
  const auto c = two_bus();
  const auto x = from_closed(c, {{0, 1}});
  const auto d = evaluate_q(x, all_intact(1, 2), c);
  EXPECT_NEAR(d.objective, 80.0, 1e-6);
}

TEST(Dispatch, MoreFailuresNeverHelp) {
  const auto c = fixture::four_node_fixture();
  const SecondStageModel m(c);
  const auto x = from_closed(c, {{1, 1}, {0, 0}, {1, 1}, {0, 0}});
  const int E = 4, T = 2;
  // Every monotone trajectory against each of its one-more-failure successors.
  for (unsigned bits = 0; bits < (1u << (E * T)); ++bits) {
    ScenarioRealization u = all_intact(E, T);
    for (int e = 0; e < E; ++e)
      for (int t = 0; t < T; ++t) u.u[e][t] = (bits >> (e * T + t)) & 1u;
    if (!is_monotone(u)) continue;
    const double q = m.evaluate(x, u).objective;
    for (int e = 0; e < E; ++e)
      for (int t = 0; t < T; ++t) {
        if (!u.u[e][t]) continue;
        auto v = u;
        for (int s = t; s < T; ++s) v.u[e][s] = 0;
        EXPECT_GE(m.evaluate(x, v).objective, q - 1e-7);
      }
  }
}

TEST(Dispatch, Ieee37HygieneAtBaseCase) {
  const auto c = build_ieee37_case();
  const Topology topo = Topology::build(c);
  Grid<int> closed = make_grid<int>(topo.num_edges, c.horizon_steps);
  for (int e = 0; e < topo.num_edges; ++e)
    for (int t = 0; t < c.horizon_steps; ++t) closed[e][t] = c.edges[e].initially_closed;
  // The normal tree joins the three units; open the lines next to two of them.
  for (int e = 0; e < topo.num_edges; ++e) {
    const auto& ed = c.edges[e];
    if ((ed.from_node == "713" && ed.to_node == "704") || (ed.from_node == "734" && ed.to_node == "710"))
      for (int t = 0; t < c.horizon_steps; ++t) closed[e][t] = 0;
  }
  const auto x = decision_from_status(c, topo, closed);
  ASSERT_TRUE(x.has_value());
  EXPECT_TRUE(check_radiality_all(*x, c).ok);
  const auto d = evaluate_q(*x, all_intact(topo.num_edges, c.horizon_steps), c);
  EXPECT_LT(balance_residual(d, c), 1e-6);
  for (int r : topo.roots)
    for (int t = 0; t < c.horizon_steps; ++t) EXPECT_NEAR(d.v[r][t], 1.0, 1e-9);
  EXPECT_GT(d.objective, 0.0);  // 80 % capacity
  EXPECT_NEAR(recomputed_objective(d, c), d.objective, 1e-6);
}
