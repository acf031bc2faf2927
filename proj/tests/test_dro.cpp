#include <gtest/gtest.h>

#include <random>
#include <set>

#include "drdmf/dro/brute_force.hpp"
#include "drdmf/dro/solution_io.hpp"
#include "drdmf/model/radiality.hpp"
#include "fixtures.hpp"

using namespace drdmf;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

CcgOptions tight() {
  CcgOptions o;
  o.tol = 1e-7;
  return o;
}

}  // namespace

TEST(Support, ClosedFormCounts) {
  EXPECT_EQ(support_size(2, 2, 1), 5u);  // intact + 2 lines x 2 failure steps
  EXPECT_EQ(support_size(3, 2, 2), 1u + 3 * 2 + 3 * 4);
  EXPECT_EQ(support_size(5, 3, 0), 1u);
  EXPECT_EQ(support_size(39, 4, 2), 1u + 39 * 4 + 741 * 16);
  EXPECT_EQ(support_size(39, 4, 5, 1000), 1001u);  // saturates
}

TEST(Support, EnumerationMatchesDefinition) {
  for (int E = 1; E <= 4; ++E)
    for (int T = 1; T <= 3; ++T)
      for (int k = 0; k <= E; ++k) {
        std::vector<fixture::LineDef> lines;
        std::vector<fixture::NodeDef> nodes{{"0", 10, 1, 50}};
        for (int e = 0; e < E; ++e) {
          nodes.push_back({std::to_string(e + 1), 10, 1});
          lines.push_back({"0", std::to_string(e + 1)});
        }
        const auto c = fixture::make_case(nodes, lines, T, k);
        const auto sup = enumerate_support(c);
        // Brute count over all 0/1 grids.
        std::size_t direct = 0;
        for (unsigned bits = 0; bits < (1u << (E * T)); ++bits) {
          ScenarioRealization u = all_intact(E, T);
          for (int e = 0; e < E; ++e)
            for (int t = 0; t < T; ++t) u.u[e][t] = (bits >> (e * T + t)) & 1u;
          direct += in_support(u, k);
        }
        EXPECT_EQ(sup.size(), direct) << E << " " << T << " " << k;
        EXPECT_EQ(sup.size(), support_size(E, T, k));
        std::set<ScenarioRealization> uniq(sup.begin(), sup.end());
        EXPECT_EQ(uniq.size(), sup.size());
        for (const auto& u : sup) EXPECT_TRUE(in_support(u, k));
      }
}

TEST(Support, TooLargeThrows) {
  auto c = fixture::four_node_fixture();
  EXPECT_THROW(enumerate_support(c, 3), SupportTooLarge);
}

TEST(Subproblem, MatchesEnumerationForRandomBeta) {
  const auto c = fixture::four_node_fixture();
  const SecondStageModel model(c);
  const Subproblem sub(model);
  const auto support = enumerate_support(c);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> b(0.0, 150.0);
  const auto designs = enumerate_first_stages(c, Method::kDrDmf);
  for (int k = 0; k < 6; ++k) {
    const auto& x = designs[(k * 7919) % designs.size()];
    Beta beta = zero_beta(c);
    for (auto& row : beta)
      for (auto& v : row) v = k == 0 ? 0.0 : b(rng);
    double best = -1e300;
    for (const auto& u : support) {
      double val = model.evaluate(x, u).objective;
      for (int e = 0; e < 4; ++e)
        for (int t = 0; t < 2; ++t) val += u.u[e][t] * beta[e][t];
      best = std::max(best, val);
    }
    const auto r = sub.solve(x, beta);
    EXPECT_LT(rel(r.value, best), 1e-8) << "design " << k;
    EXPECT_TRUE(in_support(r.u, c.k));
    EXPECT_LE(r.linearization_error, 1e-8);
    EXPECT_LT(r.max_bilinear_dual, r.dual_bound);
  }
}

TEST(Subproblem, TooSmallDualBoundIsReported) {
  const auto c = fixture::four_node_fixture();
  const SecondStageModel model(c);
  // Both units energize a neighbour, so failures cost load and the u rows carry duals.
  const auto x = *decision_from_status(c, Topology::build(c), {{1, 1}, {0, 0}, {1, 1}, {0, 0}});
  SubproblemOptions o;
  o.dual_bound = 1e-3;
  EXPECT_THROW(Subproblem(model).solve(x, zero_beta(c), o), DualBoundError);
}

TEST(Duality, DualizedEqualsPrimalOnRandomCases) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 4; ++k) {
    const auto c = fixture::random_case(rng, 3, 2, 1);
    const SecondStageModel model(c);
    const auto designs = enumerate_first_stages(c, Method::kDrDmf);
    for (int j = 0; j < 2; ++j) {
      const auto& x = designs[(j * 104729 + k) % designs.size()];
      const auto primal = brute_force_dro(x, model);
      const auto dual = dualized_value(x, model);
      EXPECT_LT(rel(dual.value, primal.value), 1e-6) << "case " << k;
      EXPECT_LE(dual.max_linearization_error, 1e-8);
    }
  }
}

TEST(Duality, WorstDistributionRespectsMoments) {
  const auto c = fixture::four_node_fixture();
  const SecondStageModel model(c);
  const auto x = enumerate_first_stages(c, Method::kDrDmf)[3];
  const auto bf = brute_force_dro(x, model);
  double mass = 0.0, expect = 0.0;
  auto fail = make_grid<double>(4, 2);
  for (const auto& w : bf.worst) {
    mass += w.probability;
    expect += w.probability * w.q_value;
    for (int e = 0; e < 4; ++e)
      for (int t = 0; t < 2; ++t) fail[e][t] += w.probability * (1 - w.u.u[e][t]);
  }
  EXPECT_NEAR(mass, 1.0, 1e-9);
  EXPECT_NEAR(expect, bf.value, 1e-6);
  for (int e = 0; e < 4; ++e)
    for (int t = 0; t < 2; ++t) EXPECT_LE(fail[e][t], c.edges[e].mu_max[t] + 1e-9);
}

TEST(Ccg, MatchesBruteForceOnFixture) {
  const auto c = fixture::four_node_fixture();
  for (Method m : {Method::kDrDmf, Method::kDrSmf, Method::kRoDmf}) {
    const auto bf = brute_force_design(c, m);
    const auto sol = run_ccg(c, m, tight());
    EXPECT_TRUE(sol.converged) << method_tag(m) << ": " << sol.diagnostic;
    EXPECT_LE(sol.state.log.size(), 10u);
    EXPECT_LT(rel(sol.objective, bf.value), 1e-4) << method_tag(m);
    EXPECT_TRUE(check_radiality_all(sol.first_stage, c).ok);
    EXPECT_LE(sol.max_linearization_error, 1e-8);
    for (const auto& r : sol.state.log) EXPECT_LE(r.lower_bound, r.upper_bound);
  }
}

TEST(Ccg, ConservatismOrdering) {
  const auto c = fixture::four_node_fixture();
  auto opt = tight();
  const auto ro = run_ccg(c, Method::kRoDmf, opt);
  const auto sm = run_ccg(c, Method::kDrSmf, opt);
  opt.seeds = {{ro.first_stage, ro.beta}, {sm.first_stage, sm.beta}};
  const auto dm = run_ccg(c, Method::kDrDmf, opt);
  EXPECT_LE(dm.objective, sm.objective + 1e-9);
  EXPECT_LE(dm.objective, ro.objective + 1e-9);
}

TEST(Ccg, SeedWithoutBetaIsPricedExactly) {
  const auto c = fixture::four_node_fixture();
  const SecondStageModel model(c);
  const auto x = enumerate_first_stages(c, Method::kDrDmf)[1];
  auto opt = tight();
  opt.max_iter = 1;
  opt.seeds = {{x, std::nullopt}};
  const auto sol = run_ccg(c, Method::kDrDmf, opt);
  EXPECT_LE(sol.objective, brute_force_dro(x, model).value + 1e-6);
}

TEST(Ccg, IterationLimitIsReported) {
  const auto c = fixture::four_node_fixture();
  auto opt = tight();
  opt.max_iter = 1;
  const auto sol = run_ccg(c, Method::kDrDmf, opt);
  if (!sol.converged) {
    EXPECT_NE(sol.diagnostic.find("not converged after 1"), std::string::npos);
  }
  EXPECT_THROW(run_ccg(c, Method::kDrDmf, CcgOptions{.tol = 0.0}), std::invalid_argument);
}

TEST(Ccg, ProgressCallbackSeesEveryIteration) {
  const auto c = fixture::four_node_fixture();
  auto opt = tight();
  int calls = 0;
  opt.on_iteration = [&](const IterationRecord&) { ++calls; };
  const auto sol = run_ccg(c, Method::kRoDmf, opt);
  EXPECT_EQ(calls, static_cast<int>(sol.state.log.size()));
}

TEST(Ccg, KZeroHasNoUncertainty) {
  auto c = fixture::four_node_fixture();
  c.k = 0;
  const auto d = run_ccg(c, Method::kDrDmf, tight());
  const auto r = run_ccg(c, Method::kRoDmf, tight());
  EXPECT_TRUE(d.converged);
  EXPECT_NEAR(d.objective, r.objective, 1e-6);
  EXPECT_EQ(d.worst_scenarios.size(), 1u);
  EXPECT_EQ(d.worst_scenarios.front().u, all_intact(4, 2));
}

TEST(Methods, TagsRoundTrip) {
  for (Method m : {Method::kDrDmf, Method::kDrSmf, Method::kRoDmf}) EXPECT_EQ(parse_method(method_tag(m)), m);
  EXPECT_THROW(parse_method("dro"), std::invalid_argument);
}

TEST(SolutionIo, RoundTripAndFingerprint) {
  const auto c = fixture::four_node_fixture();
  const auto sol = run_ccg(c, Method::kDrDmf, tight());
  const auto j = solution_to_json(sol, c);
  const auto back = solution_from_json(json::parse(j.dump()), c);
  EXPECT_EQ(back.first_stage, sol.first_stage);
  EXPECT_EQ(back.method, Method::kDrDmf);
  EXPECT_DOUBLE_EQ(back.objective, sol.objective);
  EXPECT_FALSE(j.contains("wall_seconds"));
  auto other = c;
  other.edges[0].mu_max[0] = 0.06;
  EXPECT_THROW(solution_from_json(j, other), SolutionError);
  auto bad = j;
  bad["steps"][0]["closed_lines"] = json::array({"1-2", "2-3", "3-4"});
  EXPECT_THROW(solution_from_json(bad, c), SolutionError);
}

TEST(Master, LiveRowsKeepEveryDispatch) {
  // With the whole support as cuts and x fixed, the master is the DRO value of x.
  const auto c = fixture::four_node_fixture();
  const SecondStageModel model(c);
  const auto support = enumerate_support(c);
  const auto designs = enumerate_first_stages(c, Method::kDrDmf);
  for (std::size_t k = 0; k < designs.size(); k += 97) {
    MasterOptions o;
    o.fixed_x = designs[k];
    const auto mr = solve_master(c, support, Method::kDrDmf, o);
    EXPECT_LT(rel(mr.objective, brute_force_dro(designs[k], model).value), 1e-7) << "design " << k;
  }
}

TEST(Master, WarmStartIsAccepted) {
  const auto c = fixture::four_node_fixture();
  const SecondStageModel model(c);
  Master m(model, Method::kDrDmf);
  for (const auto& u : enumerate_support(c)) m.add_cut(u);
  const auto x = enumerate_first_stages(c, Method::kDrDmf)[7];
  MasterOptions o;
  o.start = std::make_pair(x, marginal_beta(x, model));
  const auto cold = m.solve();
  const auto warm = m.solve(o);
  EXPECT_NEAR(warm.objective, cold.objective, 1e-6 * std::max(1.0, cold.objective));
}

TEST(Pricing, MarginalBetaGivesAnUpperBound) {
  const auto c = fixture::four_node_fixture();
  const SecondStageModel model(c);
  const Subproblem sub(model);
  const auto designs = enumerate_first_stages(c, Method::kDrDmf);
  for (std::size_t k = 0; k < designs.size(); k += 131) {
    const auto beta = marginal_beta(designs[k], model);
    for (const auto& row : beta)
      for (double b : row) EXPECT_GE(b, 0.0);
    const double priced = moment_constant(c, beta) + sub.solve(designs[k], beta).value;
    EXPECT_GE(priced, brute_force_dro(designs[k], model).value - 1e-6) << "design " << k;
  }
}

TEST(Pricing, MarginalBetaByHand) {
  // Single line, one DG: losing the line at step 1 costs both steps, at step 2 only the last.
  const auto c = fixture::make_case({{"1", 50, 1, 200}, {"2", 80, 10}}, {{"1", "2", {0.1, 0.2}}}, 2, 1);
  const SecondStageModel model(c);
  const auto x = *decision_from_status(c, Topology::build(c), {{1, 1}});
  const auto beta = marginal_beta(x, model);
  EXPECT_NEAR(beta[0][0], 10 * 80.0, 1e-6);
  EXPECT_NEAR(beta[0][1], 10 * 80.0, 1e-6);
}

TEST(Ccg, PricedRunStillMatchesBruteForce) {
  const auto c = fixture::four_node_fixture();
  auto opt = tight();
  opt.price_marginal = true;
  const auto sol = run_ccg(c, Method::kDrDmf, opt);
  EXPECT_TRUE(sol.converged) << sol.diagnostic;
  EXPECT_LT(rel(sol.objective, brute_force_design(c, Method::kDrDmf).value), 1e-4);
}

TEST(Ccg, TimeBudgetStopsTheLoop) {
  const auto c = fixture::four_node_fixture();
  auto opt = tight();
  opt.time_budget = 0.0;
  const auto sol = run_ccg(c, Method::kDrDmf, opt);
  if (!sol.converged) {
    EXPECT_EQ(sol.state.log.size(), 1u);
    EXPECT_NE(sol.diagnostic.find("time budget"), std::string::npos);
  }
}

TEST(Ccg, StartingFromAnotherRunsSupport) {
  const auto c = fixture::four_node_fixture();
  const auto sm = run_ccg(c, Method::kDrSmf, tight());
  auto opt = tight();
  for (const auto& p : sm.worst_scenarios) opt.initial_cuts.push_back(p.u);
  const auto sol = run_ccg(c, Method::kDrDmf, opt);
  EXPECT_TRUE(sol.converged) << sol.diagnostic;
  EXPECT_LT(rel(sol.objective, brute_force_design(c, Method::kDrDmf).value), 1e-4);

  auto bad = tight();
  ScenarioRealization u = all_intact(static_cast<int>(c.edges.size()), c.horizon_steps);
  for (auto& row : u.u) row.assign(row.size(), 0);  // every line down
  bad.initial_cuts.push_back(u);
  EXPECT_THROW(run_ccg(c, Method::kDrDmf, bad), std::invalid_argument);
}
