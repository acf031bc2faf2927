#include <gtest/gtest.h>

#include <boost/math/distributions/binomial.hpp>

#include "drdmf/dro/brute_force.hpp"
#include "drdmf/scenario/compare.hpp"
#include "drdmf/scenario/sampler.hpp"
#include "fixtures.hpp"

using namespace drdmf;

namespace {

// Two-sided Clopper-Pearson interval for k successes in n trials.
std::pair<double, double> binomial_ci(std::size_t k, std::size_t n, double alpha) {
  using boost::math::binomial_distribution;
  return {binomial_distribution<>::find_lower_bound_on_p(double(n), double(k), alpha / 2),
          binomial_distribution<>::find_upper_bound_on_p(double(n), double(k), alpha / 2)};
}

}  // namespace

TEST(Sampler, DeterministicForSeed) {
  const auto c = fixture::four_node_fixture();
  SamplerConfig cfg;
  cfg.n_scenarios = 200;
  cfg.seed = 42;
  EXPECT_EQ(sample_scenarios(c, cfg), sample_scenarios(c, cfg));
  auto other = cfg;
  other.seed = 43;
  EXPECT_NE(sample_scenarios(c, cfg), sample_scenarios(c, other));
}

TEST(Sampler, MarginalsWithinBinomialIntervals) {
  const auto c = fixture::four_node_fixture();
  SamplerConfig cfg;
  cfg.n_scenarios = 10000;
  cfg.perturbation = 0.0;
  const auto s = sample_scenarios(c, cfg);
  for (int e = 0; e < 4; ++e)
    for (int t = 0; t < 2; ++t) {
      std::size_t failed = 0;
      for (const auto& u : s) failed += u.u[e][t] == 0;
      const auto [lo, hi] = binomial_ci(failed, s.size(), 1e-3);
      EXPECT_LE(lo, c.edges[e].mu_max[t]);
      EXPECT_GE(hi, c.edges[e].mu_max[t]);
    }
  for (const auto& u : s) EXPECT_TRUE(is_monotone(u));
}

TEST(Sampler, PerturbationKeepsMeanForSmallProbabilities) {
  // The factor is uniform around 1, so marginals stay unbiased while p*(1+d) <= 1.
  const auto c = fixture::four_node_fixture();
  SamplerConfig cfg;
  cfg.n_scenarios = 10000;
  cfg.perturbation = 0.3;
  cfg.seed = 9;
  const auto s = sample_scenarios(c, cfg);
  std::size_t failed = 0;
  for (const auto& u : s) failed += u.u[3][1] == 0;
  const auto [lo, hi] = binomial_ci(failed, s.size(), 1e-3);
  EXPECT_LE(lo, 0.1);
  EXPECT_GE(hi, 0.1);
}

TEST(Sampler, RejectsBadConfig) {
  const auto c = fixture::four_node_fixture();
  SamplerConfig cfg;
  cfg.n_scenarios = 0;
  EXPECT_THROW(sample_scenarios(c, cfg), std::invalid_argument);
  cfg.n_scenarios = 1;
  cfg.perturbation = -0.1;
  EXPECT_THROW(sample_scenarios(c, cfg), std::invalid_argument);
}

TEST(Evaluate, BoxStatsByHand) {
  const auto b = box_stats({1, 2, 3, 4, 5, 6, 7, 8, 100});
  EXPECT_DOUBLE_EQ(b.median, 5.0);
  EXPECT_DOUBLE_EQ(b.q1, 3.0);
  EXPECT_DOUBLE_EQ(b.q3, 7.0);
  EXPECT_DOUBLE_EQ(b.lo, 1.0);
  EXPECT_DOUBLE_EQ(b.hi, 8.0);
  ASSERT_EQ(b.outliers.size(), 1u);
  EXPECT_DOUBLE_EQ(b.outliers[0], 100.0);
  EXPECT_DOUBLE_EQ(quantile_sorted({0, 10}, 0.25), 2.5);
}

TEST(Evaluate, ArithmeticMatchesDirectDispatch) {
  auto c = fixture::four_node_fixture();
  c.step_hours = 0.5;
  const SecondStageModel model(c);
  const auto x = enumerate_first_stages(c, Method::kDrDmf)[5];
  SamplerConfig cfg;
  cfg.n_scenarios = 50;
  const auto scen = sample_scenarios(c, cfg);
  const auto st = evaluate_policy(x, scen, model);
  double total = 0.0;
  int outside = 0;
  for (const auto& u : scen) {
    total += model.evaluate(x, u).objective * c.step_hours;  // $/h x h
    outside += !in_support(u, c.k);
  }
  EXPECT_NEAR(st.expected_total, total / 50.0, 1e-6);
  double steps = 0.0;
  for (double v : st.step_expected) steps += v;
  EXPECT_NEAR(steps, st.expected_total, 1e-9);
  EXPECT_DOUBLE_EQ(st.out_of_support_fraction, outside / 50.0);
  EXPECT_LT(st.max_balance_residual, 1e-6);
  EXPECT_LT(st.max_root_voltage_dev, 1e-9);
  EXPECT_LT(st.max_served_box_violation, 1e-6);
}

TEST(Compare, IdenticalPoliciesAreNotSignificant) {
  const auto c = fixture::four_node_fixture();
  const SecondStageModel model(c);
  const auto x = enumerate_first_stages(c, Method::kDrDmf)[2];
  SamplerConfig cfg;
  cfg.n_scenarios = 40;
  const auto t = compare_methods({"a", "b"}, {x, x}, sample_scenarios(c, cfg), model);
  EXPECT_DOUBLE_EQ(t.reduction[1], 0.0);
  EXPECT_FALSE(t.tests[1].significant);
  std::ostringstream os;
  write_table_csv(os, t);
  EXPECT_EQ(os.str().substr(0, 10), "step,a,b\n1");
  EXPECT_NE(os.str().find("Total,"), std::string::npos);
}

TEST(Compare, PairedTestAgainstKnownValue) {
  // differences 1,2,3,4,5: mean 3, sd sqrt(2.5), t = 3 / (sqrt(2.5)/sqrt(5)) = 4.2426
  const std::vector<double> a{0, 0, 0, 0, 0}, b{1, 2, 3, 4, 5};
  const auto r = paired_greater(a, b);
  EXPECT_NEAR(r.t_stat, 4.242640687, 1e-8);
  EXPECT_NEAR(r.p_value, 0.006624, 1e-5);
  EXPECT_TRUE(r.significant);
  EXPECT_FALSE(paired_greater(b, a).significant);
}
