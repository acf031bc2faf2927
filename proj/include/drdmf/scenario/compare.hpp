#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "drdmf/scenario/evaluate.hpp"

namespace drdmf {

/// One-sided paired t-test of H1: mean(b - a) > 0.
struct PairedTest {
  double mean_diff = 0.0;
  double sd_diff = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  bool significant = false;  // at the requested confidence
};

inline PairedTest paired_greater(const std::vector<double>& a, const std::vector<double>& b, double confidence = 0.95) {
  PairedTest r;
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) return r;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += b[i] - a[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (b[i] - a[i] - mean) * (b[i] - a[i] - mean);
  r.mean_diff = mean;
  r.sd_diff = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  if (r.sd_diff == 0.0) {
    r.p_value = mean > 0.0 ? 0.0 : 1.0;
    r.t_stat = mean > 0.0 ? INFINITY : 0.0;
  } else if (n > 1) {
    r.t_stat = mean / (r.sd_diff / std::sqrt(static_cast<double>(n)));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.t_stat));
  }
  r.significant = r.p_value < 1.0 - confidence;
  return r;
}

struct ComparisonTable {
  std::vector<std::string> methods;
  std::vector<EvalStats> stats;
  /// reduction[m] = (total[m] - total[0]) / total[m]; 0 for m = 0.
  std::vector<double> reduction;
  /// tests[m] compares method m against method m-1 (m >= 1).
  std::vector<PairedTest> tests;
};

inline ComparisonTable compare_methods(const std::vector<std::string>& methods,
                                       const std::vector<FirstStageDecision>& policies,
                                       const std::vector<ScenarioRealization>& scenarios,
                                       const SecondStageModel& model, const solver::SolveOptions& opts = {}) {
  ComparisonTable t;
  t.methods = methods;
  for (const auto& x : policies) t.stats.push_back(evaluate_policy(x, scenarios, model, opts));
  for (std::size_t m = 0; m < t.stats.size(); ++m) {
    const double tot = t.stats[m].expected_total, base = t.stats[0].expected_total;
    t.reduction.push_back(m == 0 || tot == 0.0 ? 0.0 : (tot - base) / tot);
    t.tests.push_back(m == 0 ? PairedTest{}
                             : paired_greater(t.stats[m - 1].scenario_total, t.stats[m].scenario_total));
  }
  return t;
}

inline nlohmann::json box_to_json(const BoxStats& b) {
  return {{"min", b.lo}, {"q1", b.q1}, {"median", b.median}, {"q3", b.q3}, {"max", b.hi}, {"outliers", b.outliers}};
}

inline nlohmann::json stats_to_json(const EvalStats& s) {
  return {{"expected_total", s.expected_total},
          {"step_expected", s.step_expected},
          {"scenarios", s.scenario_total.size()},
          {"box", box_to_json(s.box)},
          {"infeasible_events", s.infeasible_events},
          {"out_of_support_fraction", s.out_of_support_fraction},
          {"max_balance_residual", s.max_balance_residual},
          {"max_root_voltage_dev", s.max_root_voltage_dev},
          {"scenario_total", s.scenario_total}};
}

inline nlohmann::json table_to_json(const ComparisonTable& t) {
  nlohmann::json j;
  nlohmann::json methods = nlohmann::json::array();
  for (std::size_t m = 0; m < t.methods.size(); ++m) {
    nlohmann::json e = {{"method", t.methods[m]},
                        {"expected_total", t.stats[m].expected_total},
                        {"step_expected", t.stats[m].step_expected},
                        {"box", box_to_json(t.stats[m].box)},
                        {"out_of_support_fraction", t.stats[m].out_of_support_fraction}};
    if (m > 0) {
      e["reduction_of_first"] = t.reduction[m];
      e["paired_vs_previous"] = {{"mean_diff", t.tests[m].mean_diff},
                                 {"t", t.tests[m].t_stat},
                                 {"p_value", t.tests[m].p_value},
                                 {"significant_95", t.tests[m].significant}};
    }
    methods.push_back(std::move(e));
  }
  j["methods"] = std::move(methods);
  return j;
}

/// Rows: step 1..T, then Total; one column per method.
inline void write_table_csv(std::ostream& os, const ComparisonTable& t) {
  os.precision(10);
  os << "step";
  for (const auto& m : t.methods) os << ',' << m;
  os << '\n';
  const std::size_t T = t.stats.empty() ? 0 : t.stats[0].step_expected.size();
  for (std::size_t s = 0; s < T; ++s) {
    os << s + 1;
    for (const auto& st : t.stats) os << ',' << st.step_expected[s];
    os << '\n';
  }
  os << "Total";
  for (const auto& st : t.stats) os << ',' << st.expected_total;
  os << '\n';
}

inline void write_box_csv(std::ostream& os, const std::vector<std::string>& methods, const std::vector<EvalStats>& stats) {
  os.precision(10);
  os << "method,min,q1,median,q3,max,outliers\n";
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const auto& b = stats[m].box;
    os << methods[m] << ',' << b.lo << ',' << b.q1 << ',' << b.median << ',' << b.q3 << ',' << b.hi << ',';
    for (std::size_t k = 0; k < b.outliers.size(); ++k) os << (k ? ";" : "") << b.outliers[k];
    os << '\n';
  }
}

}  // namespace drdmf
