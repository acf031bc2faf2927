#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "drdmf/dro/support.hpp"
#include "drdmf/errors.hpp"
#include "drdmf/model/dispatch.hpp"

namespace drdmf {

/// Box-plot summary with 1.5 IQR whiskers: lo/hi are the extreme values
/// inside the whiskers, everything beyond them is listed in outliers.
struct BoxStats {
  double lo = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, hi = 0.0;
  std::vector<double> outliers;
};

/// Linear-interpolated quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  return i + 1 < v.size() ? v[i] + frac * (v[i + 1] - v[i]) : v[i];
}

inline BoxStats box_stats(std::vector<double> v) {
  BoxStats b;
  if (v.empty()) return b;
  std::sort(v.begin(), v.end());
  b.q1 = quantile_sorted(v, 0.25);
  b.median = quantile_sorted(v, 0.5);
  b.q3 = quantile_sorted(v, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
  b.lo = b.hi = b.median;
  bool first = true;
  for (double x : v) {
    if (x < lo_fence || x > hi_fence) {
      b.outliers.push_back(x);
      continue;
    }
    if (first) b.lo = x;
    first = false;
    b.hi = x;
  }
  return b;
}

struct EvalStats {
  std::vector<double> scenario_total;            // $ per scenario
  std::vector<std::vector<double>> scenario_step;  // [scenario][t], $
  std::vector<double> step_expected;             // $ per step
  double expected_total = 0.0;
  BoxStats box;
  int infeasible_events = 0;
  double out_of_support_fraction = 0.0;
  // numerical hygiene over all dispatch LPs
  double max_balance_residual = 0.0;   // p.u.
  double max_root_voltage_dev = 0.0;   // |V - 1| at grid-forming buses
  double max_served_box_violation = 0.0;  // kW
};

/// Recomputes expectations and box statistics from the per-scenario vectors.
inline void aggregate(EvalStats& st, int horizon) {
  const auto n = static_cast<double>(st.scenario_total.size());
  st.step_expected.assign(static_cast<std::size_t>(horizon), 0.0);
  for (const auto& row : st.scenario_step)
    for (int t = 0; t < horizon; ++t) st.step_expected[t] += row[t];
  for (auto& v : st.step_expected) v = n > 0 ? v / n : 0.0;
  st.expected_total =
      n > 0 ? std::accumulate(st.scenario_total.begin(), st.scenario_total.end(), 0.0) / n : 0.0;
  st.box = box_stats(st.scenario_total);
}

/// Runs the dispatch LP of a fixed boundary for every scenario and prices the
/// shed energy in $ (weight * kW * step_hours).
inline EvalStats evaluate_policy(const FirstStageDecision& x, const std::vector<ScenarioRealization>& scenarios,
                                 const SecondStageModel& model, const solver::SolveOptions& opts = {}) {
  const auto& c = model.case_data();
  const auto& topo = model.topology();
  const int T = c.horizon_steps;
  EvalStats st;
  std::vector<std::size_t> failed;
  int outside = 0;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& u = scenarios[s];
    if (!in_support(u, c.k)) ++outside;
    solver::SolveResult raw;
    try {
      raw = model.solve_dispatch(x, u, opts);
    } catch (const SolverFailure& e) {
      if (e.status() != solver::Status::kInfeasible)
        throw SolverFailure("dispatch LP of scenario " + std::to_string(s), e.status(), e.what());
      ++st.infeasible_events;
      failed.push_back(s);
      continue;
    }
    const auto& idx = model.index();
    for (int i = 0; i < topo.num_nodes; ++i)
      for (int t = 0; t < T; ++t) {
        const double sp = raw.primal[model.local_column(idx.col(VarKind::kSp, i, t))] * c.s_base_kva;
        const double over = std::max(sp - c.nodes[i].demand_p[t], -sp);
        st.max_served_box_violation = std::max(st.max_served_box_violation, over);
      }
    const DispatchResult d = model.extract(raw.primal, raw.objective);
    std::vector<double> step(static_cast<std::size_t>(T), 0.0);
    for (int i = 0; i < topo.num_nodes; ++i)
      for (int t = 0; t < T; ++t) step[t] += c.nodes[i].weight * d.shed[i][t] * c.step_hours;
    st.scenario_total.push_back(std::accumulate(step.begin(), step.end(), 0.0));
    st.scenario_step.push_back(std::move(step));

    st.max_balance_residual = std::max(st.max_balance_residual, balance_residual(d, c));
    for (int r : topo.roots)
      for (int t = 0; t < T; ++t) st.max_root_voltage_dev = std::max(st.max_root_voltage_dev, std::abs(d.v[r][t] - 1.0));
  }
  if (!failed.empty())
    throw SolverFailure("dispatch LP of scenario " + std::to_string(failed.front()), solver::Status::kInfeasible,
                        std::to_string(failed.size()) + " scenario(s) infeasible");
  st.out_of_support_fraction = scenarios.empty() ? 0.0 : static_cast<double>(outside) / scenarios.size();
  aggregate(st, T);
  return st;
}

}  // namespace drdmf
