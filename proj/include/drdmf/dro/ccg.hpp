#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "drdmf/dro/master.hpp"
#include "drdmf/dro/subproblem.hpp"

namespace drdmf {

struct IterationRecord {
  int iteration = 0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double subproblem_value = 0.0;
  double master_seconds = 0.0;
  double subproblem_seconds = 0.0;
  double linearization_error = 0.0;
  double max_bilinear_dual = 0.0;
  ScenarioRealization scenario;
};

/// Cut pool, bounds and log of a C&CG run.
struct CcgState {
  std::vector<ScenarioRealization> cut_scenarios;
  double lower_bound = -std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();
  Beta beta;
  std::vector<IterationRecord> log;

  [[nodiscard]] double gap() const {
    if (!std::isfinite(upper_bound) || !std::isfinite(lower_bound)) return std::numeric_limits<double>::infinity();
    return (upper_bound - lower_bound) / std::max(1.0, std::abs(upper_bound));
  }
};

struct WorstPoint {
  ScenarioRealization u;
  double probability = 0.0;
  double q_value = 0.0;
};

struct Solution {
  Method method = Method::kDrDmf;
  FirstStageDecision first_stage;
  Beta beta;
  double objective = 0.0;
  std::vector<WorstPoint> worst_scenarios;
  CcgState state;
  bool converged = false;
  std::string diagnostic;
  double max_linearization_error = 0.0;
  double max_bilinear_dual = 0.0;
  double max_sv_fraction = 0.0;
};

/// Incumbent candidate. With a beta the candidate is priced at that beta
/// (one subproblem), otherwise by the full dualized value.
struct CcgSeed {
  FirstStageDecision x;
  std::optional<Beta> beta;
};

struct CcgOptions {
  double tol = 1e-6;
  int max_iter = 50;
  /// Wall-clock budget for the iteration loop in seconds; checked between iterations.
  double time_budget = std::numeric_limits<double>::infinity();
  MasterOptions master;
  SubproblemOptions subproblem;
  /// Known first-stage decisions evaluated up front as incumbents.
  std::vector<CcgSeed> seeds;
  /// Scenarios put into the master before the first iteration (any u in the
  /// support is a valid cut, e.g. the worst support of a related run).
  std::vector<ScenarioRealization> initial_cuts;
  /// Also price every candidate at its marginal-damage beta (see
  /// marginal_beta). Costs one extra subproblem per iteration; on large cases
  /// the master's own beta is often far from optimal and its bound useless.
  bool price_marginal = false;
  /// Called after every iteration (progress output).
  std::function<void(const IterationRecord&)> on_iteration;
};

/// Worst-case distribution over a finite scenario set for fixed x:
/// max sum p_s q_s  s.t. sum p = 1, sum_s p_s (1 - u^s_et) <= mu_et, p >= 0.
inline std::vector<WorstPoint> worst_distribution(const CaseData& c, const std::vector<ScenarioRealization>& us,
                                                  const std::vector<double>& q, double* value = nullptr,
                                                  const solver::SolveOptions& opts = {}) {
  solver::ProblemSpec p;
  for (std::size_t s = 0; s < us.size(); ++s) p.add_column(0.0, solver::kInf, -q[s]);
  std::vector<int> all(us.size());
  for (std::size_t s = 0; s < us.size(); ++s) all[s] = static_cast<int>(s);
  p.add_row(all, std::vector<double>(us.size(), 1.0), solver::Sense::kEqual, 1.0, "sum", "prob");
  for (std::size_t e = 0; e < c.edges.size(); ++e)
    for (int t = 0; t < c.horizon_steps; ++t) {
      std::vector<int> ix;
      std::vector<double> v;
      for (std::size_t s = 0; s < us.size(); ++s)
        if (!us[s].u[e][t]) {
          ix.push_back(static_cast<int>(s));
          v.push_back(1.0);
        }
      if (!ix.empty()) p.add_row(ix, v, solver::Sense::kLessEqual, c.edges[e].mu_max[t], {}, "moment");
    }
  const auto res = solver::solve(p, opts);
  if (res.status != solver::Status::kOptimal) throw SolverFailure("worst-distribution LP", res.status, res.message);
  if (value) *value = -res.objective;
  std::vector<WorstPoint> out;
  for (std::size_t s = 0; s < us.size(); ++s)
    if (res.primal[s] > 1e-12) out.push_back({us[s], res.primal[s], q[s]});
  return out;
}

struct DualizedValue {
  double value = 0.0;
  Beta beta;
  std::vector<ScenarioRealization> scenarios;
  std::vector<double> q;
  int iterations = 0;
  double max_linearization_error = 0.0;
  double max_bilinear_dual = 0.0;
};

/// min_{0 <= beta <= beta_bound} sum (mu-1) beta + max_u [Q(x,u) + sum u beta]
/// for a fixed x, by cutting planes in beta. Each cut is q_s + u^s.beta with
/// q_s = Q(x,u^s), so the master is a small LP.
inline DualizedValue dualized_value(const FirstStageDecision& x, const SecondStageModel& model, double tol = 1e-10,
                                    int max_iter = 200, const SubproblemOptions& sopt = {},
                                    bool robust = false) {
  const auto& c = model.case_data();
  const int E = static_cast<int>(c.edges.size());
  const int T = c.horizon_steps;
  const Subproblem sub(model);
  DualizedValue out;
  out.beta = zero_beta(c);
  double ub = std::numeric_limits<double>::infinity();
  Beta beta = zero_beta(c);
  solver::ProblemSpec lp;
  for (int e = 0; e < E; ++e)
    for (int t = 0; t < T; ++t) lp.add_column(0.0, robust ? 0.0 : c.beta_bound, robust ? 0.0 : c.edges[e].mu_max[t] - 1.0);
  const int eta = lp.add_column(-solver::kInf, solver::kInf, 1.0);
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    const auto sp = sub.solve(x, beta, sopt);
    out.max_linearization_error = std::max(out.max_linearization_error, sp.linearization_error);
    out.max_bilinear_dual = std::max(out.max_bilinear_dual, sp.max_bilinear_dual);
    const double cand = (robust ? 0.0 : moment_constant(c, beta)) + sp.value;
    if (cand < ub) {
      ub = cand;
      out.beta = beta;
    }
    const bool known = std::find(out.scenarios.begin(), out.scenarios.end(), sp.u) != out.scenarios.end();
    if (!known) {
      out.scenarios.push_back(sp.u);
      out.q.push_back(sp.q_value);
      std::vector<int> ix{eta};
      std::vector<double> v{1.0};
      for (int e = 0; e < E; ++e)
        for (int t = 0; t < T; ++t)
          if (sp.u.u[e][t]) {
            ix.push_back(e * T + t);
            v.push_back(-1.0);
          }
      lp.add_row(ix, v, solver::Sense::kGreaterEqual, sp.q_value, {}, "cut");
    }
    const auto res = solver::solve(lp, sopt.solve);
    if (res.status != solver::Status::kOptimal) throw SolverFailure("beta master LP", res.status, res.message);
    const double lb = res.objective;
    if (ub - lb <= tol * std::max(1.0, std::abs(ub)) || known) break;
    for (int e = 0; e < E; ++e)
      for (int t = 0; t < T; ++t) beta[e][t] = std::max(0.0, res.primal[e * T + t]);
  }
  out.value = ub;
  return out;
}

/// beta[e][t] = Q(x, e fails from t) - Q(x, e fails from t+1), floored at 0:
/// the extra cost of losing line e one step earlier, nothing else failing.
/// Any beta >= 0 prices x from above; this one is usually close when line
/// damages add up, and costs E*T dispatch LPs.
inline Beta marginal_beta(const FirstStageDecision& x, const SecondStageModel& model,
                          const solver::SolveOptions& opts = {}) {
  const auto& c = model.case_data();
  const int E = static_cast<int>(c.edges.size());
  const int T = c.horizon_steps;
  const double q0 = model.evaluate(x, all_intact(E, T), opts).objective;
  Beta beta = zero_beta(c);
  for (int e = 0; e < E; ++e) {
    std::vector<double> from(static_cast<std::size_t>(T) + 1, q0);
    for (int t = 0; t < T; ++t) {
      auto u = all_intact(E, T);
      for (int s = t; s < T; ++s) u.u[e][s] = 0;
      from[t] = model.evaluate(x, u, opts).objective;
    }
    for (int t = 0; t < T; ++t) beta[e][t] = std::max(0.0, from[t] - from[t + 1]);
  }
  return beta;
}

/// Column-and-constraint generation for the two-stage min-max-min problem.
inline Solution run_ccg(const CaseData& c, Method method, const CcgOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const SecondStageModel model(c);
  Master master(model, method);
  const Subproblem sub(model);
  const auto t0 = std::chrono::steady_clock::now();
  Solution sol;
  sol.method = method;
  auto& st = sol.state;
  const int E = static_cast<int>(c.edges.size());
  const int T = c.horizon_steps;
  auto add_cut = [&](const ScenarioRealization& u) {
    if (std::find(st.cut_scenarios.begin(), st.cut_scenarios.end(), u) != st.cut_scenarios.end()) return false;
    master.add_cut(u);
    st.cut_scenarios.push_back(u);
    return true;
  };
  add_cut(all_intact(E, T));
  for (const auto& u : opt.initial_cuts) {
    if (!in_support(u, c.k) || u.u.size() != static_cast<std::size_t>(E))
      throw std::invalid_argument("initial cut outside the support");
    add_cut(u);
  }
  // Upper bound of x at its marginal-damage beta; the scenario joins the cuts.
  auto price_marginal = [&](const FirstStageDecision& x) -> double {
    if (!opt.price_marginal || !uses_beta(method)) return 0.0;
    const Beta beta = marginal_beta(x, model, opt.subproblem.solve);
    const auto sp = sub.solve(x, beta, opt.subproblem);
    sol.max_linearization_error = std::max(sol.max_linearization_error, sp.linearization_error);
    sol.max_bilinear_dual = std::max(sol.max_bilinear_dual, sp.max_bilinear_dual);
    add_cut(sp.u);
    const double value = moment_constant(c, beta) + sp.value;
    if (value < st.upper_bound) {
      st.upper_bound = value;
      sol.first_stage = x;
      sol.beta = beta;
    }
    return sp.wall_seconds;
  };

  for (const auto& seed : opt.seeds) {
    if (method == Method::kDrSmf) {
      bool constant = true;
      for (const auto& row : seed.x.c)
        for (int t = 1; t < T; ++t) constant = constant && row[t] == row[0];
      if (!constant) continue;
    }
    double value = 0.0;
    Beta beta = zero_beta(c);
    if (seed.beta && uses_beta(method)) beta = *seed.beta;
    if (seed.beta || !uses_beta(method)) {
      const auto sp = sub.solve(seed.x, beta, opt.subproblem);
      sol.max_linearization_error = std::max(sol.max_linearization_error, sp.linearization_error);
      sol.max_bilinear_dual = std::max(sol.max_bilinear_dual, sp.max_bilinear_dual);
      add_cut(sp.u);
      value = (uses_beta(method) ? moment_constant(c, beta) : 0.0) + sp.value;
    } else {
      const auto dv = dualized_value(seed.x, model, 1e-10, 200, opt.subproblem);
      sol.max_linearization_error = std::max(sol.max_linearization_error, dv.max_linearization_error);
      sol.max_bilinear_dual = std::max(sol.max_bilinear_dual, dv.max_bilinear_dual);
      for (const auto& u : dv.scenarios) add_cut(u);
      value = dv.value;
      beta = dv.beta;
    }
    if (value < st.upper_bound) {
      st.upper_bound = value;
      sol.first_stage = seed.x;
      sol.beta = beta;
    }
    price_marginal(seed.x);
  }

  bool master_limited = false;
  double master_time = opt.master.solve.time_limit;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - t0;
    if (it > 1 && spent.count() >= opt.time_budget) {
      sol.diagnostic = "time budget of " + std::to_string(opt.time_budget) + " s used after " +
                       std::to_string(it - 1) + " iterations, relative gap " + std::to_string(st.gap());
      break;
    }
    IterationRecord rec;
    rec.iteration = it;
    MasterOptions mopt = opt.master;
    mopt.solve.time_limit = std::min(master_time, std::max(5.0, opt.time_budget - spent.count()));
    if (std::isfinite(st.upper_bound) && !mopt.start) mopt.start = std::make_pair(sol.first_stage, sol.beta);
    const auto mr = master.solve(mopt);
    rec.master_seconds = mr.wall_seconds;
    master_limited = master_limited || !mr.proven_optimal;
    sol.max_sv_fraction = std::max(sol.max_sv_fraction, mr.max_sv_fraction);
    st.lower_bound = std::max(st.lower_bound, mr.lower_bound);

    const auto sp = sub.solve(mr.x, mr.beta, opt.subproblem);
    rec.subproblem_seconds = sp.wall_seconds;
    rec.subproblem_value = sp.value;
    rec.linearization_error = sp.linearization_error;
    rec.max_bilinear_dual = sp.max_bilinear_dual;
    rec.scenario = sp.u;
    sol.max_linearization_error = std::max(sol.max_linearization_error, sp.linearization_error);
    sol.max_bilinear_dual = std::max(sol.max_bilinear_dual, sp.max_bilinear_dual);
    const double cand = (uses_beta(method) ? moment_constant(c, mr.beta) : 0.0) + sp.value;
    if (cand < st.upper_bound) {
      st.upper_bound = cand;
      sol.first_stage = mr.x;
      sol.beta = mr.beta;
    }
    const std::size_t known = st.cut_scenarios.size();
    add_cut(sp.u);
    rec.subproblem_seconds += price_marginal(mr.x);
    // Numerical noise can leave LB a hair above UB at the optimum.
    st.lower_bound = std::min(st.lower_bound, st.upper_bound);
    rec.lower_bound = st.lower_bound;
    rec.upper_bound = st.upper_bound;
    st.log.push_back(rec);
    if (opt.on_iteration) opt.on_iteration(rec);
    if (st.gap() <= opt.tol) {
      sol.converged = true;
      break;
    }
    if (st.cut_scenarios.size() == known && !mr.proven_optimal && std::isfinite(master_time)) {
      // The master ran out of time on the incumbent; give it longer.
      master_time *= 2.0;
      continue;
    }
    if (st.cut_scenarios.size() == known) {
      sol.diagnostic = "stall: subproblem returned an existing cut at iteration " + std::to_string(it) +
                       " with relative gap " + std::to_string(st.gap()) +
                       (mr.proven_optimal ? "" : " (master stopped at a limit)");
      break;
    }
  }
  if (!sol.converged && sol.diagnostic.empty())
    sol.diagnostic = "not converged after " + std::to_string(opt.max_iter) + " iterations" +
                     (master_limited ? " (some masters stopped at a limit)" : "");
  if (!std::isfinite(st.upper_bound)) throw SolverFailure("C&CG", solver::Status::kError, "no incumbent");
  st.beta = sol.beta;
  sol.objective = st.upper_bound;

  // Worst distribution over the cut pool at the incumbent.
  std::vector<double> q;
  for (const auto& u : st.cut_scenarios) q.push_back(model.evaluate(sol.first_stage, u, opt.subproblem.solve).objective);
  if (uses_beta(method)) {
    sol.worst_scenarios = worst_distribution(c, st.cut_scenarios, q, nullptr, opt.subproblem.solve);
  } else {
    const auto it = std::max_element(q.begin(), q.end());
    const auto s = static_cast<std::size_t>(it - q.begin());
    sol.worst_scenarios.push_back({st.cut_scenarios[s], 1.0, q[s]});
  }
  return sol;
}

/// Value of a fixed first stage under a method: the dualized DRO value, or
/// the worst-case Q for ro-dmf.
inline double method_value(const FirstStageDecision& x, const SecondStageModel& model, Method method,
                           const SubproblemOptions& sopt = {}) {
  return dualized_value(x, model, 1e-10, 200, sopt, method == Method::kRoDmf).value;
}

}  // namespace drdmf
