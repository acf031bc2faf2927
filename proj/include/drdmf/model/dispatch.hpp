#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "drdmf/errors.hpp"
#include "drdmf/model/decision.hpp"
#include "drdmf/model/systems.hpp"
#include "drdmf/solver/solve.hpp"

namespace drdmf {

/// Case, index and second-stage system bundled for repeated Q(x,u)
/// evaluations. Immutable after construction.
class SecondStageModel {
 public:
  explicit SecondStageModel(const CaseData& c)
      : case_(c), topo_(Topology::build(c)), idx_(VariableIndex::build(topo_)),
        system_(build_second_stage(c, idx_)) {
    local_.assign(static_cast<std::size_t>(idx_.total()), -1);
    for (std::size_t k = 0; k < system_.y_columns.size(); ++k) local_[system_.y_columns[k]] = static_cast<int>(k);
  }

  [[nodiscard]] const CaseData& case_data() const { return case_; }
  [[nodiscard]] const Topology& topology() const { return topo_; }
  [[nodiscard]] const VariableIndex& index() const { return idx_; }
  [[nodiscard]] const AffineSystem& system() const { return system_; }

  /// The dispatch LP with x and u fixed. Rows with a single y term become
  /// column bounds.
  [[nodiscard]] solver::ProblemSpec dispatch_problem(const FirstStageDecision& x,
                                                     const ScenarioRealization& u) const {
    const auto v = scenario_values(u, idx_, first_stage_values(x, idx_));
    solver::ProblemSpec p;
    for (int col : system_.y_columns) p.add_column(-kInf, kInf, 0.0, false, idx_.name(col));
    for (const auto& t : system_.cost) p.objective[local_[t.col]] += t.coef;
    p.objective_offset = system_.cost_constant;
    for (const auto& r : system_.rows) {
      const double rhs = AffineSystem::fixed_rhs(r, v);
      if (r.y.size() == 1) {
        auto& col = p.columns[local_[r.y[0].col]];
        const double bound = rhs / r.y[0].coef;
        const bool upper = r.y[0].coef > 0;
        if (r.sense == Sense::kEqual) {
          col.lower = std::max(col.lower, bound);
          col.upper = std::min(col.upper, bound);
        } else if (upper) {
          col.upper = std::min(col.upper, bound);
        } else {
          col.lower = std::max(col.lower, bound);
        }
        continue;
      }
      solver::Row row;
      for (const auto& t : r.y) {
        row.index.push_back(local_[t.col]);
        row.value.push_back(t.coef);
      }
      row.sense = r.sense;
      row.rhs = rhs;
      row.tag = r.tag;
      p.rows.push_back(std::move(row));
    }
    // Bounds may cross by round-off when a gate closes a column to zero.
    for (auto& col : p.columns)
      if (col.lower > col.upper && col.lower - col.upper < 1e-12) col.lower = col.upper;
    return p;
  }

  /// Optimal dispatch LP result, y ordered as system().y_columns.
  [[nodiscard]] solver::SolveResult solve_dispatch(const FirstStageDecision& x, const ScenarioRealization& u,
                                                   const solver::SolveOptions& opts = {}) const {
    const auto p = dispatch_problem(x, u);
    auto res = solver::solve(p, opts);
    if (res.status != solver::Status::kOptimal)
      throw SolverFailure("dispatch LP", res.status, res.message);
    return res;
  }

  /// Q(x,u): minimum weighted shedding for a fixed boundary and scenario.
  [[nodiscard]] DispatchResult evaluate(const FirstStageDecision& x, const ScenarioRealization& u,
                                        const solver::SolveOptions& opts = {}) const {
    const auto res = solve_dispatch(x, u, opts);
    return extract(res.primal, res.objective);
  }

  /// Maps a local y vector (ordered as y_columns) to a DispatchResult in kW.
  [[nodiscard]] DispatchResult extract(const std::vector<double>& y, double objective) const {
    const int T = idx_.horizon();
    const double sb = case_.s_base_kva;
    DispatchResult d;
    auto grid = [&](VarKind k, double scale) {
      auto g = make_grid<double>(idx_.elements(k), T);
      for (int e = 0; e < idx_.elements(k); ++e)
        for (int t = 0; t < T; ++t) g[e][t] = y[local_[idx_.col(k, e, t)]] * scale;
      return g;
    };
    d.pg = grid(VarKind::kPG, sb);
    d.qg = grid(VarKind::kQG, sb);
    d.s_p = grid(VarKind::kSp, sb);
    d.s_q = grid(VarKind::kSq, sb);
    d.pf = grid(VarKind::kPF, sb);
    d.qf = grid(VarKind::kQF, sb);
    d.v = grid(VarKind::kV, 1.0);
    d.delta = grid(VarKind::kDelta, 1.0);
    d.shed = make_grid<double>(topo_.num_nodes, T);
    for (int i = 0; i < topo_.num_nodes; ++i)
      for (int t = 0; t < T; ++t) {
        const double dem = case_.nodes[i].demand_p[t];
        d.s_p[i][t] = std::clamp(d.s_p[i][t], 0.0, dem);
        d.shed[i][t] = dem - d.s_p[i][t];
      }
    d.objective = objective;
    return d;
  }

  [[nodiscard]] int local_column(int global) const { return local_[global]; }

 private:
  CaseData case_;
  Topology topo_;
  VariableIndex idx_;
  AffineSystem system_;
  std::vector<int> local_;
};

inline DispatchResult evaluate_q(const FirstStageDecision& x, const ScenarioRealization& u, const CaseData& c,
                                 const solver::SolveOptions& opts = {}) {
  return SecondStageModel(c).evaluate(x, u, opts);
}

/// Largest nodal balance residual (p.u.) of a dispatch, recomputed from its fields.
inline double balance_residual(const DispatchResult& d, const CaseData& c) {
  const Topology topo = Topology::build(c);
  const double sb = c.s_base_kva;
  double worst = 0.0;
  for (int t = 0; t < topo.horizon; ++t)
    for (int i = 0; i < topo.num_nodes; ++i) {
      double p = d.s_p[i][t], q = d.s_q[i][t];
      for (int e : topo.incident[i]) {
        const double sign = topo.edge_from[e] == i ? 1.0 : -1.0;
        p += sign * d.pf[e][t];
        q += sign * d.qf[e][t];
      }
      for (int g : topo.dgs_at[i]) {
        p -= d.pg[g][t];
        q -= d.qg[g][t];
      }
      worst = std::max({worst, std::abs(p) / sb, std::abs(q) / sb});
    }
  return worst;
}

/// sum_t sum_i w_i * (demand - served), recomputed from the dispatch fields.
inline double recomputed_objective(const DispatchResult& d, const CaseData& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.nodes.size(); ++i)
    for (std::size_t t = 0; t < d.s_p[i].size(); ++t) s += c.nodes[i].weight * (c.nodes[i].demand_p[t] - d.s_p[i][t]);
  return s;
}

}  // namespace drdmf
