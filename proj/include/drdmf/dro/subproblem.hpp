#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "drdmf/errors.hpp"
#include "drdmf/model/decision.hpp"
#include "drdmf/model/dispatch.hpp"
#include "drdmf/solver/solve.hpp"

namespace drdmf {

/// Moment duals beta[edge][t] >= 0.
using Beta = Grid<double>;

inline Beta zero_beta(const CaseData& c) {
  return make_grid<double>(static_cast<int>(c.edges.size()), c.horizon_steps, 0.0);
}

/// Bound on the duals of rows that carry u. Bounding those duals is the same
/// as an exact L1 penalty on violating the rows; pushing one p.u. of power
/// through a failed line can serve at most one p.u. of load, worth at most
/// w_max * s_base, so twice that leaves the bound slack.
inline double mccormick_dual_bound(const CaseData& c) {
  double w = 0.0;
  for (const auto& n : c.nodes) w = std::max(w, n.weight);
  return 2.0 * w * c.s_base_kva;
}

struct SubproblemResult {
  ScenarioRealization u;
  double value = 0.0;             // max_u [Q(x,u) + sum u*beta]
  double q_value = 0.0;           // Q(x,u*) from the primal dispatch LP
  double milp_bound = 0.0;        // dual bound of the MILP (>= value)
  double linearization_error = 0.0;
  double max_bilinear_dual = 0.0; // min-norm optimal dual on the u rows, |.|
  double dual_bound = 0.0;        // the McCormick bound used
  double wall_seconds = 0.0;
};

struct SubproblemOptions {
  solver::SolveOptions solve{.mip_rel_gap = 1e-9, .mip_abs_gap = 1e-9};
  double dual_bound = 0.0;  // 0: mccormick_dual_bound(case)
  bool check_slackness = true;
};

/// max over u in D of [Q(x,u) + sum u*beta], via the LP dual of the dispatch
/// problem with every product (dual of a u-row) * u replaced by its
/// McCormick envelope.
class Subproblem {
 public:
  explicit Subproblem(const SecondStageModel& model) : m_(model) {}

  SubproblemResult solve(const FirstStageDecision& x, const Beta& beta, const SubproblemOptions& opt = {}) const {
    const auto& c = m_.case_data();
    const auto& idx = m_.index();
    const auto& sys = m_.system();
    const int T = idx.horizon();
    const int E = m_.topology().num_edges;
    const double bound = opt.dual_bound > 0.0 ? opt.dual_bound : mccormick_dual_bound(c);
    const auto xv = first_stage_values(x, idx);

    Layout L;
    solver::ProblemSpec p;  // minimize the negated dual objective
    // u columns
    L.u.assign(static_cast<std::size_t>(E * T), -1);
    for (int e = 0; e < E; ++e)
      for (int t = 0; t < T; ++t)
        L.u[e * T + t] = p.add_column(0.0, 1.0, -beta[e][t], true, "u_" + std::to_string(e) + "_" + std::to_string(t));
    // One dual per row; rows holding u terms also get product columns.
    for (std::size_t r = 0; r < sys.rows.size(); ++r) {
      const auto& row = sys.rows[r];
      double g = row.rhs;
      for (const auto& t : row.x) g -= t.coef * xv[t.col];
      const bool eq = row.sense == solver::Sense::kEqual;
      const bool bilinear = !row.u.empty();
      const double lo = bilinear ? -bound : -solver::kInf;
      const double hi = eq ? (bilinear ? bound : solver::kInf) : 0.0;
      L.pi.push_back(p.add_column(lo, hi, -g, false, "pi_" + std::to_string(r)));
      for (const auto& ut : row.u) {
        const auto [kind, e, t] = idx.decode(ut.col);
        (void)kind;
        const int uc = L.u[e * T + t];
        const int w = p.add_column(-solver::kInf, solver::kInf, ut.coef, false, "w_" + std::to_string(r));
        L.products.push_back({static_cast<int>(r), L.pi.back(), uc, w});
        // w = pi * u with pi in [lo, hi], u in {0,1}
        p.add_row({w, uc}, {1.0, -lo}, solver::Sense::kGreaterEqual, 0.0, {}, "mccormick");
        p.add_row({w, L.pi.back(), uc}, {1.0, -1.0, -hi}, solver::Sense::kGreaterEqual, -hi, {}, "mccormick");
        p.add_row({w, uc}, {1.0, -hi}, solver::Sense::kLessEqual, 0.0, {}, "mccormick");
        p.add_row({w, L.pi.back(), uc}, {1.0, -1.0, -lo}, solver::Sense::kLessEqual, -lo, {}, "mccormick");
      }
    }
    // Dual feasibility: A^T pi = cost, one row per y column.
    std::vector<std::vector<int>> col_rows(sys.y_columns.size());
    std::vector<std::vector<double>> col_vals(sys.y_columns.size());
    for (std::size_t r = 0; r < sys.rows.size(); ++r)
      for (const auto& t : sys.rows[r].y) {
        const int k = m_.local_column(t.col);
        col_rows[k].push_back(L.pi[r]);
        col_vals[k].push_back(t.coef);
      }
    std::vector<double> cost(sys.y_columns.size(), 0.0);
    for (const auto& t : sys.cost) cost[m_.local_column(t.col)] += t.coef;
    for (std::size_t k = 0; k < sys.y_columns.size(); ++k)
      p.add_row(col_rows[k], col_vals[k], solver::Sense::kEqual, cost[k], {}, "dual");
    // Support D: monotone, per-step budget.
    for (int e = 0; e < E; ++e)
      for (int t = 1; t < T; ++t)
        p.add_row({L.u[e * T + t], L.u[e * T + t - 1]}, {1.0, -1.0}, solver::Sense::kLessEqual, 0.0, {}, "support");
    for (int t = 0; t < T; ++t) {
      std::vector<int> ix;
      for (int e = 0; e < E; ++e) ix.push_back(L.u[e * T + t]);
      p.add_row(ix, std::vector<double>(ix.size(), 1.0), solver::Sense::kGreaterEqual,
                static_cast<double>(E - c.k), {}, "support");
    }
    p.objective_offset = -sys.cost_constant;

    const auto mip = solver::solve(p, opt.solve);
    if (mip.status != solver::Status::kOptimal) throw SolverFailure("subproblem MILP", mip.status, mip.message);
    // Re-solve with u fixed so the reported point is a vertex of the LP at u*.
    const auto fixed = solver::resolve_fixed(p, mip, opt.solve);
    if (fixed.status != solver::Status::kOptimal)
      throw SolverFailure("subproblem MILP (u fixed)", fixed.status, fixed.message);

    SubproblemResult out;
    out.dual_bound = bound;
    out.wall_seconds = mip.wall_seconds + fixed.wall_seconds;
    out.milp_bound = -mip.dual_bound;
    out.u.u = make_grid<std::uint8_t>(E, T);
    for (int e = 0; e < E; ++e)
      for (int t = 0; t < T; ++t) out.u.u[e][t] = fixed.primal[L.u[e * T + t]] > 0.5 ? 1 : 0;
    out.value = -fixed.objective;
    for (const auto& pr : L.products) {
      const double lit = fixed.primal[pr.pi] * fixed.primal[pr.u];
      out.linearization_error = std::max(out.linearization_error, std::abs(fixed.primal[pr.w] - lit));
    }

    const auto q = m_.evaluate(x, out.u, opt.solve);
    out.q_value = q.objective;
    if (opt.check_slackness) {
      out.max_bilinear_dual = min_norm_dual(p, L, fixed, out.value, opt.solve);
      if (out.max_bilinear_dual >= bound - 1e-6)
        throw DualBoundError("McCormick dual bound " + std::to_string(bound) +
                             " is active at the subproblem optimum; increase the dual bound");
    }
    return out;
  }

 private:
  struct Product {
    int row, pi, u, w;
  };
  struct Layout {
    std::vector<int> u, pi;
    std::vector<Product> products;
  };

  /// Smallest L1 norm of the u-row duals over all optimal duals at the fixed
  /// u*, with those duals unbounded. If even this solution touches the
  /// McCormick bound, the bound may have cut the true optimum.
  static double min_norm_dual(const solver::ProblemSpec& p, const Layout& L, const solver::SolveResult& fixed,
                              double value, const solver::SolveOptions& opts) {
    solver::ProblemSpec q = p;
    std::vector<bool> is_bilinear(static_cast<std::size_t>(q.num_columns()), false);
    for (const auto& pr : L.products) is_bilinear[pr.pi] = true;
    for (int j = 0; j < q.num_columns(); ++j) {
      auto& col = q.columns[j];
      if (col.integer) {
        col.lower = col.upper = std::round(fixed.primal[j]);
        col.integer = false;
      }
    }
    // Drop the McCormick rows and substitute w = pi*u directly.
    std::vector<double> obj(static_cast<std::size_t>(q.num_columns()), 0.0);
    solver::ProblemSpec r;
    r.columns = q.columns;
    r.objective = obj;
    std::vector<double> value_row(p.objective.begin(), p.objective.end());
    for (const auto& pr : L.products) {
      const double u = q.columns[pr.u].lower;
      // w column: fix to pi*u via an equality row.
      r.columns[pr.w] = {-solver::kInf, solver::kInf, false, {}};
      r.add_row({pr.w, pr.pi}, {1.0, -u}, solver::Sense::kEqual, 0.0);
    }
    for (const auto& row : q.rows)
      if (row.tag != "mccormick") r.rows.push_back(row);
    // Optimality: negated dual objective no worse than the optimum.
    std::vector<int> ix;
    std::vector<double> vals;
    for (int j = 0; j < q.num_columns(); ++j)
      if (value_row[j] != 0.0) {
        ix.push_back(j);
        vals.push_back(value_row[j]);
      }
    const double tol = 1e-9 * std::max(1.0, std::abs(value));
    r.add_row(ix, vals, solver::Sense::kLessEqual, -value - p.objective_offset + tol);
    // |pi| for the u-row duals: pi = pp - pn.
    for (const auto& pr : L.products) {
      auto& col = r.columns[pr.pi];
      col.lower = -solver::kInf;
      col.upper = solver::kInf;
      const int pp = r.add_column(0.0, solver::kInf, 1.0);
      const int pn = r.add_column(0.0, solver::kInf, 1.0);
      r.add_row({pr.pi, pp, pn}, {1.0, -1.0, 1.0}, solver::Sense::kEqual, 0.0);
    }
    // Duals of <= rows stay <= 0.
    for (int j = 0; j < p.num_columns(); ++j)
      if (is_bilinear[j] && p.columns[j].upper == 0.0) r.columns[j].upper = 0.0;
    const auto res = solver::solve(r, opts);
    if (res.status != solver::Status::kOptimal) throw SolverFailure("dual slackness check", res.status, res.message);
    double worst = 0.0;
    for (const auto& pr : L.products) worst = std::max(worst, std::abs(res.primal[pr.pi]));
    return worst;
  }

  const SecondStageModel& m_;
};

inline SubproblemResult solve_subproblem(const FirstStageDecision& x, const Beta& beta, const CaseData& c,
                                         const SubproblemOptions& opt = {}) {
  const SecondStageModel model(c);
  return Subproblem(model).solve(x, beta, opt);
}

}  // namespace drdmf
