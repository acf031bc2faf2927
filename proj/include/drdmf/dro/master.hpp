#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <stdexcept>
#include <string>
#include <vector>

#include "drdmf/dro/subproblem.hpp"
#include "drdmf/errors.hpp"
#include "drdmf/model/decision.hpp"
#include "drdmf/model/dispatch.hpp"
#include "drdmf/model/systems.hpp"
#include "drdmf/solver/solve.hpp"

namespace drdmf {

enum class Method { kDrDmf, kDrSmf, kRoDmf };

inline const char* method_tag(Method m) {
  switch (m) {
    case Method::kDrDmf: return "dr-dmf";
    case Method::kDrSmf: return "dr-smf";
    case Method::kRoDmf: return "ro-dmf";
  }
  return "dr-dmf";
}

inline Method parse_method(const std::string& s) {
  if (s == "dr-dmf") return Method::kDrDmf;
  if (s == "dr-smf") return Method::kDrSmf;
  if (s == "ro-dmf") return Method::kRoDmf;
  throw std::invalid_argument("unknown method '" + s + "' (expected dr-dmf, dr-smf or ro-dmf)");
}

inline bool uses_beta(Method m) { return m != Method::kRoDmf; }

/// sum_{e,t} (mu_max - 1) * beta
inline double moment_constant(const CaseData& c, const Beta& beta) {
  double s = 0.0;
  for (std::size_t e = 0; e < c.edges.size(); ++e)
    for (int t = 0; t < c.horizon_steps; ++t) s += (c.edges[e].mu_max[t] - 1.0) * beta[e][t];
  return s;
}

struct MasterResult {
  FirstStageDecision x;
  Beta beta;
  double objective = 0.0;    // incumbent value of the master
  double lower_bound = 0.0;  // proven bound (MILP dual bound)
  double max_sv_fraction = 0.0;  // distance of sv_tp from {0,1}
  double wall_seconds = 0.0;
  bool proven_optimal = true;  // false when a limit stopped the MILP
};

struct MasterOptions {
  solver::SolveOptions solve{.mip_rel_gap = 1e-9, .mip_abs_gap = 1e-9};
  /// Restrict the first stage to this decision (beta stays free).
  std::optional<FirstStageDecision> fixed_x;
  /// Feasible starting point handed to the MILP solver.
  std::optional<std::pair<FirstStageDecision, Beta>> start;
};

/// Master over (x, beta, eta) with one copy of the dispatch variables per cut.
class Master {
 public:
  Master(const SecondStageModel& model, Method method) : m_(model), method_(method) {
    const auto& c = m_.case_data();
    const auto& idx = m_.index();
    const auto first = build_first_stage(c, idx);
    const int T = idx.horizon();
    const int E = m_.topology().num_edges;
    // First-stage columns keep their global ids [0, offset(PG)).
    const int nfirst = idx.offset(VarKind::kPG);
    for (int j = 0; j < nfirst; ++j)
      p_.add_column(first.lower[j], first.upper[j], 0.0, first.integer[j], idx.name(j));
    for (const auto& r : first.rows) {
      solver::Row row;
      for (const auto& t : r.terms) {
        row.index.push_back(t.col);
        row.value.push_back(t.coef);
      }
      row.sense = r.sense;
      row.rhs = r.rhs;
      row.tag = r.tag;
      p_.rows.push_back(std::move(row));
    }
    if (method_ == Method::kDrSmf) {
      for (int a = 0; a < 2 * E; ++a)
        for (int t = 1; t < T; ++t)
          p_.add_row({idx.col(VarKind::kC, a, t), idx.col(VarKind::kC, a, 0)}, {1.0, -1.0}, solver::Sense::kEqual,
                     0.0, {}, "static");
    }
    // eta and beta live in units of 1/money_ dollars, which keeps the cut rows
    // near unit scale (weights times s_base would otherwise reach 1e5).
    money_ = 1.0 / c.s_base_kva;
    beta_.assign(static_cast<std::size_t>(E * T), -1);
    for (int e = 0; e < E; ++e)
      for (int t = 0; t < T; ++t) {
        const double hi = uses_beta(method_) ? c.beta_bound * money_ : 0.0;
        const double cost = uses_beta(method_) ? c.edges[e].mu_max[t] - 1.0 : 0.0;
        beta_[e * T + t] = p_.add_column(0.0, hi, cost, false, "beta_" + std::to_string(e) + "_" + std::to_string(t));
      }
    eta_ = p_.add_column(0.0, solver::kInf, 1.0, false, "eta");
  }

  /// Adds a scenario cut: a fresh copy y^s of the dispatch variables with
  /// G(x, u^s) rows and eta >= cost(y^s) + sum u^s * beta.
  void add_cut(const ScenarioRealization& u) {
    const auto& idx = m_.index();
    const auto& sys = m_.system();
    const int T = idx.horizon();
    const int s = static_cast<int>(cuts_.size());
    const auto uv = scenario_values(u, idx);
    const int base = p_.num_columns();
    cut_base_.push_back(base);
    for (int col : sys.y_columns)
      p_.add_column(-solver::kInf, solver::kInf, 0.0, false, idx.name(col) + "_s" + std::to_string(s));
    auto y = [&](int global) { return base + m_.local_column(global); };
    for (const auto& r : sys.rows) {
      double rhs = r.rhs;
      for (const auto& t : r.u) rhs -= t.coef * uv[t.col];
      solver::Row row;
      for (const auto& t : r.y) {
        row.index.push_back(y(t.col));
        row.value.push_back(t.coef);
      }
      for (const auto& t : r.x) {
        row.index.push_back(t.col);
        row.value.push_back(t.coef);
      }
      if (row.index.size() == 1 && r.x.empty()) {
        // Singleton y rows become bounds.
        auto& col = p_.columns[row.index[0]];
        const double b = rhs / row.value[0];
        if (r.sense == solver::Sense::kEqual) {
          col.lower = std::max(col.lower, b);
          col.upper = std::min(col.upper, b);
        } else if (row.value[0] > 0) {
          col.upper = std::min(col.upper, b);
        } else {
          col.lower = std::max(col.lower, b);
        }
        continue;
      }
      row.sense = r.sense;
      row.rhs = rhs;
      row.tag = r.tag;
      p_.rows.push_back(std::move(row));
    }
    add_energization(u, y);
    // eta - cost.y - sum u beta >= cost_constant
    solver::Row link;
    link.index.push_back(eta_);
    link.value.push_back(1.0);
    for (const auto& t : sys.cost) {
      link.index.push_back(y(t.col));
      link.value.push_back(-t.coef * money_);
    }
    const int E = m_.topology().num_edges;
    for (int e = 0; e < E; ++e)
      for (int t = 0; t < T; ++t)
        if (u.u[e][t]) {
          link.index.push_back(beta_[e * T + t]);
          link.value.push_back(-1.0);
        }
    link.sense = solver::Sense::kGreaterEqual;
    link.rhs = sys.cost_constant * money_;
    link.tag = "cut";
    p_.rows.push_back(std::move(link));
    cuts_.push_back(u);
  }

  [[nodiscard]] const std::vector<ScenarioRealization>& cuts() const { return cuts_; }
  /// Energization columns z[i][t] of cut s (absent for roots, which stay live).
  [[nodiscard]] int z_column(std::size_t s, int node, int t) const {
    return z_base_[s] + node * m_.index().horizon() + t;
  }
  [[nodiscard]] const solver::ProblemSpec& problem() const { return p_; }

  MasterResult solve(const MasterOptions& opt = {}) const {
    if (cuts_.empty()) throw std::logic_error("master needs at least one cut");
    const auto& idx = m_.index();
    solver::ProblemSpec p = p_;
    if (opt.fixed_x) {
      const auto v = first_stage_values(*opt.fixed_x, idx);
      for (int j = 0; j < idx.offset(VarKind::kPG); ++j) {
        p.columns[j].lower = p.columns[j].upper = v[j];
        p.columns[j].integer = false;
      }
    }
    if (opt.start) p.warm_start = start_vector(opt.start->first, opt.start->second, opt.solve);
    const auto res = solver::solve(p, opt.solve);
    if (res.status == solver::Status::kInfeasible)
      throw InfeasibleModel("master problem is infeasible: no radial boundary satisfies the switching limits");
    if (!res.has_solution()) throw SolverFailure("master MILP", res.status, res.message);
    MasterResult out;
    out.proven_optimal = res.status == solver::Status::kOptimal;
    out.wall_seconds = res.wall_seconds;
    std::vector<double> full(static_cast<std::size_t>(idx.total()), 0.0);
    std::copy(res.primal.begin(), res.primal.begin() + idx.offset(VarKind::kPG), full.begin());
    for (int j = idx.offset(VarKind::kSvTp); j < idx.offset(VarKind::kVCl); ++j)
      out.max_sv_fraction = std::max(out.max_sv_fraction, std::min(std::abs(full[j]), std::abs(1.0 - full[j])));
    // Rebuild the decision from its line status so f and sv are exact.
    const auto rounded = decision_from_values(full, idx);
    const auto exact = decision_from_status(m_.case_data(), m_.topology(), line_status(rounded, m_.topology().num_edges));
    if (!exact || exact->c != rounded.c)
      throw SolverFailure("master MILP", res.status, "optimal boundary failed the radiality rebuild");
    out.x = *exact;
    const int T = idx.horizon();
    out.beta = zero_beta(m_.case_data());
    for (std::size_t e = 0; e < out.beta.size(); ++e)
      for (int t = 0; t < T; ++t) out.beta[e][t] = std::max(0.0, res.primal[beta_[e * T + t]] / money_);
    out.objective = res.objective / money_;
    out.lower_bound = (p.is_mip() ? std::min(res.dual_bound, res.objective) : res.objective) / money_;
    return out;
  }

 private:
  /// Full master point for a given (x, beta): one optimal dispatch per cut and
  /// the smallest feasible eta.
  std::vector<double> start_vector(const FirstStageDecision& x, const Beta& beta,
                                   const solver::SolveOptions& opts) const {
    const auto& idx = m_.index();
    const int T = idx.horizon();
    std::vector<double> v(static_cast<std::size_t>(p_.num_columns()), 0.0);
    const auto xv = first_stage_values(x, idx);
    std::copy(xv.begin(), xv.begin() + idx.offset(VarKind::kPG), v.begin());
    for (std::size_t e = 0; e < beta.size(); ++e)
      for (int t = 0; t < T; ++t) v[beta_[e * T + t]] = uses_beta(method_) ? beta[e][t] * money_ : 0.0;
    double eta = 0.0;
    const int ny = static_cast<int>(m_.system().y_columns.size());
    for (std::size_t s = 0; s < cuts_.size(); ++s) {
      const auto res = m_.solve_dispatch(x, cuts_[s], opts);
      const int base = cut_base_[s];
      for (int k = 0; k < ny; ++k) v[base + k] = res.primal[k];
      fill_energization(x, cuts_[s], s, v);
      double val = res.objective * money_;
      for (std::size_t e = 0; e < beta.size(); ++e)
        for (int t = 0; t < T; ++t)
          if (cuts_[s].u[e][t]) val += v[beta_[e * T + t]];
      eta = std::max(eta, val);
    }
    v[eta_] = eta;
    return v;
  }

  /// Valid rows for a copy (not part of G): z_j = 1 iff bus j is reached from
  /// a root over closed lines that survive u. A bus can be served only when
  /// live, a child is live only if its parent is, and a failed parent line
  /// cuts it off. Integer designs keep every feasible dispatch; the LP loses
  /// the cheap trick of rerouting around a failure over a sliver of a line.
  template <class Y>
  void add_energization(const ScenarioRealization& u, Y y) {
    const auto& c = m_.case_data();
    const auto& idx = m_.index();
    const auto& topo = m_.topology();
    const int T = idx.horizon();
    const int s = static_cast<int>(z_base_.size());
    z_base_.push_back(p_.num_columns());
    for (int i = 0; i < topo.num_nodes; ++i)
      for (int t = 0; t < T; ++t) {
        const double lo = topo.is_root[i] ? 1.0 : 0.0;
        p_.add_column(lo, 1.0, 0.0, false, "z_" + c.nodes[i].id + "_" + std::to_string(t) + "_s" + std::to_string(s));
      }
    auto z = [&](int i, int t) { return z_base_.back() + i * T + t; };
    using K = VarKind;
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < topo.num_nodes; ++j) {
        if (topo.is_root[j]) continue;
        p_.add_row({z(j, t), idx.col(K::kSvTp, j, t)}, {1.0, 1.0}, solver::Sense::kLessEqual, 1.0, {}, "live");
        for (int e : topo.incident[j]) {
          const int a = topo.arc_into(e, j);
          const int ca = idx.col(K::kC, a, t);
          if (u.u[e][t])
            p_.add_row({z(j, t), z(topo.arc_tail(a), t), ca}, {1.0, -1.0, 1.0}, solver::Sense::kLessEqual, 1.0, {},
                       "live");
          else
            p_.add_row({z(j, t), ca}, {1.0, 1.0}, solver::Sense::kLessEqual, 1.0, {}, "live");
        }
        const double d = c.nodes[j].demand_p[t] / c.s_base_kva;
        if (d > 0.0)
          p_.add_row({y(idx.col(K::kSp, j, t)), z(j, t)}, {1.0, -d}, solver::Sense::kLessEqual, 0.0, {}, "live");
      }
  }

  /// z values of a design under u (breadth-first from the roots).
  void fill_energization(const FirstStageDecision& x, const ScenarioRealization& u, std::size_t s,
                         std::vector<double>& v) const {
    const auto& topo = m_.topology();
    const int T = m_.index().horizon();
    for (int t = 0; t < T; ++t) {
      std::vector<int> stack(topo.roots.begin(), topo.roots.end());
      for (int r : topo.roots) v[z_column(s, r, t)] = 1.0;
      while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (int e : topo.incident[i]) {
          const int j = topo.other_end(e, i);
          const int a = topo.arc_into(e, j);
          if (topo.arc_tail(a) == i && x.c[a][t] == 1 && u.u[e][t] && v[z_column(s, j, t)] == 0.0) {
            v[z_column(s, j, t)] = 1.0;
            stack.push_back(j);
          }
        }
      }
    }
  }

  const SecondStageModel& m_;
  Method method_;
  solver::ProblemSpec p_;
  std::vector<int> beta_;
  int eta_ = -1;
  double money_ = 1.0;
  std::vector<ScenarioRealization> cuts_;
  std::vector<int> cut_base_;
  std::vector<int> z_base_;
};

inline MasterResult solve_master(const CaseData& c, const std::vector<ScenarioRealization>& cuts, Method method,
                                 const MasterOptions& opt = {}) {
  const SecondStageModel model(c);
  Master master(model, method);
  for (const auto& u : cuts) master.add_cut(u);
  return master.solve(opt);
}

}  // namespace drdmf
