#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "drdmf/model/index.hpp"
#include "drdmf/netdata/case.hpp"
#include "drdmf/solver/lp_format.hpp"
#include "drdmf/solver/problem.hpp"

namespace drdmf {

using solver::kInf;
using solver::Sense;

struct Term {
  int col;
  double coef;
  bool operator==(const Term&) const = default;
};

/// Row over global VariableIndex columns; sense is <= or =.
struct LinearRow {
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::string tag;
};

/// Rows, column bounds and integrality over the full VariableIndex column
/// space. Columns a system does not touch keep default bounds.
struct LinearSystem {
  std::vector<LinearRow> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integer;

  explicit LinearSystem(int num_cols = 0)
      : lower(static_cast<std::size_t>(num_cols), -kInf),
        upper(static_cast<std::size_t>(num_cols), kInf),
        integer(static_cast<std::size_t>(num_cols), false) {}

  void add(std::vector<Term> terms, Sense s, double rhs, std::string tag) {
    rows.push_back({std::move(terms), s, rhs, std::move(tag)});
  }
  void bound(int col, double lo, double hi, bool is_int = false) {
    lower[col] = lo;
    upper[col] = hi;
    integer[col] = is_int;
  }

  /// Row ids grouped by provenance tag.
  [[nodiscard]] std::map<std::string, std::vector<int>> groups() const {
    std::map<std::string, std::vector<int>> g;
    for (std::size_t i = 0; i < rows.size(); ++i) g[rows[i].tag].push_back(static_cast<int>(i));
    return g;
  }

  [[nodiscard]] static double activity(const LinearRow& r, const std::vector<double>& v) {
    double a = 0.0;
    for (const auto& t : r.terms) a += t.coef * v[t.col];
    return a;
  }

  [[nodiscard]] static double violation(const LinearRow& r, const std::vector<double>& v) {
    const double a = activity(r, v);
    return r.sense == Sense::kEqual ? std::abs(a - r.rhs) : std::max(0.0, a - r.rhs);
  }

  /// Ids of rows violated by more than tol at point v (bounds not included).
  [[nodiscard]] std::vector<int> violated_rows(const std::vector<double>& v, double tol = 1e-9) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (violation(rows[i], v) > tol) out.push_back(static_cast<int>(i));
    return out;
  }

  [[nodiscard]] solver::ProblemSpec to_problem(const VariableIndex& idx) const {
    solver::ProblemSpec p;
    for (int j = 0; j < static_cast<int>(lower.size()); ++j)
      p.add_column(lower[j], upper[j], 0.0, integer[j], idx.name(j));
    for (const auto& r : rows) {
      solver::Row row;
      for (const auto& t : r.terms) {
        row.index.push_back(t.col);
        row.value.push_back(t.coef);
      }
      row.sense = r.sense;
      row.rhs = r.rhs;
      row.tag = r.tag;
      p.rows.push_back(std::move(row));
    }
    return p;
  }
};

/// Row of the second-stage system  F y + E x + H u (sense) b, with y, x, u
/// terms kept apart. All column ids are global VariableIndex columns.
struct AffineRow {
  std::vector<Term> y;
  std::vector<Term> x;
  std::vector<Term> u;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::string tag;
};

struct AffineSystem {
  std::vector<AffineRow> rows;
  std::vector<Term> cost;         // objective on y ($/h per p.u.)
  double cost_constant = 0.0;     // sum of w * demand ($/h)
  std::vector<int> y_columns;     // every second-stage column, ascending

  [[nodiscard]] std::map<std::string, std::vector<int>> groups() const {
    std::map<std::string, std::vector<int>> g;
    for (std::size_t i = 0; i < rows.size(); ++i) g[rows[i].tag].push_back(static_cast<int>(i));
    return g;
  }

  /// Right-hand side of row r once x and u are fixed to the values in v.
  [[nodiscard]] static double fixed_rhs(const AffineRow& r, const std::vector<double>& v) {
    double rhs = r.rhs;
    for (const auto& t : r.x) rhs -= t.coef * v[t.col];
    for (const auto& t : r.u) rhs -= t.coef * v[t.col];
    return rhs;
  }
};

/// Big-M values used by the builders.
struct BigM {
  double fictitious;  // fictitious flow per arc
  double flow;        // |PF|, |QF| in p.u.
  double voltage;     // widening of the delta gate for disconnected ends
};

inline BigM big_m_values(const CaseData& c) {
  return {static_cast<double>(std::max<std::size_t>(1, c.nodes.size())), c.big_m,
          2.0 * (c.v_max - c.v_min)};
}

/// Radiality polytope X: fictitious-flow and spanning-tree rows, switching
/// linkage and per-step switching budget.
inline LinearSystem build_first_stage(const CaseData& c, const VariableIndex& idx) {
  const Topology topo = Topology::build(c);
  const int T = idx.horizon();
  const BigM m = big_m_values(c);
  LinearSystem s(idx.total());
  using K = VarKind;

  for (int t = 0; t < T; ++t) {
    for (int a = 0; a < topo.num_arcs(); ++a) {
      s.bound(idx.col(K::kC, a, t), 0.0, 1.0, true);
      s.bound(idx.col(K::kF, a, t), 0.0, kInf);
    }
    for (int i = 0; i < topo.num_nodes; ++i)
      s.bound(idx.col(K::kSvTp, i, t), 0.0, topo.is_root[i] ? 0.0 : 1.0);
    for (int e = 0; e < topo.num_edges; ++e) {
      s.bound(idx.col(K::kVCl, e, t), 0.0, 1.0, true);
      s.bound(idx.col(K::kVOp, e, t), 0.0, 1.0, true);
    }

    for (int i = 0; i < topo.num_nodes; ++i) {
      std::vector<Term> net_in;  // inflow - outflow of fictitious flow
      std::vector<Term> parents;
      for (int e : topo.incident[i]) {
        const int in = topo.arc_into(e, i);
        net_in.push_back({idx.col(K::kF, in, t), 1.0});
        net_in.push_back({idx.col(K::kF, Topology::reverse_arc(in), t), -1.0});
        parents.push_back({idx.col(K::kC, in, t), 1.0});
      }
      if (topo.is_root[i]) {
        s.add(net_in, Sense::kLessEqual, 0.0, "root-outflow");
        for (const auto& p : parents) s.add({p}, Sense::kEqual, 0.0, "root-no-parent");
      } else {
        net_in.push_back({idx.col(K::kSvTp, i, t), 1.0});
        s.add(std::move(net_in), Sense::kEqual, 1.0, "fict-balance");
        parents.push_back({idx.col(K::kSvTp, i, t), 1.0});
        s.add(std::move(parents), Sense::kEqual, 1.0, "one-parent");
      }
    }
    for (int a = 0; a < topo.num_arcs(); ++a)
      s.add({{idx.col(K::kF, a, t), 1.0}, {idx.col(K::kC, a, t), -m.fictitious}}, Sense::kLessEqual, 0.0,
            "fict-gate");
    std::vector<Term> budget;
    for (int e = 0; e < topo.num_edges; ++e) {
      s.add({{idx.col(K::kC, 2 * e, t), 1.0}, {idx.col(K::kC, 2 * e + 1, t), 1.0}}, Sense::kLessEqual, 1.0,
            "one-orientation");
      std::vector<Term> link{{idx.col(K::kC, 2 * e, t), 1.0},
                             {idx.col(K::kC, 2 * e + 1, t), 1.0},
                             {idx.col(K::kVCl, e, t), -1.0},
                             {idx.col(K::kVOp, e, t), 1.0}};
      double rhs = 0.0;
      if (t == 0) {
        rhs = c.edges[e].initially_closed ? 1.0 : 0.0;
      } else {
        link.push_back({idx.col(K::kC, 2 * e, t - 1), -1.0});
        link.push_back({idx.col(K::kC, 2 * e + 1, t - 1), -1.0});
      }
      s.add(std::move(link), Sense::kEqual, rhs, "switch-link");
      budget.push_back({idx.col(K::kVCl, e, t), 1.0});
      budget.push_back({idx.col(K::kVOp, e, t), 1.0});
    }
    if (t >= 1) s.add(std::move(budget), Sense::kLessEqual, static_cast<double>(c.n_sw_max), "switch-budget");
  }
  return s;
}

/// Post-event operation system G(x,u) in LinDistFlow form. Every y bound is
/// an explicit row so the system can be dualized row by row.
inline AffineSystem build_second_stage(const CaseData& c, const VariableIndex& idx) {
  const Topology topo = Topology::build(c);
  const int T = idx.horizon();
  const BigM m = big_m_values(c);
  const double sb = c.s_base_kva;
  AffineSystem s;
  using K = VarKind;
  auto add = [&](std::vector<Term> y, std::vector<Term> x, std::vector<Term> u, Sense sense, double rhs,
                 const char* tag) {
    s.rows.push_back({std::move(y), std::move(x), std::move(u), sense, rhs, tag});
  };

  for (int k = static_cast<int>(K::kPG); k <= static_cast<int>(K::kDelta); ++k)
    for (int j = 0; j < idx.count(static_cast<K>(k)); ++j) s.y_columns.push_back(idx.offset(static_cast<K>(k)) + j);

  for (int t = 0; t < T; ++t) {
    for (int g = 0; g < topo.num_dgs; ++g) {
      const auto& dg = c.dgs[g];
      const int sv = idx.col(K::kSvTp, topo.dg_node[g], t);
      const double pmax = dg.p_max[t] / sb, qmax = dg.q_max[t] / sb;
      add({{idx.col(K::kPG, g, t), 1.0}}, {{sv, pmax}}, {}, Sense::kLessEqual, pmax, "dg-limit");
      add({{idx.col(K::kQG, g, t), 1.0}}, {{sv, qmax}}, {}, Sense::kLessEqual, qmax, "dg-limit");
      add({{idx.col(K::kPG, g, t), -1.0}}, {}, {}, Sense::kLessEqual, 0.0, "aux");
      add({{idx.col(K::kQG, g, t), -1.0}}, {}, {}, Sense::kLessEqual, 0.0, "aux");
    }
    for (int i = 0; i < topo.num_nodes; ++i) {
      const auto& n = c.nodes[i];
      std::vector<Term> p_bal, q_bal;
      for (int e : topo.incident[i]) {
        const double sign = topo.edge_from[e] == i ? 1.0 : -1.0;  // outflow positive
        p_bal.push_back({idx.col(K::kPF, e, t), sign});
        q_bal.push_back({idx.col(K::kQF, e, t), sign});
      }
      p_bal.push_back({idx.col(K::kSp, i, t), 1.0});
      q_bal.push_back({idx.col(K::kSq, i, t), 1.0});
      for (int g : topo.dgs_at[i]) {
        p_bal.push_back({idx.col(K::kPG, g, t), -1.0});
        q_bal.push_back({idx.col(K::kQG, g, t), -1.0});
      }
      add(std::move(p_bal), {}, {}, Sense::kEqual, 0.0, "power-balance");
      add(std::move(q_bal), {}, {}, Sense::kEqual, 0.0, "power-balance");

      const double dp = n.demand_p[t] / sb, dq = n.demand_q[t] / sb;
      const int sp = idx.col(K::kSp, i, t), sq = idx.col(K::kSq, i, t);
      add({{sp, 1.0}}, {}, {}, Sense::kLessEqual, dp, "aux");
      add({{sp, -1.0}}, {}, {}, Sense::kLessEqual, 0.0, "aux");
      if (dp > 0.0) {
        add({{sq, 1.0}, {sp, -dq / dp}}, {}, {}, Sense::kEqual, 0.0, "aux");
      } else {
        add({{sq, 1.0}}, {}, {}, Sense::kLessEqual, dq, "aux");
        add({{sq, -1.0}}, {}, {}, Sense::kLessEqual, 0.0, "aux");
      }
      s.cost.push_back({sp, -n.weight * sb});
      s.cost_constant += n.weight * n.demand_p[t];

      const int v = idx.col(K::kV, i, t), sv = idx.col(K::kSvTp, i, t);
      if (topo.is_root[i]) add({{v, 1.0}}, {}, {}, Sense::kEqual, 1.0, "root-voltage");
      add({{v, -1.0}}, {{sv, -c.v_min}}, {}, Sense::kLessEqual, -c.v_min, "voltage-limit");
      add({{v, 1.0}}, {{sv, c.v_max}}, {}, Sense::kLessEqual, c.v_max, "voltage-limit");
    }
    for (int e = 0; e < topo.num_edges; ++e) {
      const auto& ed = c.edges[e];
      const int i = topo.edge_from[e], j = topo.edge_to[e];
      const int pf = idx.col(K::kPF, e, t), qf = idx.col(K::kQF, e, t), d = idx.col(K::kDelta, e, t);
      const Term c_ij{idx.col(K::kC, 2 * e, t), 1.0}, c_ji{idx.col(K::kC, 2 * e + 1, t), 1.0};
      add({{idx.col(K::kV, i, t), 1.0}, {idx.col(K::kV, j, t), -1.0}, {pf, -ed.r}, {qf, -ed.x}, {d, -1.0}}, {},
          {}, Sense::kEqual, 0.0, "voltage-drop");
      const std::vector<Term> gate{c_ij, c_ji, {idx.col(K::kSvTp, i, t), -m.voltage},
                                   {idx.col(K::kSvTp, j, t), -m.voltage}};
      add({{d, 1.0}}, gate, {}, Sense::kLessEqual, 1.0, "drop-gate");
      add({{d, -1.0}}, gate, {}, Sense::kLessEqual, 1.0, "drop-gate");
      const int u = idx.col(K::kU, e, t);
      for (int flow : {pf, qf}) {
        for (double sign : {1.0, -1.0}) {
          add({{flow, sign}}, {{c_ij.col, -m.flow}, {c_ji.col, -m.flow}}, {}, Sense::kLessEqual, 0.0, "flow-switch");
          add({{flow, sign}}, {}, {{u, -m.flow}}, Sense::kLessEqual, 0.0, "flow-failure");
        }
      }
    }
  }
  return s;
}

/// Writes an affine system to LP text with x and u kept as (free) columns.
inline void write_affine_lp(std::ostream& os, const AffineSystem& s, const VariableIndex& idx) {
  solver::ProblemSpec p;
  for (int j = 0; j < idx.total(); ++j) p.add_column(-kInf, kInf, 0.0, false, idx.name(j));
  for (const auto& t : s.cost) p.objective[t.col] += t.coef;
  p.objective_offset = s.cost_constant;
  for (const auto& r : s.rows) {
    solver::Row row;
    for (const auto* part : {&r.y, &r.x, &r.u})
      for (const auto& t : *part) {
        row.index.push_back(t.col);
        row.value.push_back(t.coef);
      }
    row.sense = r.sense;
    row.rhs = r.rhs;
    row.tag = r.tag;
    p.rows.push_back(std::move(row));
  }
  solver::write_lp(os, p, "second-stage system G(x,u)");
}

}  // namespace drdmf
