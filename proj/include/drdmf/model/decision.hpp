#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "drdmf/model/index.hpp"
#include "drdmf/netdata/case.hpp"

namespace drdmf {

template <typename T>
using Grid = std::vector<std::vector<T>>;  // [element][t]

template <typename T>
Grid<T> make_grid(int elements, int horizon, T value = T{}) {
  return Grid<T>(static_cast<std::size_t>(elements), std::vector<T>(static_cast<std::size_t>(horizon), value));
}

/// Microgrid boundaries over the horizon.
struct FirstStageDecision {
  Grid<int> c;        // [arc][t]; arc 2e: from->to, 2e+1: to->from
  Grid<double> sv_tp; // [node][t]
  Grid<int> v_cl;     // [edge][t]
  Grid<int> v_op;     // [edge][t]
  Grid<double> f;     // [arc][t]

  [[nodiscard]] int horizon() const { return c.empty() ? 0 : static_cast<int>(c.front().size()); }
  [[nodiscard]] bool closed(int edge, int t) const { return c[2 * edge][t] + c[2 * edge + 1][t] > 0; }
  bool operator==(const FirstStageDecision&) const = default;
};

/// Line-survival trajectory: u[edge][t] = 1 intact, 0 failed.
struct ScenarioRealization {
  Grid<std::uint8_t> u;

  [[nodiscard]] int failed_count(int t) const {
    int n = 0;
    for (const auto& row : u) n += row[t] == 0;
    return n;
  }
  bool operator==(const ScenarioRealization&) const = default;
  auto operator<=>(const ScenarioRealization&) const = default;
};

inline ScenarioRealization all_intact(int num_edges, int horizon) {
  return {make_grid<std::uint8_t>(num_edges, horizon, 1)};
}

inline bool is_monotone(const ScenarioRealization& s) {
  for (const auto& row : s.u)
    for (std::size_t t = 1; t < row.size(); ++t)
      if (row[t] > row[t - 1]) return false;
  return true;
}

/// Membership in the N-k support: monotone and at most k failures per step.
inline bool in_support(const ScenarioRealization& s, int k) {
  if (!is_monotone(s)) return false;
  const int T = s.u.empty() ? 0 : static_cast<int>(s.u.front().size());
  for (int t = 0; t < T; ++t)
    if (s.failed_count(t) > k) return false;
  return true;
}

/// Second-stage operating point, reported in kW / kvar / p.u.
struct DispatchResult {
  Grid<double> pg, qg;      // [dg][t]
  Grid<double> s_p, s_q;    // [node][t] served load
  Grid<double> pf, qf;      // [edge][t]
  Grid<double> v;           // [node][t]
  Grid<double> delta;       // [edge][t]
  Grid<double> shed;        // [node][t], kW
  double objective = 0.0;   // sum_t sum_i w_i * shed_i,t  ($/h summed over steps)
};

/// Builds the unique first-stage point with the given per-step closed-line
/// sets: arcs oriented away from the grid-forming buses, fictitious flow equal
/// to subtree sizes, switch actions from status changes. Returns nullopt when
/// some step is not a forest of microgrids each holding exactly one root.
inline std::optional<FirstStageDecision> decision_from_status(const CaseData& c, const Topology& topo,
                                                              const Grid<int>& closed) {
  const int T = topo.horizon;
  FirstStageDecision x;
  x.c = make_grid<int>(topo.num_arcs(), T);
  x.f = make_grid<double>(topo.num_arcs(), T);
  x.sv_tp = make_grid<double>(topo.num_nodes, T, 1.0);
  x.v_cl = make_grid<int>(topo.num_edges, T);
  x.v_op = make_grid<int>(topo.num_edges, T);
  for (int t = 0; t < T; ++t) {
    std::vector<int> parent_arc(topo.num_nodes, -1);
    std::vector<int> owner(topo.num_nodes, -1);
    std::vector<int> order;
    for (int r : topo.roots) {
      if (owner[r] >= 0) return std::nullopt;
      owner[r] = r;
      x.sv_tp[r][t] = 0.0;
      std::queue<int> q;
      q.push(r);
      while (!q.empty()) {
        const int i = q.front();
        q.pop();
        order.push_back(i);
        for (int e : topo.incident[i]) {
          if (!closed[e][t]) continue;
          const int j = topo.other_end(e, i);
          if (parent_arc[i] >= 0 && Topology::arc_edge(parent_arc[i]) == e) continue;
          if (owner[j] >= 0) return std::nullopt;  // cycle or second root
          owner[j] = r;
          parent_arc[j] = topo.arc_into(e, j);
          x.c[parent_arc[j]][t] = 1;
          x.sv_tp[j][t] = 0.0;
          q.push(j);
        }
      }
    }
    // Every closed line must sit inside a rooted tree.
    for (int e = 0; e < topo.num_edges; ++e)
      if (closed[e][t] && owner[topo.edge_from[e]] < 0) return std::nullopt;
    std::vector<double> subtree(topo.num_nodes, 1.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int i = *it;
      if (parent_arc[i] < 0) continue;
      x.f[parent_arc[i]][t] = subtree[i];
      subtree[topo.arc_tail(parent_arc[i])] += subtree[i];
    }
    for (int e = 0; e < topo.num_edges; ++e) {
      const int prev = t == 0 ? static_cast<int>(c.edges[e].initially_closed) : (closed[e][t - 1] ? 1 : 0);
      const int now = closed[e][t] ? 1 : 0;
      x.v_cl[e][t] = now > prev;
      x.v_op[e][t] = now < prev;
    }
  }
  return x;
}

/// Closed-line status implied by a decision.
inline Grid<int> line_status(const FirstStageDecision& x, int num_edges) {
  const int T = x.horizon();
  auto s = make_grid<int>(num_edges, T);
  for (int e = 0; e < num_edges; ++e)
    for (int t = 0; t < T; ++t) s[e][t] = x.closed(e, t) ? 1 : 0;
  return s;
}

/// Column values of the first-stage variables of x in the global index.
inline std::vector<double> first_stage_values(const FirstStageDecision& x, const VariableIndex& idx) {
  std::vector<double> v(static_cast<std::size_t>(idx.total()), 0.0);
  const int T = idx.horizon();
  for (int t = 0; t < T; ++t) {
    for (int a = 0; a < idx.elements(VarKind::kC); ++a) {
      v[idx.col(VarKind::kC, a, t)] = x.c[a][t];
      v[idx.col(VarKind::kF, a, t)] = x.f[a][t];
    }
    for (int i = 0; i < idx.elements(VarKind::kSvTp); ++i) v[idx.col(VarKind::kSvTp, i, t)] = x.sv_tp[i][t];
    for (int e = 0; e < idx.elements(VarKind::kVCl); ++e) {
      v[idx.col(VarKind::kVCl, e, t)] = x.v_cl[e][t];
      v[idx.col(VarKind::kVOp, e, t)] = x.v_op[e][t];
    }
  }
  return v;
}

inline FirstStageDecision decision_from_values(const std::vector<double>& v, const VariableIndex& idx) {
  const int T = idx.horizon();
  FirstStageDecision x;
  x.c = make_grid<int>(idx.elements(VarKind::kC), T);
  x.f = make_grid<double>(idx.elements(VarKind::kF), T);
  x.sv_tp = make_grid<double>(idx.elements(VarKind::kSvTp), T);
  x.v_cl = make_grid<int>(idx.elements(VarKind::kVCl), T);
  x.v_op = make_grid<int>(idx.elements(VarKind::kVOp), T);
  auto bin = [](double d) { return d > 0.5 ? 1 : 0; };
  for (int t = 0; t < T; ++t) {
    for (int a = 0; a < idx.elements(VarKind::kC); ++a) {
      x.c[a][t] = bin(v[idx.col(VarKind::kC, a, t)]);
      x.f[a][t] = v[idx.col(VarKind::kF, a, t)];
    }
    for (int i = 0; i < idx.elements(VarKind::kSvTp); ++i) x.sv_tp[i][t] = v[idx.col(VarKind::kSvTp, i, t)];
    for (int e = 0; e < idx.elements(VarKind::kVCl); ++e) {
      x.v_cl[e][t] = bin(v[idx.col(VarKind::kVCl, e, t)]);
      x.v_op[e][t] = bin(v[idx.col(VarKind::kVOp, e, t)]);
    }
  }
  return x;
}

inline std::vector<double> scenario_values(const ScenarioRealization& s, const VariableIndex& idx,
                                           std::vector<double> v = {}) {
  if (v.empty()) v.assign(static_cast<std::size_t>(idx.total()), 0.0);
  for (int e = 0; e < idx.elements(VarKind::kU); ++e)
    for (int t = 0; t < idx.horizon(); ++t) v[idx.col(VarKind::kU, e, t)] = s.u[e][t];
  return v;
}

}  // namespace drdmf
