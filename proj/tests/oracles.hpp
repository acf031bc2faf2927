#pragma once

// Independent checks shared by the unit tests and the acceptance runner.

#include <string>
#include <vector>

#include "drdmf/model/radiality.hpp"
#include "drdmf/model/systems.hpp"
#include "drdmf/solver/solve.hpp"

namespace drdmf::oracle {

/// The case restricted to its first step.
inline CaseData first_step(const CaseData& c) {
  CaseData s = c;
  s.horizon_steps = 1;
  for (auto& n : s.nodes) {
    n.demand_p.resize(1);
    n.demand_q.resize(1);
  }
  for (auto& e : s.edges) e.mu_max.resize(1);
  for (auto& d : s.dgs) {
    d.p_max.resize(1);
    d.q_max.resize(1);
  }
  return s;
}

/// Is the arc pattern (bit a = c[a]) feasible in the first-stage polytope?
inline bool milp_accepts(const CaseData& c1, unsigned mask) {
  const auto idx = index_variables(c1);
  const auto sys = build_first_stage(c1, idx);
  auto p = sys.to_problem(idx);
  const int first_stage_end = idx.offset(VarKind::kPG);
  for (int j = first_stage_end; j < p.num_columns(); ++j) p.columns[j].lower = p.columns[j].upper = 0.0;
  const int arcs = 2 * static_cast<int>(c1.edges.size());
  for (int a = 0; a < arcs; ++a) {
    auto& col = p.columns[idx.col(VarKind::kC, a, 0)];
    col.lower = col.upper = (mask >> a) & 1u;
  }
  const auto r = solver::solve(p);
  if (r.status == solver::Status::kError) throw std::runtime_error("arc enumeration: solver error");
  return r.status == solver::Status::kOptimal;
}

/// Graph verdict: energized nodes are those reached from a root over closed
/// lines; check_radiality decides the rest.
inline bool graph_accepts(const CaseData& c1, unsigned mask) {
  const Topology topo = Topology::build(c1);
  FirstStageDecision x;
  x.c = make_grid<int>(topo.num_arcs(), 1);
  x.f = make_grid<double>(topo.num_arcs(), 1);
  x.v_cl = make_grid<int>(topo.num_edges, 1);
  x.v_op = make_grid<int>(topo.num_edges, 1);
  for (int a = 0; a < topo.num_arcs(); ++a) x.c[a][0] = (mask >> a) & 1u;
  x.sv_tp = make_grid<double>(topo.num_nodes, 1, 1.0);
  std::vector<int> stack(topo.roots.begin(), topo.roots.end());
  for (int r : topo.roots) x.sv_tp[r][0] = 0.0;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int e : topo.incident[i]) {
      const int j = topo.other_end(e, i);
      if (x.closed(e, 0) && x.sv_tp[j][0] != 0.0) {
        x.sv_tp[j][0] = 0.0;
        stack.push_back(j);
      }
    }
  }
  return check_radiality(x, c1, 0).ok;
}

struct EnumerationResult {
  int patterns = 0;
  int accepted = 0;
  std::vector<unsigned> mismatches;
};

/// Compares the MILP polytope and the graph check on all 2^(2E) arc patterns.
inline EnumerationResult arc_enumeration(const CaseData& c) {
  const CaseData c1 = first_step(c);
  const int arcs = 2 * static_cast<int>(c1.edges.size());
  if (arcs > 20) throw std::invalid_argument("arc enumeration limited to 10 lines");
  EnumerationResult out;
  for (unsigned m = 0; m < (1u << arcs); ++m) {
    const bool a = milp_accepts(c1, m), b = graph_accepts(c1, m);
    ++out.patterns;
    out.accepted += a;
    if (a != b) out.mismatches.push_back(m);
  }
  return out;
}

}  // namespace drdmf::oracle
