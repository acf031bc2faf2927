#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "drdmf/model/decision.hpp"
#include "drdmf/netdata/case.hpp"

namespace drdmf {

struct RadialityReport {
  bool ok = true;
  std::vector<std::string> violations;

  void fail(std::string msg) {
    ok = false;
    violations.push_back(std::move(msg));
  }
};

/// Graph check of one step of x, independent of the MILP rows: components of
/// the closed-line subgraph must be trees holding exactly one grid-forming
/// bus, arcs must point away from that bus, and sv_tp must be 0 exactly on
/// energized nodes.
inline RadialityReport check_radiality(const FirstStageDecision& x, const CaseData& c, int t) {
  const Topology topo = Topology::build(c);
  RadialityReport rep;
  const int n = topo.num_nodes;

  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int e : topo.incident[i]) {
        if (!x.closed(e, t)) continue;
        const int j = topo.other_end(e, i);
        if (comp[j] < 0) {
          comp[j] = ncomp;
          stack.push_back(j);
        }
      }
    }
    ++ncomp;
  }

  std::vector<int> nodes(ncomp, 0), edges(ncomp, 0), roots(ncomp, 0);
  for (int i = 0; i < n; ++i) {
    ++nodes[comp[i]];
    roots[comp[i]] += topo.is_root[i] ? 1 : 0;
  }
  for (int e = 0; e < topo.num_edges; ++e)
    if (x.closed(e, t)) ++edges[comp[topo.edge_from[e]]];

  auto label = [&](int k) {
    for (int i = 0; i < n; ++i)
      if (comp[i] == k) return "component of node '" + c.nodes[i].id + "'";
    return std::string("component");
  };
  for (int k = 0; k < ncomp; ++k) {
    if (edges[k] != nodes[k] - 1) rep.fail("cycle in component: " + label(k));
    if (roots[k] > 1) rep.fail("multiple roots: " + label(k));
    if (roots[k] == 0 && nodes[k] > 1) rep.fail("no root: " + label(k));
  }

  // Orientation: the parent of every energized non-root node is its neighbour
  // one step closer to the root.
  for (int e = 0; e < topo.num_edges; ++e) {
    if (x.c[2 * e][t] && x.c[2 * e + 1][t]) rep.fail("both arcs of line " + std::to_string(e) + " set");
  }
  std::vector<int> depth(n, -1);
  for (int r : topo.roots) {
    if (roots[comp[r]] != 1) continue;
    std::vector<int> q{r};
    depth[r] = 0;
    for (std::size_t h = 0; h < q.size(); ++h) {
      const int i = q[h];
      for (int e : topo.incident[i]) {
        if (!x.closed(e, t)) continue;
        const int j = topo.other_end(e, i);
        if (depth[j] >= 0) continue;
        depth[j] = depth[i] + 1;
        q.push_back(j);
        if (x.c[topo.arc_into(e, j)][t] != 1)
          rep.fail("arc orientation: line " + c.edges[e].from_node + "-" + c.edges[e].to_node);
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    const double sv = x.sv_tp[i][t];
    const bool energized = depth[i] >= 0;
    if (energized && std::abs(sv) > 1e-6)
      rep.fail("sv_tp inconsistent at node '" + c.nodes[i].id + "': energized but marked disconnected");
    if (!energized && std::abs(sv) <= 1e-6 && !topo.is_root[i])
      rep.fail("node '" + c.nodes[i].id + "' has sv_tp=0 outside a rooted component");
    if (!energized && !topo.is_root[i] && std::abs(sv - 1.0) > 1e-6 && std::abs(sv) > 1e-6)
      rep.fail("sv_tp fractional at node '" + c.nodes[i].id + "'");
  }
  return rep;
}

inline RadialityReport check_radiality_all(const FirstStageDecision& x, const CaseData& c) {
  RadialityReport all;
  for (int t = 0; t < c.horizon_steps; ++t) {
    auto r = check_radiality(x, c, t);
    for (auto& v : r.violations) all.fail("t=" + std::to_string(t) + ": " + v);
  }
  return all;
}

}  // namespace drdmf
