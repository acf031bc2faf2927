#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "drdmf/model/decision.hpp"
#include "drdmf/netdata/case.hpp"

namespace drdmf::fixture {

struct LineDef {
  std::string a, b;
  std::vector<double> mu;  // per step; padded with the last value
  bool closed = true;
};

struct NodeDef {
  std::string id;
  double demand = 100.0;  // kW, every step
  double weight = 1.0;
  double dg = 0.0;        // grid-forming capacity, kW (0 = none)
};

/// Small radial test networks: s_base 1000 kVA, light impedances.
inline CaseData make_case(const std::vector<NodeDef>& nodes, const std::vector<LineDef>& lines, int T, int k,
                          int n_sw_max = 1) {
  CaseData c;
  c.horizon_steps = T;
  c.step_hours = 1.0;
  c.k = k;
  c.n_sw_max = n_sw_max;
  double peak = 0.0;
  double wmax = 0.0;
  for (const auto& n : nodes) {
    NodeSpec s;
    s.id = n.id;
    s.demand_p.assign(T, n.demand);
    s.demand_q.assign(T, 0.3 * n.demand);
    s.weight = n.weight;
    wmax = std::max(wmax, n.weight);
    c.nodes.push_back(s);
    peak += n.demand;
    if (n.dg > 0) c.dgs.push_back({n.id, std::vector<double>(T, n.dg), std::vector<double>(T, 0.6 * n.dg), true});
  }
  for (auto& s : c.nodes) s.critical = s.weight == wmax && wmax > 1.0;
  for (const auto& l : lines) {
    EdgeSpec e;
    e.from_node = l.a;
    e.to_node = l.b;
    e.r = 0.002;
    e.x = 0.004;
    e.initially_closed = l.closed;
    e.is_tie = !l.closed;
    for (int t = 0; t < T; ++t) e.mu_max.push_back(l.mu.empty() ? 0.1 : l.mu[std::min<std::size_t>(t, l.mu.size() - 1)]);
    c.edges.push_back(e);
  }
  c.big_m = 2.0 * peak / c.s_base_kva;
  c.beta_bound = total_weighted_demand(c);
  return c;
}

/// 4 nodes, 2 grid-forming units, one tie line; T = 2, k = 1.
inline CaseData four_node_fixture() {
  return make_case({{"1", 120.0, 10.0, 150.0}, {"2", 80.0, 1.0}, {"3", 60.0, 1.0, 90.0}, {"4", 100.0, 10.0}},
                   {{"1", "2", {0.05, 0.3}}, {"2", "3", {0.2, 0.4}}, {"3", "4", {0.1, 0.6}}, {"4", "1", {0.05, 0.1}, false}},
                   2, 1, 1);
}

/// Random connected case with at most max_edges lines (spanning tree plus
/// extra chords), T and k as given.
inline CaseData random_case(std::mt19937_64& rng, int max_edges, int T, int k) {
  std::uniform_int_distribution<int> nn(2, std::min(4, max_edges + 1));
  const int n = nn(rng);
  std::uniform_real_distribution<double> dem(20.0, 150.0), mu(0.0, 0.7), coin(0.0, 1.0);
  std::vector<NodeDef> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back({"n" + std::to_string(i), dem(rng), coin(rng) < 0.3 ? 10.0 : 1.0});
  nodes[0].dg = dem(rng) * 1.5;
  if (n > 2 && coin(rng) < 0.6) nodes[n - 1].dg = dem(rng);
  std::vector<LineDef> lines;
  auto mus = [&] {
    std::vector<double> m;
    double p = 0.0;
    for (int t = 0; t < T; ++t) m.push_back(p = std::min(0.95, p + mu(rng) * 0.5));
    return m;
  };
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> par(0, i - 1);
    lines.push_back({nodes[par(rng)].id, nodes[i].id, mus(), true});
  }
  for (int a = 0; a < n && static_cast<int>(lines.size()) < max_edges; ++a)
    for (int b = a + 1; b < n && static_cast<int>(lines.size()) < max_edges; ++b) {
      bool dup = false;
      for (const auto& l : lines) dup = dup || (l.a == nodes[a].id && l.b == nodes[b].id) || (l.b == nodes[a].id && l.a == nodes[b].id);
      if (!dup && coin(rng) < 0.5) lines.push_back({nodes[a].id, nodes[b].id, mus(), false});
    }
  return make_case(nodes, lines, T, std::min<int>(k, static_cast<int>(lines.size())), 1);
}

}  // namespace drdmf::fixture
