#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "drdmf/netdata/case.hpp"

namespace drdmf {

struct ValidationReport {
  std::vector<std::string> issues;

  [[nodiscard]] bool ok() const { return issues.empty(); }
  bool operator==(const ValidationReport&) const = default;
};

namespace detail {

inline bool per_step_ok(const std::vector<double>& v, int T, double lo, double hi) {
  if (static_cast<int>(v.size()) != T) return false;
  return std::all_of(v.begin(), v.end(),
                     [&](double x) { return std::isfinite(x) && x >= lo && x <= hi; });
}

}  // namespace detail

/// Lists every violated case invariant. Never throws.
inline ValidationReport validate_case(const CaseData& c) {
  ValidationReport rep;
  auto issue = [&](std::string s) { rep.issues.push_back(std::move(s)); };
  const int T = c.horizon_steps;
  constexpr double kHuge = 1e300;

  if (T < 1) issue("horizon_steps must be >= 1");
  if (!(c.step_hours > 0)) issue("step_hours must be positive");
  if (!(c.s_base_kva > 0)) issue("s_base_kva must be positive");
  if (!(c.v_min < 1.0 && 1.0 < c.v_max)) issue("voltage bounds must satisfy v_min < 1 < v_max");
  if (!(c.big_m > 0)) issue("big_m must be positive");
  if (!(c.beta_bound > 0)) issue("beta_bound must be positive");
  if (c.n_sw_max < 0) issue("n_sw_max must be >= 0");
  if (c.k < 0 || c.k > static_cast<int>(c.edges.size()))
    issue("k must lie in [0, number of edges]");

  std::map<std::string, int> ids;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const auto& n = c.nodes[i];
    if (n.id.empty()) issue("node #" + std::to_string(i) + " has an empty id");
    if (!ids.emplace(n.id, static_cast<int>(i)).second) issue("duplicate node id '" + n.id + "'");
    if (!detail::per_step_ok(n.demand_p, T, 0.0, kHuge))
      issue("node '" + n.id + "': demand_p must have length horizon_steps with entries >= 0");
    if (!detail::per_step_ok(n.demand_q, T, 0.0, kHuge))
      issue("node '" + n.id + "': demand_q must have length horizon_steps with entries >= 0");
    if (!(n.weight > 0)) issue("node '" + n.id + "': weight must be positive");
  }
  double max_plain = -1.0;
  for (const auto& n : c.nodes)
    if (!n.critical) max_plain = std::max(max_plain, n.weight);
  for (const auto& n : c.nodes)
    if (n.critical && !(n.weight > max_plain))
      issue("node '" + n.id + "': critical weight must exceed every non-critical weight");

  std::set<std::pair<std::string, std::string>> pairs;
  for (std::size_t e = 0; e < c.edges.size(); ++e) {
    const auto& ed = c.edges[e];
    const std::string name = "edge " + ed.from_node + "-" + ed.to_node;
    if (!ids.count(ed.from_node) || !ids.count(ed.to_node)) issue(name + ": unknown endpoint");
    if (ed.from_node == ed.to_node) issue(name + ": self loop");
    auto key = std::minmax(ed.from_node, ed.to_node);
    if (!pairs.emplace(key.first, key.second).second) issue(name + ": duplicate line");
    if (!(ed.r >= 0) || !(ed.x >= 0)) issue(name + ": r and x must be >= 0");
    if (static_cast<int>(ed.mu_max.size()) != T) issue(name + ": mu_max must have length horizon_steps");
    else if (!detail::per_step_ok(ed.mu_max, T, 0.0, 1.0)) issue(name + ": mu_max out of [0,1]");
  }

  std::map<std::string, int> forming_per_node;
  int forming = 0;
  for (std::size_t g = 0; g < c.dgs.size(); ++g) {
    const auto& d = c.dgs[g];
    if (!ids.count(d.node)) issue("dg #" + std::to_string(g) + ": unknown node '" + d.node + "'");
    if (!detail::per_step_ok(d.p_max, T, 0.0, kHuge) || !detail::per_step_ok(d.q_max, T, 0.0, kHuge))
      issue("dg at '" + d.node + "': p_max/q_max must have length horizon_steps with entries >= 0");
    if (d.grid_forming) {
      ++forming;
      if (++forming_per_node[d.node] == 2) issue("node '" + d.node + "' hosts more than one grid-forming DG");
    }
  }
  if (forming < 1) issue("at least one grid-forming DG is required");

  // Connectivity with every line closed.
  if (!c.nodes.empty()) {
    std::vector<int> parent(c.nodes.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    auto root = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (const auto& ed : c.edges) {
      auto a = ids.find(ed.from_node), b = ids.find(ed.to_node);
      if (a == ids.end() || b == ids.end()) continue;
      parent[root(a->second)] = root(b->second);
    }
    std::set<int> comps;
    for (std::size_t i = 0; i < parent.size(); ++i) comps.insert(root(static_cast<int>(i)));
    if (comps.size() > 1) issue("network is not connected with all lines closed");
  } else {
    issue("case has no nodes");
  }
  return rep;
}

}  // namespace drdmf
