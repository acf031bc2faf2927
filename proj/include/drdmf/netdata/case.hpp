#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace drdmf {

/// Load bus. Per-step arrays have length horizon_steps.
struct NodeSpec {
  std::string id;
  std::vector<double> demand_p;  // kW
  std::vector<double> demand_q;  // kvar
  double weight = 1.0;           // $/kWh of shed load
  bool critical = false;

  bool operator==(const NodeSpec&) const = default;
};

struct EdgeSpec {
  std::string from_node;
  std::string to_node;
  double r = 0.0;  // p.u.
  double x = 0.0;  // p.u.
  bool is_tie = false;
  bool initially_closed = true;
  std::vector<double> mu_max;  // bound on P(line failed by end of step t)

  bool operator==(const EdgeSpec&) const = default;
};

struct DgSpec {
  std::string node;
  std::vector<double> p_max;  // kW
  std::vector<double> q_max;  // kvar
  bool grid_forming = true;

  bool operator==(const DgSpec&) const = default;
};

/// A complete problem instance. Power quantities are stored in kW/kvar and
/// converted to per-unit on s_base_kva by the model builders.
struct CaseData {
  double s_base_kva = 1000.0;
  int horizon_steps = 1;
  double step_hours = 1.0;

  double v_min = 0.95;
  double v_max = 1.05;
  double big_m = 1.0;        // flow big-M, p.u.
  int k = 1;                 // N-k budget per step
  int n_sw_max = 0;          // switch actions per step from the second step on
  double beta_bound = 1.0;   // bound on moment duals and linearized LP duals ($/h)

  std::vector<NodeSpec> nodes;
  std::vector<EdgeSpec> edges;
  std::vector<DgSpec> dgs;

  bool operator==(const CaseData&) const = default;
};

class CaseError : public std::runtime_error {
 public:
  CaseError(const std::string& what, std::string key)
      : std::runtime_error(what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Index-based view of a case: node positions, edge endpoints, roots.
///
/// Arcs are the two orientations of each edge: arc 2e runs from_node -> to_node
/// and arc 2e+1 runs to_node -> from_node.
struct Topology {
  int num_nodes = 0;
  int num_edges = 0;
  int num_dgs = 0;
  int horizon = 0;
  std::unordered_map<std::string, int> node_index;
  std::vector<int> edge_from;
  std::vector<int> edge_to;
  std::vector<bool> is_root;  // bus with a grid-forming DG
  std::vector<int> roots;
  std::vector<int> dg_node;
  std::vector<std::vector<int>> incident;  // edges touching each node
  std::vector<std::vector<int>> dgs_at;

  [[nodiscard]] int num_arcs() const { return 2 * num_edges; }
  [[nodiscard]] int arc_tail(int a) const { return a % 2 == 0 ? edge_from[a / 2] : edge_to[a / 2]; }
  [[nodiscard]] int arc_head(int a) const { return a % 2 == 0 ? edge_to[a / 2] : edge_from[a / 2]; }
  [[nodiscard]] static int arc_edge(int a) { return a / 2; }
  [[nodiscard]] static int reverse_arc(int a) { return a ^ 1; }
  [[nodiscard]] int other_end(int e, int node) const {
    return edge_from[e] == node ? edge_to[e] : edge_from[e];
  }
  /// Arc of edge e that points into `node`.
  [[nodiscard]] int arc_into(int e, int node) const { return edge_to[e] == node ? 2 * e : 2 * e + 1; }

  static Topology build(const CaseData& c) {
    Topology t;
    t.num_nodes = static_cast<int>(c.nodes.size());
    t.num_edges = static_cast<int>(c.edges.size());
    t.num_dgs = static_cast<int>(c.dgs.size());
    t.horizon = c.horizon_steps;
    for (int i = 0; i < t.num_nodes; ++i) {
      if (!t.node_index.emplace(c.nodes[i].id, i).second)
        throw CaseError("duplicate node id '" + c.nodes[i].id + "'", "nodes");
    }
    auto find = [&](const std::string& id, const std::string& key) {
      auto it = t.node_index.find(id);
      if (it == t.node_index.end()) throw CaseError("unknown node '" + id + "'", key);
      return it->second;
    };
    t.incident.resize(t.num_nodes);
    for (int e = 0; e < t.num_edges; ++e) {
      t.edge_from.push_back(find(c.edges[e].from_node, "edges"));
      t.edge_to.push_back(find(c.edges[e].to_node, "edges"));
      t.incident[t.edge_from[e]].push_back(e);
      if (t.edge_to[e] != t.edge_from[e]) t.incident[t.edge_to[e]].push_back(e);
    }
    t.is_root.assign(t.num_nodes, false);
    t.dgs_at.resize(t.num_nodes);
    for (int g = 0; g < t.num_dgs; ++g) {
      const int n = find(c.dgs[g].node, "dgs");
      t.dg_node.push_back(n);
      t.dgs_at[n].push_back(g);
      if (c.dgs[g].grid_forming) t.is_root[n] = true;
    }
    for (int i = 0; i < t.num_nodes; ++i)
      if (t.is_root[i]) t.roots.push_back(i);
    return t;
  }
};

inline double total_demand_kw(const CaseData& c, int t) {
  double s = 0.0;
  for (const auto& n : c.nodes) s += n.demand_p.at(t);
  return s;
}

/// Sum over steps and nodes of weight * demand: the largest possible
/// weighted-shedding objective ($/h summed over steps).
inline double total_weighted_demand(const CaseData& c) {
  double s = 0.0;
  for (const auto& n : c.nodes)
    for (double d : n.demand_p) s += n.weight * d;
  return s;
}

}  // namespace drdmf
