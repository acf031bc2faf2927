#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "drdmf/netdata/case.hpp"

namespace drdmf {

/// Tunables for the modified IEEE 37-node study case. Everything the public
/// feeder data does not pin down (DG sizing, critical set, failure profiles,
/// budgets) is a constructed default, overridable here.
struct Ieee37Options {
  int horizon_steps = 4;
  double step_hours = 0.5;
  double s_base_kva = 1000.0;
  double v_base_kv = 4.8;
  double v_min = 0.95;
  double v_max = 1.05;

  std::vector<std::string> dg_nodes{"702", "704", "710"};
  double dg_capacity_ratio = 0.8;  // total grid-forming capacity / peak demand
  double critical_weight = 100.0;
  double noncritical_weight = 10.0;
  std::vector<std::string> critical_nodes{"713", "722", "728", "731", "738", "742"};
  std::vector<double> load_profile;  // per-step demand multipliers; empty = all 1

  double tie_length_ft = 1000.0;
  int k = 2;
  int n_sw_max = 3;

  /// Failure hazard of every line in every step, and the extra hazard of lines
  /// swept by the typhoon in that step.
  double background_hazard = 0.005;
  double typhoon_hazard = 0.1;
  /// Lines ("a-b") swept by the storm, one group per stage of its track. Stage
  /// s covers steps [s*T/S, (s+1)*T/S).
  std::vector<std::vector<std::string>> typhoon_path{
      {"701-702", "702-713", "702-703", "702-705", "705-712"},
      {"713-704", "704-714", "704-720", "703-727", "703-730", "727-744"},
      {"720-707", "720-706", "714-718", "730-709", "709-731", "709-708", "706-725", "707-722"},
      {"708-733", "733-734", "734-737", "737-738", "734-710", "738-711", "708-732"}};
};

namespace detail {

struct Ieee37Line {
  const char* a;
  const char* b;
  double feet;
  int config;  // 721..724, 0 = substation transformer
};

// IEEE 37-node feeder line segments, substation regulator 799-701 removed.
inline const std::vector<Ieee37Line>& ieee37_lines() {
  static const std::vector<Ieee37Line> lines{
      {"701", "702", 960, 722}, {"702", "705", 400, 724}, {"702", "713", 360, 723},
      {"702", "703", 1320, 722}, {"703", "727", 240, 724}, {"703", "730", 600, 723},
      {"704", "714", 80, 724},  {"704", "720", 800, 723}, {"705", "742", 320, 724},
      {"705", "712", 240, 724}, {"706", "725", 280, 724}, {"707", "724", 760, 724},
      {"707", "722", 120, 724}, {"708", "733", 320, 723}, {"708", "732", 320, 724},
      {"709", "731", 600, 723}, {"709", "708", 320, 723}, {"710", "735", 200, 724},
      {"710", "736", 1280, 724}, {"711", "741", 400, 723}, {"711", "740", 200, 724},
      {"713", "704", 520, 723}, {"714", "718", 520, 724}, {"720", "707", 920, 724},
      {"720", "706", 600, 723}, {"727", "744", 280, 723}, {"730", "709", 200, 723},
      {"733", "734", 560, 723}, {"734", "737", 640, 723}, {"734", "710", 520, 724},
      {"737", "738", 400, 723}, {"738", "711", 400, 723}, {"744", "728", 200, 724},
      {"744", "729", 280, 724}, {"775", "709", 0, 0}};
  return lines;
}

// Spot loads summed over phases: kW, kvar.
inline const std::map<std::string, std::pair<double, double>>& ieee37_loads() {
  static const std::map<std::string, std::pair<double, double>> loads{
      {"701", {630, 315}}, {"712", {85, 40}},  {"713", {85, 40}},  {"714", {38, 18}},
      {"718", {85, 40}},   {"720", {85, 40}},  {"722", {161, 80}}, {"724", {42, 21}},
      {"725", {42, 21}},   {"727", {42, 21}},  {"728", {126, 63}}, {"729", {42, 21}},
      {"730", {85, 40}},   {"731", {85, 40}},  {"732", {42, 21}},  {"733", {85, 40}},
      {"734", {42, 21}},   {"735", {85, 40}},  {"736", {42, 21}},  {"737", {140, 70}},
      {"738", {126, 62}},  {"740", {85, 40}},  {"741", {42, 21}},  {"742", {93, 44}},
      {"744", {42, 21}}};
  return loads;
}

// Positive-sequence approximation (self impedance) of the underground cable
// configurations, ohm per mile.
inline std::pair<double, double> ieee37_config_ohm_per_mile(int config) {
  switch (config) {
    case 721: return {0.2926, 0.1973};
    case 722: return {0.4751, 0.2973};
    case 723: return {1.2936, 0.6713};
    case 724: return {2.0952, 0.7758};
  }
  throw std::invalid_argument("unknown IEEE 37 line configuration");
}

inline std::string line_key(const std::string& a, const std::string& b) {
  return a < b ? a + "-" + b : b + "-" + a;
}

}  // namespace detail

inline const std::vector<std::pair<std::string, std::string>>& ieee37_tie_lines() {
  static const std::vector<std::pair<std::string, std::string>> ties{
      {"736", "742"}, {"725", "741"}, {"732", "736"}, {"718", "731"}};
  return ties;
}

/// Modified IEEE 37-node case: substation removed, grid-forming DGs at the
/// configured buses, four normally-open tie-lines, and cumulative failure
/// bounds that rise along the typhoon track.
inline CaseData build_ieee37_case(const Ieee37Options& o = {}) {
  if (o.horizon_steps < 1) throw std::invalid_argument("horizon_steps must be >= 1");
  if (!(o.step_hours > 0)) throw std::invalid_argument("step_hours must be positive");
  if (!(o.s_base_kva > 0) || !(o.v_base_kv > 0)) throw std::invalid_argument("bases must be positive");
  if (!(o.dg_capacity_ratio > 0)) throw std::invalid_argument("dg_capacity_ratio must be positive");
  if (!(o.critical_weight > o.noncritical_weight) || !(o.noncritical_weight > 0))
    throw std::invalid_argument("critical weight must exceed a positive non-critical weight");
  if (o.background_hazard < 0 || o.background_hazard > 1 || o.typhoon_hazard < 0 || o.typhoon_hazard > 1)
    throw std::invalid_argument("hazards must lie in [0,1]");
  if (o.k < 0 || o.n_sw_max < 0) throw std::invalid_argument("k and n_sw_max must be >= 0");
  if (o.dg_nodes.empty()) throw std::invalid_argument("at least one DG node is required");
  if (!o.load_profile.empty() && static_cast<int>(o.load_profile.size()) != o.horizon_steps)
    throw std::invalid_argument("load_profile length must equal horizon_steps");

  const int T = o.horizon_steps;
  const double z_base = o.v_base_kv * o.v_base_kv * 1000.0 / o.s_base_kva;
  CaseData c;
  c.s_base_kva = o.s_base_kva;
  c.horizon_steps = T;
  c.step_hours = o.step_hours;
  c.v_min = o.v_min;
  c.v_max = o.v_max;
  c.k = o.k;
  c.n_sw_max = o.n_sw_max;

  std::set<std::string> ids;
  for (const auto& l : detail::ieee37_lines()) {
    ids.insert(l.a);
    ids.insert(l.b);
  }
  const std::set<std::string> critical(o.critical_nodes.begin(), o.critical_nodes.end());
  for (const auto& id : critical)
    if (!ids.count(id)) throw std::invalid_argument("unknown critical node " + id);
  for (const auto& id : o.dg_nodes)
    if (!ids.count(id)) throw std::invalid_argument("unknown DG node " + id);

  std::vector<double> profile = o.load_profile;
  if (profile.empty()) profile.assign(T, 1.0);
  for (const auto& id : ids) {
    NodeSpec n;
    n.id = id;
    auto it = detail::ieee37_loads().find(id);
    const auto [p, q] = it == detail::ieee37_loads().end() ? std::pair{0.0, 0.0} : it->second;
    for (int t = 0; t < T; ++t) {
      n.demand_p.push_back(p * profile[t]);
      n.demand_q.push_back(q * profile[t]);
    }
    n.critical = critical.count(id) > 0;
    n.weight = n.critical ? o.critical_weight : o.noncritical_weight;
    c.nodes.push_back(std::move(n));
  }

  // Per-step hazard of each line along the storm track.
  std::map<std::string, std::vector<double>> extra;
  const int stages = static_cast<int>(o.typhoon_path.size());
  auto add_line = [&](const std::string& a, const std::string& b, double r, double x, bool tie) {
    EdgeSpec e;
    e.from_node = a;
    e.to_node = b;
    e.r = r;
    e.x = x;
    e.is_tie = tie;
    e.initially_closed = !tie;
    c.edges.push_back(std::move(e));
  };
  for (const auto& l : detail::ieee37_lines()) {
    if (l.config == 0) {
      // 500 kVA substation transformer, 0.09 + j1.81 % on its own base.
      add_line(l.a, l.b, 0.0009 * o.s_base_kva / 500.0, 0.0181 * o.s_base_kva / 500.0, false);
    } else {
      const auto [r, x] = detail::ieee37_config_ohm_per_mile(l.config);
      const double miles = l.feet / 5280.0;
      add_line(l.a, l.b, r * miles / z_base, x * miles / z_base, false);
    }
  }
  for (const auto& [a, b] : ieee37_tie_lines()) {
    const auto [r, x] = detail::ieee37_config_ohm_per_mile(724);
    const double miles = o.tie_length_ft / 5280.0;
    add_line(a, b, r * miles / z_base, x * miles / z_base, true);
  }

  std::set<std::string> known;
  for (const auto& e : c.edges) known.insert(detail::line_key(e.from_node, e.to_node));
  for (int s = 0; s < stages; ++s)
    for (const auto& name : o.typhoon_path[s]) {
      const auto dash = name.find('-');
      if (dash == std::string::npos) throw std::invalid_argument("typhoon path entry '" + name + "' is not 'a-b'");
      const auto key = detail::line_key(name.substr(0, dash), name.substr(dash + 1));
      if (!known.count(key)) throw std::invalid_argument("typhoon path names unknown line " + name);
      auto& h = extra[key];
      h.resize(T, 0.0);
      for (int t = 0; t < T; ++t)
        if (t * stages / T == s) h[t] = o.typhoon_hazard;
    }
  for (auto& e : c.edges) {
    const auto key = detail::line_key(e.from_node, e.to_node);
    double survive = 1.0;
    for (int t = 0; t < T; ++t) {
      double h = o.background_hazard;
      if (auto it = extra.find(key); it != extra.end()) h = 1.0 - (1.0 - h) * (1.0 - it->second[t]);
      survive *= 1.0 - h;
      e.mu_max.push_back(std::clamp(1.0 - survive, 0.0, 1.0));
    }
  }

  double peak = 0.0, peak_q = 0.0;
  for (int t = 0; t < T; ++t) {
    double p = 0.0, q = 0.0;
    for (const auto& n : c.nodes) {
      p += n.demand_p[t];
      q += n.demand_q[t];
    }
    peak = std::max(peak, p);
    peak_q = std::max(peak_q, q);
  }
  const double share = o.dg_capacity_ratio / static_cast<double>(o.dg_nodes.size());
  for (const auto& id : o.dg_nodes) {
    DgSpec d;
    d.node = id;
    d.p_max.assign(T, std::round(share * peak));
    d.q_max.assign(T, std::round(share * peak_q));
    d.grid_forming = true;
    c.dgs.push_back(std::move(d));
  }

  // A line carries at most what the root of its microgrid can generate.
  double unit = 0.0;
  for (const auto& d : c.dgs) unit = std::max({unit, d.p_max[0], d.q_max[0]});
  c.big_m = 1.01 * unit / o.s_base_kva;
  c.beta_bound = total_weighted_demand(c);
  return c;
}

}  // namespace drdmf
