#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drdmf/dro/ccg.hpp"
#include "drdmf/netdata/io.hpp"

namespace drdmf {

/// Root bus id energizing each node at step t ("" when disconnected).
inline std::vector<std::string> membership(const FirstStageDecision& x, const CaseData& c, const Topology& topo,
                                           int t) {
  std::vector<std::string> owner(static_cast<std::size_t>(topo.num_nodes));
  for (int r : topo.roots) {
    std::vector<int> stack{r};
    owner[r] = c.nodes[r].id;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int e : topo.incident[i]) {
        if (!x.closed(e, t)) continue;
        const int j = topo.other_end(e, i);
        if (!owner[j].empty()) continue;
        owner[j] = c.nodes[r].id;
        stack.push_back(j);
      }
    }
  }
  return owner;
}

inline std::string line_name(const EdgeSpec& e) { return e.from_node + "-" + e.to_node; }

inline json scenario_to_json(const ScenarioRealization& s, const CaseData& c) {
  // Failed lines per step.
  json steps = json::array();
  const int T = c.horizon_steps;
  for (int t = 0; t < T; ++t) {
    json failed = json::array();
    for (std::size_t e = 0; e < c.edges.size(); ++e)
      if (!s.u[e][t]) failed.push_back(line_name(c.edges[e]));
    steps.push_back(std::move(failed));
  }
  return steps;
}

inline json solution_to_json(const Solution& sol, const CaseData& c) {
  const Topology topo = Topology::build(c);
  const int T = c.horizon_steps;
  json j;
  j["method"] = method_tag(sol.method);
  j["case_fingerprint"] = case_fingerprint(c);
  j["objective"] = sol.objective;
  j["converged"] = sol.converged;
  j["diagnostic"] = sol.diagnostic;
  json steps = json::array();
  for (int t = 0; t < T; ++t) {
    json closed = json::array();
    for (int e = 0; e < topo.num_edges; ++e)
      if (sol.first_stage.closed(e, t)) closed.push_back(line_name(c.edges[e]));
    const auto owner = membership(sol.first_stage, c, topo, t);
    json members = json::object();
    for (int i = 0; i < topo.num_nodes; ++i)
      members[c.nodes[i].id] = owner[i].empty() ? json(nullptr) : json(owner[i]);
    steps.push_back({{"closed_lines", std::move(closed)}, {"membership", std::move(members)}});
  }
  j["steps"] = std::move(steps);
  if (uses_beta(sol.method)) {
    json beta = json::array();
    for (std::size_t e = 0; e < c.edges.size(); ++e)
      beta.push_back({{"line", line_name(c.edges[e])}, {"beta", sol.beta[e]}});
    j["beta"] = std::move(beta);
  }
  json worst = json::array();
  for (const auto& w : sol.worst_scenarios)
    worst.push_back({{"probability", w.probability}, {"q", w.q_value}, {"failed", scenario_to_json(w.u, c)}});
  j["worst_scenarios"] = std::move(worst);
  json log = json::array();
  for (const auto& r : sol.state.log)
    log.push_back({{"iteration", r.iteration},
                   {"lower_bound", r.lower_bound},
                   {"upper_bound", r.upper_bound},
                   {"subproblem_value", r.subproblem_value},
                   {"scenario", scenario_to_json(r.scenario, c)}});
  j["iterations"] = std::move(log);
  j["diagnostics"] = {{"max_linearization_error", sol.max_linearization_error},
                      {"max_bilinear_dual", sol.max_bilinear_dual},
                      {"max_sv_fraction", sol.max_sv_fraction},
                      {"cuts", sol.state.cut_scenarios.size()}};
  return j;
}

/// The parts of a stored solution needed to evaluate it.
struct StoredSolution {
  Method method = Method::kDrDmf;
  std::string case_fingerprint;
  FirstStageDecision first_stage;
  Beta beta;
  double objective = 0.0;
  bool converged = false;
};

class SolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline StoredSolution solution_from_json(const json& j, const CaseData& c) {
  StoredSolution s;
  try {
    s.method = parse_method(j.at("method").get<std::string>());
    s.case_fingerprint = j.at("case_fingerprint").get<std::string>();
    s.objective = j.at("objective").get<double>();
    s.converged = j.at("converged").get<bool>();
  } catch (const json::exception& e) {
    throw SolutionError(std::string("malformed solution: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SolutionError(e.what());
  }
  if (s.case_fingerprint != case_fingerprint(c))
    throw SolutionError("solution was computed for a different case (fingerprint " + s.case_fingerprint +
                        ", case " + case_fingerprint(c) + ")");
  const Topology topo = Topology::build(c);
  const int T = c.horizon_steps;
  std::map<std::string, int> by_name;
  for (int e = 0; e < topo.num_edges; ++e) by_name[line_name(c.edges[e])] = e;
  auto closed = make_grid<int>(topo.num_edges, T);
  const auto& steps = j.at("steps");
  if (!steps.is_array() || static_cast<int>(steps.size()) != T) throw SolutionError("solution has wrong step count");
  for (int t = 0; t < T; ++t)
    for (const auto& name : steps[t].at("closed_lines")) {
      auto it = by_name.find(name.get<std::string>());
      if (it == by_name.end()) throw SolutionError("unknown line '" + name.get<std::string>() + "' in solution");
      closed[it->second][t] = 1;
    }
  const auto x = decision_from_status(c, topo, closed);
  if (!x) throw SolutionError("stored boundaries are not radial");
  s.first_stage = *x;
  s.beta = zero_beta(c);
  if (j.contains("beta"))
    for (const auto& b : j.at("beta")) {
      auto it = by_name.find(b.at("line").get<std::string>());
      if (it == by_name.end()) throw SolutionError("unknown line in beta");
      s.beta[it->second] = b.at("beta").get<std::vector<double>>();
    }
  return s;
}

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw std::ios_base::failure("failed writing '" + path + "'");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SolutionError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_iteration_csv(std::ostream& os, const CcgState& st) {
  os << "iteration,lower_bound,upper_bound,subproblem_value,master_seconds,subproblem_seconds,"
        "linearization_error,max_bilinear_dual\n";
  os.precision(17);
  for (const auto& r : st.log)
    os << r.iteration << ',' << r.lower_bound << ',' << r.upper_bound << ',' << r.subproblem_value << ','
       << r.master_seconds << ',' << r.subproblem_seconds << ',' << r.linearization_error << ','
       << r.max_bilinear_dual << '\n';
}

}  // namespace drdmf
