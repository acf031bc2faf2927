#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "drdmf/netdata/case.hpp"

namespace drdmf {

using nlohmann::json;

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw CaseError(where + " must be an object", where);
  auto it = obj.find(key);
  if (it == obj.end()) throw CaseError("missing field '" + key + "' in " + where, where + "." + key);
  return *it;
}

inline double get_number(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number()) throw CaseError(where + "." + key + " must be a number", where + "." + key);
  return v.get<double>();
}

inline int get_int(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number_integer()) throw CaseError(where + "." + key + " must be an integer", where + "." + key);
  return v.get<int>();
}

inline bool get_bool(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_boolean()) throw CaseError(where + "." + key + " must be a boolean", where + "." + key);
  return v.get<bool>();
}

inline std::string get_id(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw CaseError(where + "." + key + " must be a string", where + "." + key);
}

/// Per-step quantity: an array of exactly T numbers, or a scalar broadcast to T.
inline std::vector<double> get_steps(const json& obj, const std::string& key, int T,
                                     const std::string& where) {
  const auto& v = require(obj, key, where);
  const std::string path = where + "." + key;
  if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(T), v.get<double>());
  if (!v.is_array()) throw CaseError(path + " must be an array of numbers", path);
  if (static_cast<int>(v.size()) != T)
    throw CaseError(path + " has length " + std::to_string(v.size()) + " but horizon_steps is " +
                        std::to_string(T),
                    path);
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw CaseError(path + " must contain only numbers", path);
    out.push_back(x.get<double>());
  }
  return out;
}

inline const json& require_array(const json& root, const std::string& key) {
  const auto& v = require(root, key, "case");
  if (!v.is_array()) throw CaseError("'" + key + "' must be an array", key);
  return v;
}

}  // namespace detail

/// Builds a CaseData from the JSON case schema. Throws CaseError naming the
/// offending key on schema violations.
inline CaseData case_from_json(const json& root) {
  using namespace detail;
  CaseData c;
  const auto& meta = require(root, "meta", "case");
  c.s_base_kva = get_number(meta, "s_base_kva", "meta");
  c.horizon_steps = get_int(meta, "horizon_steps", "meta");
  c.step_hours = get_number(meta, "step_hours", "meta");
  if (c.horizon_steps < 1) throw CaseError("meta.horizon_steps must be >= 1", "meta.horizon_steps");
  const int T = c.horizon_steps;

  const auto& params = require(root, "params", "case");
  c.v_min = get_number(params, "v_min", "params");
  c.v_max = get_number(params, "v_max", "params");
  c.big_m = get_number(params, "big_m", "params");
  c.k = get_int(params, "k", "params");
  c.n_sw_max = get_int(params, "n_sw_max", "params");
  c.beta_bound = get_number(params, "beta_bound", "params");

  const auto& nodes = require_array(root, "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    std::string where = "nodes[" + std::to_string(i) + "]";
    NodeSpec spec;
    spec.id = get_id(n, "id", where);
    where += "(" + spec.id + ")";
    spec.demand_p = get_steps(n, "demand_p", T, where);
    spec.demand_q = get_steps(n, "demand_q", T, where);
    spec.weight = get_number(n, "weight", where);
    spec.critical = get_bool(n, "critical", where);
    c.nodes.push_back(std::move(spec));
  }
  const auto& edges = require_array(root, "edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    EdgeSpec spec;
    spec.from_node = get_id(e, "from_node", where);
    spec.to_node = get_id(e, "to_node", where);
    spec.r = get_number(e, "r", where);
    spec.x = get_number(e, "x", where);
    spec.is_tie = get_bool(e, "is_tie", where);
    spec.initially_closed = get_bool(e, "initially_closed", where);
    spec.mu_max = get_steps(e, "mu_max", T, where);
    c.edges.push_back(std::move(spec));
  }
  const auto& dgs = require_array(root, "dgs");
  for (std::size_t i = 0; i < dgs.size(); ++i) {
    const auto& d = dgs[i];
    const std::string where = "dgs[" + std::to_string(i) + "]";
    DgSpec spec;
    spec.node = get_id(d, "node", where);
    spec.p_max = get_steps(d, "p_max", T, where);
    spec.q_max = get_steps(d, "q_max", T, where);
    spec.grid_forming = get_bool(d, "grid_forming", where);
    c.dgs.push_back(std::move(spec));
  }
  return c;
}

inline json case_to_json(const CaseData& c) {
  json root;
  root["meta"] = {{"s_base_kva", c.s_base_kva}, {"horizon_steps", c.horizon_steps},
                  {"step_hours", c.step_hours}};
  root["params"] = {{"v_min", c.v_min}, {"v_max", c.v_max}, {"big_m", c.big_m},
                    {"k", c.k}, {"n_sw_max", c.n_sw_max}, {"beta_bound", c.beta_bound}};
  json nodes = json::array();
  for (const auto& n : c.nodes)
    nodes.push_back({{"id", n.id}, {"demand_p", n.demand_p}, {"demand_q", n.demand_q},
                     {"weight", n.weight}, {"critical", n.critical}});
  root["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& e : c.edges)
    edges.push_back({{"from_node", e.from_node}, {"to_node", e.to_node}, {"r", e.r}, {"x", e.x},
                     {"is_tie", e.is_tie}, {"initially_closed", e.initially_closed},
                     {"mu_max", e.mu_max}});
  root["edges"] = std::move(edges);
  json dgs = json::array();
  for (const auto& d : c.dgs)
    dgs.push_back({{"node", d.node}, {"p_max", d.p_max}, {"q_max", d.q_max},
                   {"grid_forming", d.grid_forming}});
  root["dgs"] = std::move(dgs);
  return root;
}

inline CaseData parse_case(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CaseError(std::string("malformed case file: ") + e.what(), "<document>");
  }
  return case_from_json(root);
}

inline CaseData load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CaseError("cannot open case file '" + path + "'", "<file>");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_case(ss.str());
}

inline std::string serialize_case(const CaseData& c) { return case_to_json(c).dump(2) + "\n"; }

inline void save_case(const CaseData& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CaseError("cannot write case file '" + path + "'", "<file>");
  out << serialize_case(c);
  if (!out) throw CaseError("failed writing case file '" + path + "'", "<file>");
}

/// 64-bit FNV-1a of the canonical (compact, key-sorted) case JSON, as hex.
inline std::string case_fingerprint(const CaseData& c) {
  const std::string text = case_to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace drdmf
