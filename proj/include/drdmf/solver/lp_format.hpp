#pragma once

#include <cctype>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "drdmf/solver/problem.hpp"

namespace drdmf::solver {

namespace detail {

inline std::string lp_name(const std::string& given, char prefix, int i) {
  if (given.empty()) return prefix + std::to_string(i);
  std::string s = given;
  for (char& ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.')) ch = '_';
  if (std::isdigit(static_cast<unsigned char>(s.front()))) s.insert(s.begin(), prefix);
  return s;
}

inline void write_terms(std::ostream& os, const std::vector<int>& idx,
                        const std::vector<double>& val, const std::vector<std::string>& names) {
  bool first = true;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (val[k] == 0.0) continue;
    const double v = val[k];
    if (first) os << (v < 0 ? "- " : "");
    else os << (v < 0 ? " - " : " + ");
    os << std::abs(v) << ' ' << names[idx[k]];
    first = false;
  }
  if (first) os << "0 " << (names.empty() ? std::string("x0") : names[0]);
}

}  // namespace detail

/// Writes the problem in CPLEX LP text format. Row provenance tags become
/// backslash comments on the line before each constraint.
inline void write_lp(std::ostream& os, const ProblemSpec& p, const std::string& title = {}) {
  std::vector<std::string> names(p.columns.size());
  for (int j = 0; j < p.num_columns(); ++j) names[j] = detail::lp_name(p.columns[j].name, 'x', j);
  os << std::setprecision(17);
  if (!title.empty()) os << "\\ " << title << '\n';
  os << "Minimize\n obj: ";
  std::vector<int> idx;
  std::vector<double> val;
  for (int j = 0; j < p.num_columns(); ++j)
    if (p.objective[j] != 0.0) {
      idx.push_back(j);
      val.push_back(p.objective[j]);
    }
  if (idx.empty()) os << "0 " << (names.empty() ? "x0" : names[0]);
  else detail::write_terms(os, idx, val, names);
  if (p.objective_offset != 0.0) os << (p.objective_offset < 0 ? " - " : " + ") << std::abs(p.objective_offset);
  os << "\nSubject To\n";
  for (int i = 0; i < p.num_rows(); ++i) {
    const auto& r = p.rows[i];
    if (!r.tag.empty()) os << "\\ " << r.tag << '\n';
    os << ' ' << detail::lp_name(r.name, 'r', i) << ": ";
    detail::write_terms(os, r.index, r.value, names);
    switch (r.sense) {
      case Sense::kLessEqual: os << " <= "; break;
      case Sense::kGreaterEqual: os << " >= "; break;
      case Sense::kEqual: os << " = "; break;
    }
    os << r.rhs << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < p.num_columns(); ++j) {
    const auto& c = p.columns[j];
    if (c.lower == 0.0 && c.upper == kInf) continue;
    if (c.lower == -kInf && c.upper == kInf) {
      os << ' ' << names[j] << " free\n";
    } else if (c.lower == c.upper) {
      os << ' ' << names[j] << " = " << c.lower << '\n';
    } else {
      os << ' ';
      if (c.lower == -kInf) os << "-inf";
      else os << c.lower;
      os << " <= " << names[j] << " <= ";
      if (c.upper == kInf) os << "+inf";
      else os << c.upper;
      os << '\n';
    }
  }
  bool any_int = false;
  for (int j = 0; j < p.num_columns(); ++j)
    if (p.columns[j].integer) {
      if (!any_int) os << "General\n";
      any_int = true;
      os << ' ' << names[j] << '\n';
    }
  os << "End\n";
}

inline std::string to_lp_string(const ProblemSpec& p, const std::string& title = {}) {
  std::ostringstream os;
  write_lp(os, p, title);
  return os.str();
}

}  // namespace drdmf::solver
