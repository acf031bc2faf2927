#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "drdmf/solver/backend.hpp"
#include "drdmf/solver/highs_backend.hpp"
#include "drdmf/solver/reference_backend.hpp"

namespace drdmf::solver {

inline std::vector<std::string> backend_names() { return {"highs", "reference"}; }

inline std::unique_ptr<Backend> make_backend(std::string_view name) {
  if (name == "highs") return std::make_unique<HighsBackend>();
  if (name == "reference") return std::make_unique<ReferenceBackend>();
  throw BackendError("unknown solver backend '" + std::string(name) + "'");
}

/// Solves with a fresh backend context chosen by opts.backend.
inline SolveResult solve(const ProblemSpec& problem, const SolveOptions& opts = {}) {
  return make_backend(opts.backend)->solve(problem, opts);
}

/// Fixes the integer columns of a MIP result at their rounded values and
/// re-solves the remaining LP. Returns the LP result (with duals); the
/// integer columns carry exact integers.
inline SolveResult resolve_fixed(const ProblemSpec& problem, const SolveResult& mip, const SolveOptions& opts = {}) {
  if (!mip.has_solution()) throw BackendError("resolve_fixed needs a MIP solution");
  ProblemSpec lp = problem;
  for (int j = 0; j < lp.num_columns(); ++j) {
    auto& c = lp.columns[j];
    if (!c.integer) continue;
    const double v = std::clamp(std::round(mip.primal[j]), c.lower, c.upper);
    c.lower = c.upper = v;
    c.integer = false;
  }
  lp.warm_start.reset();
  auto res = solve(lp, opts);
  if (res.has_solution())
    for (int j = 0; j < lp.num_columns(); ++j)
      if (problem.columns[j].integer) res.primal[j] = lp.columns[j].lower;
  return res;
}

}  // namespace drdmf::solver
