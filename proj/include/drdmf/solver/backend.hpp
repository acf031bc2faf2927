#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "drdmf/solver/problem.hpp"

namespace drdmf::solver {

struct SolveOptions {
  std::string backend = "highs";
  double feasibility_tol = 1e-7;
  double mip_rel_gap = 1e-6;
  double mip_abs_gap = 1e-6;
  double time_limit = kInf;
  double mip_heuristic_effort = -1.0;  // < 0: backend default
  int seed = 0;
  bool verbose = false;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver context. Instances are not shared between threads.
class Backend {
 public:
  virtual ~Backend() = default;
  [[nodiscard]] virtual std::string_view name() const = 0;
  virtual SolveResult solve(const ProblemSpec& problem, const SolveOptions& opts) = 0;
};

}  // namespace drdmf::solver
