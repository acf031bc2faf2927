#pragma once

#include <stdexcept>
#include <string>

#include "drdmf/solver/problem.hpp"

namespace drdmf {

/// A backend returned no usable solution where one was required.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& context, solver::Status status, const std::string& detail = {})
      : std::runtime_error(context + ": solver status " + solver::to_string(status) +
                           (detail.empty() ? "" : " (" + detail + ")")),
        status_(status) {}
  [[nodiscard]] solver::Status status() const { return status_; }

 private:
  solver::Status status_;
};

/// The master problem admits no first-stage decision.
class InfeasibleModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A McCormick dual bound was active at a subproblem optimum.
class DualBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enumeration would exceed the configured size guard.
class SupportTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace drdmf
