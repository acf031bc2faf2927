#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace drdmf::solver {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Column {
  double lower = 0.0;
  double upper = kInf;
  bool integer = false;
  std::string name;
};

/// One sparse constraint row: sum_k value[k] * x[index[k]] (sense) rhs.
struct Row {
  std::vector<int> index;
  std::vector<double> value;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::string name;
  std::string tag;  // provenance, carried into LP dumps as a comment
};

/// Per-problem limits; each tightens the matching SolveOptions value.
struct Limits {
  double time_seconds = kInf;
  double mip_rel_gap = kInf;
};

/// A minimization problem over bounded, optionally integer columns.
struct ProblemSpec {
  std::vector<Column> columns;
  std::vector<double> objective;  // one entry per column
  double objective_offset = 0.0;
  std::vector<Row> rows;
  std::optional<std::vector<double>> warm_start;
  Limits limits;

  int add_column(double lower, double upper, double cost, bool integer = false,
                 std::string name = {}) {
    columns.push_back({lower, upper, integer, std::move(name)});
    objective.push_back(cost);
    return static_cast<int>(columns.size()) - 1;
  }

  int add_row(std::vector<int> index, std::vector<double> value, Sense sense, double rhs,
              std::string name = {}, std::string tag = {}) {
    rows.push_back({std::move(index), std::move(value), sense, rhs, std::move(name), std::move(tag)});
    return static_cast<int>(rows.size()) - 1;
  }

  [[nodiscard]] int num_columns() const { return static_cast<int>(columns.size()); }
  [[nodiscard]] int num_rows() const { return static_cast<int>(rows.size()); }
  [[nodiscard]] bool is_mip() const {
    return std::any_of(columns.begin(), columns.end(), [](const Column& c) { return c.integer; });
  }
};

/// Throws std::invalid_argument when the problem references missing columns,
/// has mismatched sizes, or declares an integer column with an infinite bound.
inline void check_problem(const ProblemSpec& p) {
  const int n = p.num_columns();
  if (static_cast<int>(p.objective.size()) != n)
    throw std::invalid_argument("objective size does not match column count");
  for (int j = 0; j < n; ++j) {
    const auto& c = p.columns[j];
    if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower > c.upper)
      throw std::invalid_argument("column " + std::to_string(j) + " has invalid bounds");
    if (c.integer && (!std::isfinite(c.lower) || !std::isfinite(c.upper)))
      throw std::invalid_argument("integer column " + std::to_string(j) + " needs finite bounds");
  }
  for (int i = 0; i < p.num_rows(); ++i) {
    const auto& r = p.rows[i];
    if (r.index.size() != r.value.size())
      throw std::invalid_argument("row " + std::to_string(i) + " index/value size mismatch");
    for (int k : r.index)
      if (k < 0 || k >= n)
        throw std::invalid_argument("row " + std::to_string(i) + " references missing column " +
                                    std::to_string(k));
  }
  if (p.warm_start && static_cast<int>(p.warm_start->size()) != n)
    throw std::invalid_argument("warm start size does not match column count");
}

enum class Status { kOptimal, kFeasibleLimit, kInfeasible, kUnbounded, kError };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kFeasibleLimit: return "feasible-limit";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kError: return "error";
  }
  return "error";
}

/// Dual convention (pure LPs): objective = A^T row_dual + col_dual, so for a
/// minimization a binding <= row has row_dual <= 0 and a binding >= row has
/// row_dual >= 0.
struct SolveResult {
  Status status = Status::kError;
  std::vector<double> primal;
  double objective = 0.0;
  std::vector<double> row_dual;
  std::vector<double> col_dual;
  double mip_gap = 0.0;
  double dual_bound = -kInf;  // proven lower bound for minimization
  double wall_seconds = 0.0;
  std::string message;

  [[nodiscard]] bool has_solution() const {
    return (status == Status::kOptimal || status == Status::kFeasibleLimit) && !primal.empty();
  }
};

inline double row_activity(const Row& r, const std::vector<double>& x) {
  double a = 0.0;
  for (std::size_t k = 0; k < r.index.size(); ++k) a += r.value[k] * x[r.index[k]];
  return a;
}

/// Positive amount by which activity violates the row.
inline double row_violation(const Row& r, double activity) {
  switch (r.sense) {
    case Sense::kLessEqual: return std::max(0.0, activity - r.rhs);
    case Sense::kGreaterEqual: return std::max(0.0, r.rhs - activity);
    case Sense::kEqual: return std::abs(activity - r.rhs);
  }
  return 0.0;
}

struct ResidualReport {
  double max_row_residual = 0.0;
  int worst_row = -1;
  double max_bound_violation = 0.0;
  double max_integrality_violation = 0.0;
  double objective_recomputed = 0.0;
  double objective_mismatch = 0.0;
  std::vector<int> violated_rows;  // rows whose residual exceeds the tolerance
  std::optional<double> dual_objective;
  std::optional<double> duality_gap;

  [[nodiscard]] bool feasible(double tol = 1e-6) const {
    return max_row_residual <= tol && max_bound_violation <= tol &&
           max_integrality_violation <= tol;
  }
};

/// Recomputes residuals, objective and (for LP results carrying duals) the dual
/// objective directly from the problem data.
inline ResidualReport verify_solution(const ProblemSpec& p, const SolveResult& res,
                                      double tol = 1e-6) {
  ResidualReport rep;
  const auto& x = res.primal;
  if (static_cast<int>(x.size()) != p.num_columns())
    throw std::invalid_argument("primal vector size does not match column count");
  for (int i = 0; i < p.num_rows(); ++i) {
    const double v = row_violation(p.rows[i], row_activity(p.rows[i], x));
    if (v > rep.max_row_residual) {
      rep.max_row_residual = v;
      rep.worst_row = i;
    }
    if (v > tol) rep.violated_rows.push_back(i);
  }
  double obj = p.objective_offset;
  for (int j = 0; j < p.num_columns(); ++j) {
    const auto& c = p.columns[j];
    rep.max_bound_violation =
        std::max({rep.max_bound_violation, c.lower - x[j], x[j] - c.upper, 0.0});
    if (c.integer)
      rep.max_integrality_violation =
          std::max(rep.max_integrality_violation, std::abs(x[j] - std::round(x[j])));
    obj += p.objective[j] * x[j];
  }
  rep.objective_recomputed = obj;
  rep.objective_mismatch = std::abs(obj - res.objective);

  if (!p.is_mip() && res.row_dual.size() == p.rows.size() &&
      static_cast<int>(res.col_dual.size()) == p.num_columns()) {
    double dual = p.objective_offset;
    for (int i = 0; i < p.num_rows(); ++i) dual += p.rows[i].rhs * res.row_dual[i];
    for (int j = 0; j < p.num_columns(); ++j) {
      const double d = res.col_dual[j];
      const auto& c = p.columns[j];
      // A reduced cost is paired with the bound the column sits at.
      if (d > 0.0 && std::isfinite(c.lower)) dual += d * c.lower;
      else if (d < 0.0 && std::isfinite(c.upper)) dual += d * c.upper;
      else if (d != 0.0) dual += d * x[j];
    }
    rep.dual_objective = dual;
    rep.duality_gap = std::abs(obj - dual);
  }
  return rep;
}

}  // namespace drdmf::solver
