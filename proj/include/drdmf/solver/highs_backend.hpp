#pragma once

#include <chrono>
#include <string_view>

#include "Highs.h"
#include "drdmf/solver/backend.hpp"

namespace drdmf::solver {

class HighsBackend final : public Backend {
 public:
  [[nodiscard]] std::string_view name() const override { return "highs"; }

  SolveResult solve(const ProblemSpec& p, const SolveOptions& opts) override {
    check_problem(p);
    const auto start = std::chrono::steady_clock::now();
    SolveResult res;
    const int n = p.num_columns();
    const int m = p.num_rows();

    HighsLp lp;
    lp.num_col_ = n;
    lp.num_row_ = m;
    lp.sense_ = ObjSense::kMinimize;
    lp.offset_ = p.objective_offset;
    lp.col_cost_ = p.objective;
    lp.col_lower_.resize(n);
    lp.col_upper_.resize(n);
    const bool mip = p.is_mip();
    if (mip) lp.integrality_.assign(n, HighsVarType::kContinuous);
    for (int j = 0; j < n; ++j) {
      lp.col_lower_[j] = p.columns[j].lower;
      lp.col_upper_[j] = p.columns[j].upper;
      if (p.columns[j].integer) lp.integrality_[j] = HighsVarType::kInteger;
    }
    lp.row_lower_.resize(m);
    lp.row_upper_.resize(m);
    auto& a = lp.a_matrix_;
    a.format_ = MatrixFormat::kRowwise;
    a.num_col_ = n;
    a.num_row_ = m;
    a.start_.assign(1, 0);
    for (int i = 0; i < m; ++i) {
      const auto& r = p.rows[i];
      lp.row_lower_[i] = r.sense == Sense::kLessEqual ? -kHighsInf : r.rhs;
      lp.row_upper_[i] = r.sense == Sense::kGreaterEqual ? kHighsInf : r.rhs;
      for (std::size_t k = 0; k < r.index.size(); ++k) {
        if (r.value[k] == 0.0) continue;
        a.index_.push_back(r.index[k]);
        a.value_.push_back(r.value[k]);
      }
      a.start_.push_back(static_cast<HighsInt>(a.index_.size()));
    }

    Highs highs;
    highs.setOptionValue("output_flag", opts.verbose);
    highs.setOptionValue("random_seed", opts.seed);
    highs.setOptionValue("threads", 1);
    highs.setOptionValue("mip_rel_gap", std::min(opts.mip_rel_gap, p.limits.mip_rel_gap));
    highs.setOptionValue("mip_abs_gap", opts.mip_abs_gap);
    if (opts.mip_heuristic_effort >= 0.0) highs.setOptionValue("mip_heuristic_effort", opts.mip_heuristic_effort);
    highs.setOptionValue("primal_feasibility_tolerance", opts.feasibility_tol);
    highs.setOptionValue("dual_feasibility_tolerance", opts.feasibility_tol);
    highs.setOptionValue("mip_feasibility_tolerance", opts.feasibility_tol);
    const double tl = std::min(opts.time_limit, p.limits.time_seconds);
    if (std::isfinite(tl)) highs.setOptionValue("time_limit", tl);

    if (highs.passModel(std::move(lp)) == HighsStatus::kError) {
      res.status = Status::kError;
      res.message = "HiGHS rejected the model";
      return res;
    }
    if (p.warm_start) {
      HighsSolution start_point;
      start_point.value_valid = true;
      start_point.col_value = *p.warm_start;
      highs.setSolution(start_point);
    }

    const HighsStatus run = highs.run();
    HighsModelStatus ms = highs.getModelStatus();
    if (ms == HighsModelStatus::kUnboundedOrInfeasible) {
      highs.setOptionValue("presolve", "off");
      highs.run();
      ms = highs.getModelStatus();
    }
    const auto& info = highs.getInfo();
    const bool has_primal = info.primal_solution_status == kSolutionStatusFeasible;
    switch (ms) {
      case HighsModelStatus::kOptimal:
      case HighsModelStatus::kModelEmpty:
        res.status = Status::kOptimal;
        break;
      case HighsModelStatus::kInfeasible:
        res.status = Status::kInfeasible;
        break;
      case HighsModelStatus::kUnbounded:
      case HighsModelStatus::kUnboundedOrInfeasible:
        res.status = Status::kUnbounded;
        break;
      case HighsModelStatus::kTimeLimit:
      case HighsModelStatus::kIterationLimit:
      case HighsModelStatus::kSolutionLimit:
      case HighsModelStatus::kInterrupt:
      case HighsModelStatus::kObjectiveBound:
      case HighsModelStatus::kObjectiveTarget:
        res.status = has_primal ? Status::kFeasibleLimit : Status::kError;
        break;
      default:
        res.status = Status::kError;
    }
    if (run == HighsStatus::kError && res.status == Status::kOptimal) res.status = Status::kError;
    res.message = highs.modelStatusToString(ms);

    if (res.status == Status::kOptimal || res.status == Status::kFeasibleLimit) {
      const auto& sol = highs.getSolution();
      res.primal = sol.col_value;
      if (static_cast<int>(res.primal.size()) != n) res.primal.assign(n, 0.0);
      res.objective = n == 0 ? p.objective_offset : info.objective_function_value;
      if (mip) {
        // Snap integer columns that sit within tolerance of an integer.
        for (int j = 0; j < n; ++j)
          if (p.columns[j].integer) {
            const double r = std::round(res.primal[j]);
            if (std::abs(res.primal[j] - r) <= opts.feasibility_tol) res.primal[j] = r;
          }
        res.mip_gap = info.mip_gap;
        res.dual_bound = info.mip_dual_bound;
      } else {
        if (sol.dual_valid) {
          res.row_dual = sol.row_dual;
          res.col_dual = sol.col_dual;
        }
        res.mip_gap = 0.0;
        res.dual_bound = res.objective;
      }
      if (res.status == Status::kOptimal && !mip) res.dual_bound = res.objective;
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  }
};

}  // namespace drdmf::solver
