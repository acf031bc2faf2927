#pragma once

#include <chrono>
#include <cmath>
#include <string_view>
#include <vector>

#include "drdmf/solver/backend.hpp"

namespace drdmf::solver {

namespace detail {

/// Dense bounded-variable revised simplex with Bland's rule. Intended for small
/// problems only (cross-checking the production backend in tests).
class DenseSimplex {
 public:
  enum class Outcome { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

  struct Result {
    Outcome outcome = Outcome::kIterationLimit;
    std::vector<double> x;     // structural values
    std::vector<double> y;     // row duals
    std::vector<double> d;     // structural reduced costs
    double objective = 0.0;
  };

  static Result run(const ProblemSpec& p, const std::vector<double>& lower,
                    const std::vector<double>& upper) {
    DenseSimplex s(p, lower, upper);
    return s.solve();
  }

 private:
  static constexpr double kTol = 1e-9;
  static constexpr double kPivotTol = 1e-11;

  int m_, n_struct_, n_total_;
  std::vector<std::vector<double>> a_;  // m x n_total, column-major by variable
  std::vector<double> b_, cost_, lo_, up_, x_;
  std::vector<int> basis_;
  std::vector<bool> is_basic_;
  std::vector<std::vector<double>> binv_;
  int first_artificial_;
  const ProblemSpec& p_;

  DenseSimplex(const ProblemSpec& p, const std::vector<double>& lower,
               const std::vector<double>& upper)
      : m_(p.num_rows()), n_struct_(p.num_columns()), p_(p) {
    // structural | slacks (one per row) | artificials (one per row)
    n_total_ = n_struct_ + 2 * m_;
    first_artificial_ = n_struct_ + m_;
    a_.assign(n_total_, std::vector<double>(m_, 0.0));
    b_.resize(m_);
    lo_.assign(n_total_, 0.0);
    up_.assign(n_total_, kInf);
    cost_.assign(n_total_, 0.0);
    for (int j = 0; j < n_struct_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
    }
    for (int i = 0; i < m_; ++i) {
      const auto& r = p.rows[i];
      for (std::size_t k = 0; k < r.index.size(); ++k) a_[r.index[k]][i] += r.value[k];
      b_[i] = r.rhs;
      const int s = n_struct_ + i;
      a_[s][i] = 1.0;
      if (r.sense == Sense::kLessEqual) {
        lo_[s] = 0.0;
        up_[s] = kInf;
      } else if (r.sense == Sense::kGreaterEqual) {
        lo_[s] = -kInf;
        up_[s] = 0.0;
      } else {
        lo_[s] = up_[s] = 0.0;
      }
    }
    x_.assign(n_total_, 0.0);
    for (int j = 0; j < first_artificial_; ++j) x_[j] = nonbasic_start(j);
    basis_.resize(m_);
    is_basic_.assign(n_total_, false);
    binv_.assign(m_, std::vector<double>(m_, 0.0));
    for (int i = 0; i < m_; ++i) {
      double r = b_[i];
      for (int j = 0; j < first_artificial_; ++j) r -= a_[j][i] * x_[j];
      const int art = first_artificial_ + i;
      const double sign = r >= 0 ? 1.0 : -1.0;
      a_[art][i] = sign;
      x_[art] = std::abs(r);
      basis_[i] = art;
      is_basic_[art] = true;
      binv_[i][i] = sign;
    }
  }

  double nonbasic_start(int j) const {
    if (std::isfinite(lo_[j])) return lo_[j];
    if (std::isfinite(up_[j])) return up_[j];
    return 0.0;
  }

  void refactor() {
    // Gauss-Jordan inversion of the basis matrix.
    std::vector<std::vector<double>> m(m_, std::vector<double>(2 * m_, 0.0));
    for (int i = 0; i < m_; ++i) {
      for (int k = 0; k < m_; ++k) m[i][k] = a_[basis_[k]][i];
      m[i][m_ + i] = 1.0;
    }
    for (int c = 0; c < m_; ++c) {
      int piv = c;
      for (int r = c + 1; r < m_; ++r)
        if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
      std::swap(m[c], m[piv]);
      const double d = m[c][c];
      if (std::abs(d) < kPivotTol) return;  // keep the previous inverse
      for (auto& v : m[c]) v /= d;
      for (int r = 0; r < m_; ++r)
        if (r != c && m[r][c] != 0.0) {
          const double f = m[r][c];
          for (int k = 0; k < 2 * m_; ++k) m[r][k] -= f * m[c][k];
        }
    }
    for (int i = 0; i < m_; ++i)
      for (int k = 0; k < m_; ++k) binv_[i][k] = m[i][m_ + k];
    // Recompute basic values from nonbasic ones.
    std::vector<double> rhs = b_;
    for (int j = 0; j < n_total_; ++j)
      if (!is_basic_[j] && x_[j] != 0.0)
        for (int i = 0; i < m_; ++i) rhs[i] -= a_[j][i] * x_[j];
    for (int i = 0; i < m_; ++i) {
      double v = 0.0;
      for (int k = 0; k < m_; ++k) v += binv_[i][k] * rhs[k];
      x_[basis_[i]] = v;
    }
  }

  std::vector<double> duals() const {
    std::vector<double> y(m_, 0.0);
    for (int k = 0; k < m_; ++k) {
      double v = 0.0;
      for (int i = 0; i < m_; ++i) v += cost_[basis_[i]] * binv_[i][k];
      y[k] = v;
    }
    return y;
  }

  double reduced_cost(int j, const std::vector<double>& y) const {
    double d = cost_[j];
    for (int i = 0; i < m_; ++i) d -= y[i] * a_[j][i];
    return d;
  }

  Outcome iterate(int max_iter) {
    for (int iter = 0; iter < max_iter; ++iter) {
      if (iter % 50 == 49) refactor();
      const auto y = duals();
      int enter = -1;
      double dir = 0.0;
      for (int j = 0; j < n_total_; ++j) {
        if (is_basic_[j] || lo_[j] == up_[j]) continue;
        const double d = reduced_cost(j, y);
        if (d < -kTol && x_[j] < up_[j] - kTol) {
          enter = j;
          dir = 1.0;
          break;
        }
        if (d > kTol && x_[j] > lo_[j] + kTol) {
          enter = j;
          dir = -1.0;
          break;
        }
      }
      if (enter < 0) return Outcome::kOptimal;

      std::vector<double> alpha(m_, 0.0);
      for (int i = 0; i < m_; ++i) {
        double v = 0.0;
        for (int k = 0; k < m_; ++k) v += binv_[i][k] * a_[enter][k];
        alpha[i] = v;
      }
      double theta = up_[enter] - lo_[enter];
      int leave = -1;
      for (int i = 0; i < m_; ++i) {
        const double rate = dir * alpha[i];
        const int bj = basis_[i];
        double lim = kInf;
        if (rate > kPivotTol && std::isfinite(lo_[bj])) lim = (x_[bj] - lo_[bj]) / rate;
        else if (rate < -kPivotTol && std::isfinite(up_[bj])) lim = (up_[bj] - x_[bj]) / -rate;
        lim = std::max(lim, 0.0);
        if (lim < theta - kTol || (lim <= theta + kTol && leave >= 0 && bj < basis_[leave])) {
          theta = lim;
          leave = i;
        }
      }
      if (!std::isfinite(theta)) return Outcome::kUnbounded;

      x_[enter] += dir * theta;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= dir * theta * alpha[i];
      if (leave < 0) continue;  // bound flip

      const int out = basis_[leave];
      const double rate = dir * alpha[leave];
      x_[out] = rate > 0 ? lo_[out] : up_[out];
      is_basic_[out] = false;
      is_basic_[enter] = true;
      basis_[leave] = enter;
      const double piv = alpha[leave];
      for (auto& v : binv_[leave]) v /= piv;
      for (int i = 0; i < m_; ++i)
        if (i != leave && alpha[i] != 0.0) {
          const double f = alpha[i];
          for (int k = 0; k < m_; ++k) binv_[i][k] -= f * binv_[leave][k];
        }
    }
    return Outcome::kIterationLimit;
  }

  Result solve() {
    Result res;
    const int max_iter = 50000 + 200 * (n_total_ + m_);
    // Phase 1: drive artificials to zero.
    for (int j = first_artificial_; j < n_total_; ++j) cost_[j] = 1.0;
    Outcome o = iterate(max_iter);
    if (o == Outcome::kIterationLimit) return res;
    refactor();
    double infeas = 0.0;
    for (int j = first_artificial_; j < n_total_; ++j) infeas += std::abs(x_[j]);
    if (infeas > 1e-7 * (1.0 + max_abs_rhs())) {
      res.outcome = Outcome::kInfeasible;
      return res;
    }
    // Phase 2: artificials pinned at zero.
    for (int j = first_artificial_; j < n_total_; ++j) {
      cost_[j] = 0.0;
      lo_[j] = up_[j] = 0.0;
      if (!is_basic_[j]) x_[j] = 0.0;
    }
    for (int j = 0; j < n_struct_; ++j) cost_[j] = p_.objective[j];
    o = iterate(max_iter);
    if (o != Outcome::kOptimal) {
      res.outcome = o;
      return res;
    }
    refactor();
    res.outcome = Outcome::kOptimal;
    res.x.assign(x_.begin(), x_.begin() + n_struct_);
    res.y = duals();
    res.d.resize(n_struct_);
    for (int j = 0; j < n_struct_; ++j) res.d[j] = reduced_cost(j, res.y);
    res.objective = p_.objective_offset;
    for (int j = 0; j < n_struct_; ++j) res.objective += p_.objective[j] * res.x[j];
    return res;
  }

  double max_abs_rhs() const {
    double v = 0.0;
    for (double bi : b_) v = std::max(v, std::abs(bi));
    return v;
  }
};

}  // namespace detail

/// Small dense reference backend: revised simplex for LPs, depth-first branch
/// and bound for MIPs. Exact enough for tests on toy instances; not for
/// production-sized models.
class ReferenceBackend final : public Backend {
 public:
  explicit ReferenceBackend(long node_limit = 200000) : node_limit_(node_limit) {}

  [[nodiscard]] std::string_view name() const override { return "reference"; }

  SolveResult solve(const ProblemSpec& p, const SolveOptions& opts) override {
    check_problem(p);
    const auto start = std::chrono::steady_clock::now();
    SolveResult res;
    std::vector<double> lo(p.num_columns()), up(p.num_columns());
    for (int j = 0; j < p.num_columns(); ++j) {
      lo[j] = p.columns[j].lower;
      up[j] = p.columns[j].upper;
    }
    if (!p.is_mip()) {
      const auto r = detail::DenseSimplex::run(p, lo, up);
      fill_lp(res, r);
    } else {
      best_ = kInf;
      incumbent_.clear();
      nodes_ = 0;
      unbounded_ = false;
      gap_ = opts.mip_rel_gap;
      branch(p, lo, up, opts.feasibility_tol);
      if (unbounded_) res.status = Status::kUnbounded;
      else if (incumbent_.empty()) res.status = nodes_ >= node_limit_ ? Status::kError : Status::kInfeasible;
      else {
        res.status = nodes_ >= node_limit_ ? Status::kFeasibleLimit : Status::kOptimal;
        res.primal = incumbent_;
        res.objective = best_;
        res.dual_bound = nodes_ >= node_limit_ ? -kInf : best_;
      }
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  }

 private:
  long node_limit_;
  long nodes_ = 0;
  double best_ = kInf;
  double gap_ = 0.0;
  bool unbounded_ = false;
  std::vector<double> incumbent_;

  static void fill_lp(SolveResult& res, const detail::DenseSimplex::Result& r) {
    using O = detail::DenseSimplex::Outcome;
    switch (r.outcome) {
      case O::kOptimal:
        res.status = Status::kOptimal;
        res.primal = r.x;
        res.objective = r.objective;
        res.row_dual = r.y;
        res.col_dual = r.d;
        res.dual_bound = r.objective;
        break;
      case O::kInfeasible: res.status = Status::kInfeasible; break;
      case O::kUnbounded: res.status = Status::kUnbounded; break;
      case O::kIterationLimit:
        res.status = Status::kError;
        res.message = "iteration limit";
        break;
    }
  }

  void branch(const ProblemSpec& p, std::vector<double>& lo, std::vector<double>& up,
              double int_tol) {
    if (++nodes_ > node_limit_ || unbounded_) return;
    const auto r = detail::DenseSimplex::run(p, lo, up);
    using O = detail::DenseSimplex::Outcome;
    if (r.outcome == O::kUnbounded) {
      unbounded_ = true;
      return;
    }
    if (r.outcome != O::kOptimal) return;
    if (r.objective >= best_ - gap_ * std::max(1.0, std::abs(best_))) return;
    int pick = -1;
    double worst = int_tol;
    for (int j = 0; j < p.num_columns(); ++j) {
      if (!p.columns[j].integer) continue;
      const double frac = std::abs(r.x[j] - std::round(r.x[j]));
      if (frac > worst) {
        worst = frac;
        pick = j;
      }
    }
    if (pick < 0) {
      best_ = r.objective;
      incumbent_ = r.x;
      for (int j = 0; j < p.num_columns(); ++j)
        if (p.columns[j].integer) incumbent_[j] = std::round(incumbent_[j]);
      return;
    }
    const double v = r.x[pick];
    const double old_lo = lo[pick], old_up = up[pick];
    // Explore the nearer side first.
    const bool down_first = v - std::floor(v) < 0.5;
    for (int side = 0; side < 2; ++side) {
      const bool down = (side == 0) == down_first;
      if (down) up[pick] = std::floor(v);
      else lo[pick] = std::ceil(v);
      branch(p, lo, up, int_tol);
      lo[pick] = old_lo;
      up[pick] = old_up;
    }
  }
};

}  // namespace drdmf::solver
