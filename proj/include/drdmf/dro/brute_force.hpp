#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "drdmf/dro/ccg.hpp"
#include "drdmf/dro/support.hpp"

namespace drdmf {

struct BruteForceValue {
  double value = 0.0;
  std::vector<WorstPoint> worst;
  std::size_t support_size = 0;
};

/// Primal DRO value of a fixed x: Q(x,u) for every u in D, then the
/// moment-constrained LP over distributions on D.
inline BruteForceValue brute_force_dro(const FirstStageDecision& x, const SecondStageModel& model,
                                       const solver::SolveOptions& opts = {},
                                       std::uint64_t limit = kDefaultSupportLimit) {
  const auto support = enumerate_support(model.case_data(), limit);
  std::vector<double> q;
  q.reserve(support.size());
  for (const auto& u : support) q.push_back(model.evaluate(x, u, opts).objective);
  BruteForceValue out;
  out.support_size = support.size();
  out.worst = worst_distribution(model.case_data(), support, q, &out.value, opts);
  return out;
}

inline BruteForceValue brute_force_dro(const FirstStageDecision& x, const CaseData& c,
                                       const solver::SolveOptions& opts = {}) {
  const SecondStageModel model(c);
  return brute_force_dro(x, model, opts);
}

/// max_u Q(x,u) over D by enumeration.
inline double brute_force_robust(const FirstStageDecision& x, const SecondStageModel& model,
                                 const solver::SolveOptions& opts = {}) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& u : enumerate_support(model.case_data())) best = std::max(best, model.evaluate(x, u, opts).objective);
  return best;
}

/// Every first-stage decision of a case: per-step closed-line sets that form
/// rooted forests, within the switching budget, constant over t for dr-smf.
inline std::vector<FirstStageDecision> enumerate_first_stages(const CaseData& c, Method method,
                                                              std::size_t limit = 200000) {
  const Topology topo = Topology::build(c);
  const int E = topo.num_edges;
  const int T = topo.horizon;
  if (E > 20) throw SupportTooLarge("too many lines to enumerate boundaries");
  // Radial line sets for a single step.
  std::vector<std::uint32_t> radial;
  for (std::uint32_t mask = 0; mask < (1u << E); ++mask) {
    auto closed = make_grid<int>(E, T);
    for (int e = 0; e < E; ++e)
      for (int t = 0; t < T; ++t) closed[e][t] = (mask >> e) & 1u;
    if (decision_from_status(c, topo, closed)) radial.push_back(mask);
  }
  auto changes = [](std::uint32_t a, std::uint32_t b) { return std::popcount(a ^ b); };

  std::vector<FirstStageDecision> out;
  std::vector<std::uint32_t> path(static_cast<std::size_t>(T));
  auto rec = [&](auto&& self, int t) -> void {
    if (t == T) {
      auto closed = make_grid<int>(E, T);
      for (int e = 0; e < E; ++e)
        for (int s = 0; s < T; ++s) closed[e][s] = (path[s] >> e) & 1u;
      out.push_back(*decision_from_status(c, topo, closed));
      if (out.size() > limit) throw SupportTooLarge("too many first-stage decisions to enumerate");
      return;
    }
    for (auto mask : radial) {
      if (t > 0 && method == Method::kDrSmf && mask != path[0]) continue;
      if (t > 0 && changes(mask, path[t - 1]) > c.n_sw_max) continue;
      path[t] = mask;
      self(self, t + 1);
    }
  };
  rec(rec, 0);
  return out;
}

struct BruteForceDesign {
  FirstStageDecision x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t designs = 0;
};

/// Optimal first stage by enumeration: min over designs of the primal DRO
/// value (or worst-case Q for ro-dmf).
inline BruteForceDesign brute_force_design(const CaseData& c, Method method, const solver::SolveOptions& opts = {}) {
  const SecondStageModel model(c);
  const auto support = enumerate_support(c);
  BruteForceDesign best;
  const auto designs = enumerate_first_stages(c, method);
  best.designs = designs.size();
  for (const auto& x : designs) {
    std::vector<double> q;
    for (const auto& u : support) q.push_back(model.evaluate(x, u, opts).objective);
    double v = 0.0;
    if (method == Method::kRoDmf) {
      v = *std::max_element(q.begin(), q.end());
    } else {
      worst_distribution(c, support, q, &v, opts);
    }
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
  }
  return best;
}

}  // namespace drdmf
