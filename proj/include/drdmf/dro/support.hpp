#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "drdmf/errors.hpp"
#include "drdmf/model/decision.hpp"
#include "drdmf/netdata/case.hpp"

namespace drdmf {

inline constexpr std::uint64_t kDefaultSupportLimit = 100000;

/// |D| = sum_{j<=k} C(E,j) * T^j: a trajectory is fixed by which lines fail
/// and the step each one fails at; the per-step budget binds at the last step.
/// Saturates at limit + 1.
inline std::uint64_t support_size(int num_edges, int horizon, int k, std::uint64_t limit = kDefaultSupportLimit) {
  const std::uint64_t cap = limit + 1;
  std::uint64_t total = 0, binom = 1, power = 1;
  for (int j = 0; j <= k && j <= num_edges; ++j) {
    if (j > 0) {
      binom = binom * static_cast<std::uint64_t>(num_edges - j + 1) / static_cast<std::uint64_t>(j);
      power *= static_cast<std::uint64_t>(horizon);
    }
    if (binom > cap || power > cap || binom * power > cap) return cap;
    total += binom * power;
    if (total > cap) return cap;
  }
  return total;
}

/// Every monotone trajectory with at most k failed lines per step, ordered by
/// number of failures, then line ids, then failure steps.
inline std::vector<ScenarioRealization> enumerate_support(const CaseData& c,
                                                          std::uint64_t limit = kDefaultSupportLimit) {
  const int E = static_cast<int>(c.edges.size());
  const int T = c.horizon_steps;
  const std::uint64_t size = support_size(E, T, c.k, limit);
  if (size > limit)
    throw SupportTooLarge("support has more than " + std::to_string(limit) + " trajectories");
  std::vector<ScenarioRealization> out;
  out.reserve(static_cast<std::size_t>(size));
  std::vector<int> lines, steps;
  auto emit = [&] {
    auto s = all_intact(E, T);
    for (std::size_t q = 0; q < lines.size(); ++q)
      for (int t = steps[q]; t < T; ++t) s.u[lines[q]][t] = 0;
    out.push_back(std::move(s));
  };
  // steps[] enumerates T^j failure times for the chosen lines.
  auto over_steps = [&](auto&& self, std::size_t q) -> void {
    if (q == lines.size()) {
      emit();
      return;
    }
    for (int t = 0; t < T; ++t) {
      steps[q] = t;
      self(self, q + 1);
    }
  };
  auto over_lines = [&](auto&& self, int start, int remaining) -> void {
    if (remaining == 0) {
      steps.assign(lines.size(), 0);
      over_steps(over_steps, 0);
      return;
    }
    for (int e = start; e <= E - remaining; ++e) {
      lines.push_back(e);
      self(self, e + 1, remaining - 1);
      lines.pop_back();
    }
  };
  for (int j = 0; j <= std::min(c.k, E); ++j) over_lines(over_lines, 0, j);
  return out;
}

}  // namespace drdmf
