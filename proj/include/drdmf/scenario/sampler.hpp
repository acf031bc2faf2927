#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "drdmf/model/decision.hpp"
#include "drdmf/netdata/case.hpp"

namespace drdmf {

struct SamplerConfig {
  int n_scenarios = 1000;
  std::uint64_t seed = 1;
  double perturbation = 0.1;  // relative, uniform in [-p, +p]
  /// Cumulative failure probability per edge per step; mu_max when empty.
  std::optional<Grid<double>> probability_source;
};

inline void check_sampler_config(const SamplerConfig& cfg) {
  if (cfg.n_scenarios < 1) throw std::invalid_argument("n_scenarios must be >= 1");
  if (!(cfg.perturbation >= 0.0)) throw std::invalid_argument("perturbation must be >= 0");
}

/// Monte Carlo line-failure trajectories. Each edge gets one relative
/// disturbance per scenario applied to its whole cumulative profile, then
/// fails at step t with the incremental hazard (p_t - p_{t-1}) / (1 - p_{t-1}).
/// Failed lines stay failed. Samples are not truncated to the N-k budget.
inline std::vector<ScenarioRealization> sample_scenarios(const CaseData& c, const SamplerConfig& cfg) {
  check_sampler_config(cfg);
  const int E = static_cast<int>(c.edges.size());
  const int T = c.horizon_steps;
  Grid<double> prob = make_grid<double>(E, T);
  for (int e = 0; e < E; ++e)
    for (int t = 0; t < T; ++t)
      prob[e][t] = cfg.probability_source ? (*cfg.probability_source)[e][t] : c.edges[e].mu_max[t];

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ScenarioRealization> out;
  out.reserve(static_cast<std::size_t>(cfg.n_scenarios));
  for (int s = 0; s < cfg.n_scenarios; ++s) {
    auto sc = all_intact(E, T);
    for (int e = 0; e < E; ++e) {
      const double factor = 1.0 + cfg.perturbation * (2.0 * unit(rng) - 1.0);
      bool failed = false;
      double prev = 0.0;
      for (int t = 0; t < T; ++t) {
        const double p = std::clamp(prob[e][t] * factor, 0.0, 1.0);
        const double h = prev >= 1.0 ? 1.0 : std::clamp((p - prev) / (1.0 - prev), 0.0, 1.0);
        prev = std::max(prev, p);
        const double draw = unit(rng);  // drawn every step to keep streams aligned
        if (!failed && draw < h) failed = true;
        sc.u[e][t] = failed ? 0 : 1;
      }
    }
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace drdmf
