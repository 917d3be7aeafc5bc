#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gm_bridge/distribution.hpp"
#include "gm_bridge/stats.hpp"

namespace gm_bridge {

struct SuiteOptions {
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  double end_epsilon = 1e-4;
  std::size_t max_events = 1'000'000;
  double kyle_dt = 1e-3;
};

struct OccupationRow {
  double delta = 0.0;
  std::string level_kind;  // "zero", "floor_mid" or "ceil_mid"
  double level = 0.0;      // level in demand units
  double t = 0.0;
  Estimate occupation;     // scaled occupation (1 / (2 delta)) * time at level
  Estimate abs_demand;     // |Y_t|, "zero" rows only
  Estimate identity_gap;   // 2 occupation - |Y_t|, "zero" rows only
  double brownian = 0.0;   // Brownian local-time mean at the limit level
};

// Unconditioned paths at each delta: the scaled occupation at level 0 and at
// the mid-levels of bin n, with the finite-delta identity
// 2 E[occupation at 0] = E|Y_t| and the Brownian reference.
std::vector<OccupationRow> occupation_convergence(const AssetDistribution& dist,
                                                  const std::vector<double>& delta_grid,
                                                  int n, double t, const SuiteOptions& opts);

struct LossRow {
  double delta = 0.0;
  int bin = 0;  // 0 marks the mixture row
  Estimate loss_bound;
  Estimate mixture_bound;
};

// Per-bin and mixture loss bounds at every delta (the Figure-1 dataset).
std::vector<LossRow> loss_convergence(const AssetDistribution& dist,
                                      const std::vector<double>& delta_grid,
                                      const SuiteOptions& opts);

struct KsRow {
  double delta = 0.0;
  int bin = 0;
  double t = 0.0;
  double statistic = 0.0;
  double p_value = 1.0;
  double critical_1pct = 0.0;
  std::size_t paths = 0;
};

// Two-sample KS distance between the time-t marginals of the conditioned
// walk (mode a) and of the Kyle equilibrium demand, per bin.
std::vector<KsRow> strategy_convergence(const AssetDistribution& dist,
                                        const std::vector<double>& delta_grid, int n,
                                        const std::vector<double>& time_grid,
                                        const SuiteOptions& opts);

}  // namespace gm_bridge
