#pragma once

#include <cstddef>
#include <vector>

#include "gm_bridge/simulator.hpp"
#include "gm_bridge/stats.hpp"

namespace gm_bridge {

// Terminal profit function U(v_n, y, 1): the profit the insider could still
// lock in at the terminal bid/ask from level y. Zero exactly on
// [A_n - 1, A_{n+1} + 1).
double u_terminal(const Quantization& quant, int n, Lattice y);

// Expected-profit function U(v_n, y, t), with the time integral evaluated in
// closed form.
double u_of(const PricingKernel& kernel, int n, Lattice y, double t);

// U^S(0, 0) - U(0, 0) = delta (v_n - p(0, 0)) 1{0 <= floor(m_n)}.
double us_gap(const PricingKernel& kernel, int n);

// Per-path contribution to L(v_n, 0, 0): mid-level occupation weighted by
// the price gap, integrated exactly over each event interval.
double l_path_value(const PricingKernel& kernel, int n, const PathRecord& path);

// Sample mean and SE of l_path_value over paths conditioned on bin n.
// Exactly (0, 0) for the extreme bins.
Estimate l_estimate(const PricingKernel& kernel, int n, const std::vector<PathRecord>& paths);

struct ProfitSummary {
  double delta = 0.0;
  int bin = 0;
  double u0 = 0.0;
  double us_gap = 0.0;
  Estimate l_hat;
  Estimate realized;
  double loss_bound = 0.0;
  double loss_bound_se = 0.0;
  std::size_t paths = 0;
  std::size_t terminal_misses = 0;
  std::size_t runaways = 0;
};

// Combines the deterministic parts with the Monte Carlo estimates.
ProfitSummary loss_bound(const PricingKernel& kernel, int n, const Estimate& l_hat,
                         const Estimate& realized = {});

struct LossBoundOptions {
  std::size_t paths = 10000;
  bool realized = false;  // also run mode (b) for the realised profit
  std::size_t workers = 0;
};

// L from mode (a) paths, optionally realised profit from mode (b) paths.
// Runaway paths are excluded from the realised mean and counted.
ProfitSummary run_loss_bound(const MarketParams& params, int n, const LossBoundOptions& opts);

// sum_n p_n^delta * lossBound_n, with the SE of independent per-bin runs.
Estimate mixture_bound(const Quantization& quant, const std::vector<ProfitSummary>& per_bin);

}  // namespace gm_bridge
