#pragma once

#include <cstddef>
#include <vector>

#include "gm_bridge/pricing_kernel.hpp"
#include "gm_bridge/rng.hpp"
#include "gm_bridge/stats.hpp"

namespace gm_bridge {

// Insider drift d/dy log h_n^0(y, t) of the continuous equilibrium.
double kyle_drift(const GaussianKernel& kernel, int n, double y, double t);

// E[local time of Brownian motion at level m up to t] = (E|B_t - m| - |m|) / 2.
double brownian_local_time_mean(double level, double t);

struct KyleParams {
  double dt = 1e-4;
  double end_epsilon = 1e-4;
  double drift_clip = 1e4;
};

struct KylePath {
  int bin = 0;
  double dt = 0.0;
  std::vector<double> trajectory;  // Y on the grid k dt, k = 0..1/dt
  double profit = 0.0;
  bool hit = false;                // Y_1 in [a_n^0, a_{n+1}^0)
};

// Euler-Maruyama path of the equilibrium demand given bin n. The drift is
// frozen on [1 - end_epsilon, 1] and clipped at drift_clip.
KylePath simulate_kyle(const GaussianKernel& kernel, int n, const KyleParams& params,
                       RngPolicy::Engine& rng);

struct KyleSummary {
  int bin = 0;  // 0 for the mixture over bins
  double dt = 0.0;
  Estimate profit;
  double hit_rate = 0.0;
  std::size_t paths = 0;
};

// `paths` unconditioned paths (bin drawn from the law of v). Returns one row
// per bin followed by the mixture row.
std::vector<KyleSummary> run_kyle(const GaussianKernel& kernel, const KyleParams& params,
                                  std::size_t paths, const RngPolicy& rng,
                                  std::size_t workers = 0);

}  // namespace gm_bridge
