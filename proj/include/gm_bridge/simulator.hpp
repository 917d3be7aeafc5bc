#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "gm_bridge/pricing_kernel.hpp"
#include "gm_bridge/rng.hpp"

namespace gm_bridge {

// Source of a jump event. ZB/ZS are noise orders that move the demand;
// XBB/XSS are insider orders that move it; XBS/XSB are insider orders that
// cancel an opposite noise order, leaving the demand unchanged.
enum class Mark : std::uint8_t { ZB, ZS, XBB, XBS, XSS, XSB };

const char* mark_name(Mark mark) noexcept;
// Change of the demand (in lattice steps) caused by an event.
int mark_move(Mark mark) noexcept;

struct Event {
  double time = 0.0;
  Lattice y_before = 0;
  Mark mark = Mark::ZB;
  double profit_increment = 0.0;
};

enum class PathStatus : std::uint8_t { ok, terminal_miss, runaway };

const char* path_status_name(PathStatus status) noexcept;

struct PathRecord {
  int bin = 0;
  std::vector<Event> events;
  Lattice y_terminal = 0;
  // (level, time spent with Y_{t-} at that level), sorted by level.
  std::vector<std::pair<Lattice, double>> occupation;
  double realized_profit = 0.0;
  PathStatus status = PathStatus::ok;
  std::uint64_t proposals = 0;            // rejection-sampling attempts
  std::uint64_t majorant_violations = 0;  // thinning refinements

  double occupation_at(Lattice level) const noexcept;
  // Y_t, right-continuous.
  Lattice y_at(double t) const noexcept;
  std::size_t count(Mark mark) const noexcept;
};

struct MarketParams {
  std::shared_ptr<const PricingKernel> kernel;
  double end_epsilon = 1e-4;
  std::size_t max_events = 1'000'000;
  RngPolicy rng;

  void validate() const;
  const Quantization& quantization() const { return kernel->quantization(); }
};

struct Intensities {
  double buy_buy = 0.0;    // insider buys that move the demand
  double buy_sell = 0.0;   // insider buys cancelling noise sells
  double sell_sell = 0.0;  // insider sells that move the demand
  double sell_buy = 0.0;   // insider sells cancelling noise buys
};

// Equilibrium insider intensities for bin n at (y, t). Throws
// Error(stranded_path) if h_n(y, t) underflows to zero.
Intensities insider_intensities(const PricingKernel& kernel, int n, Lattice y, double t);
Intensities insider_intensities(const KernelSlice& slice, const Quantization& quant, int n,
                                Lattice y);

// Upper bound for the active insertion intensity (buy_buy in the buy region,
// sell_sell in the sell region) of bin n at level y on [t_lo, t_hi]:
// 1.25 times the maximum over nine equispaced samples.
double thinning_majorant(const PricingKernel& kernel, int n, Lattice y, double t_lo,
                         double t_hi);

// Mode (a): the unconditioned walk, accepted when Z_1 lands in bin n.
// Throws Error(retry_budget_exceeded) after 1e5 rejected proposals.
PathRecord simulate_conditioned(const MarketParams& params, int n, std::uint64_t path_index);
// The unconditioned walk; bin is the bin holding Z_1.
PathRecord simulate_unconditioned(const MarketParams& params, std::uint64_t path_index);
// Mode (b): noise orders plus the insider's bridge strategy for bin n,
// with the realised profit ledger.
PathRecord simulate_constructive(const MarketParams& params, int n, std::uint64_t path_index);
// Mode (b) with the bin drawn from the quantized law first.
PathRecord simulate_constructive_mixture(const MarketParams& params, std::uint64_t path_index);

inline constexpr std::uint64_t kRetryBudget = 100000;

}  // namespace gm_bridge
