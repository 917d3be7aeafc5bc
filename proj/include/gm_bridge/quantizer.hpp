#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <json.hpp>

#include "gm_bridge/distribution.hpp"

namespace gm_bridge {

// Lattice points are carried as integer indices k, meaning y = k * delta.
using Lattice = std::int64_t;

// Sentinels standing in for -inf / +inf lattice boundaries. Far enough from
// any reachable index, small enough that +-1 arithmetic cannot overflow.
inline constexpr Lattice kLatticeNegInf = std::numeric_limits<Lattice>::min() / 4;
inline constexpr Lattice kLatticePosInf = std::numeric_limits<Lattice>::max() / 4;

// The delta-lattice version of an AssetDistribution. Bins are numbered
// 1..N; bin n is the lattice interval [A_n, A_{n+1}).
struct Quantization {
  AssetDistribution dist;
  double delta = 0.0;
  double beta = 0.0;                // 1 / (2 delta^2)
  std::vector<Lattice> edges;       // A_1 = -inf, ..., A_{N+1} = +inf
  std::vector<double> bin_probs;    // p_n^delta, index n-1
  std::vector<Lattice> mid_lower;   // floor(m_n), sentinel for n = 1 and n = N
  std::vector<Lattice> mid_upper;   // ceil(m_n) = floor(m_n) + 1

  std::size_t bins() const noexcept { return bin_probs.size(); }
  double value(int n) const { return dist.values.at(static_cast<std::size_t>(n - 1)); }
  Lattice lower_edge(int n) const { return edges.at(static_cast<std::size_t>(n - 1)); }
  Lattice upper_edge(int n) const { return edges.at(static_cast<std::size_t>(n)); }
  Lattice floor_mid(int n) const { return mid_lower.at(static_cast<std::size_t>(n - 1)); }
  Lattice ceil_mid(int n) const { return mid_upper.at(static_cast<std::size_t>(n - 1)); }
  bool interior(int n) const noexcept { return n > 1 && n < static_cast<int>(bins()); }
  bool contains(int n, Lattice y) const { return y >= lower_edge(n) && y < upper_edge(n); }
  // Bin holding lattice point y.
  int bin_of(Lattice y) const;
  // Insider buys in the region y <= floor(m_n) and sells for y >= ceil(m_n).
  bool buy_region(int n, Lattice y) const { return y <= floor_mid(n); }
  void check_bin(int n) const;
  // Terminal price P(y): value of the bin containing y.
  double terminal_price(Lattice y) const { return value(bin_of(y)); }
};

Quantization quantize(const AssetDistribution& dist, double delta);

// Limit boundaries a_n^0 = Phi^{-1}(p_1 + ... + p_{n-1}), with +-inf ends.
std::vector<double> gaussian_boundaries(const AssetDistribution& dist);

nlohmann::json to_json(const Quantization& q);

}  // namespace gm_bridge
