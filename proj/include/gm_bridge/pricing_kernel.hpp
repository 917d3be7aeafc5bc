#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "gm_bridge/quantizer.hpp"
#include "gm_bridge/skellam.hpp"

namespace gm_bridge {

// Ascending nodes on [0, 1]: half uniform with step 2/points, half geometric
// in 1 - t down to 1e-12, plus t = 1.
std::vector<double> make_time_grid(std::size_t points = 2048);

class PricingKernel;

// The kernel frozen at one time t. Values at t are obtained exactly from the
// next grid node t_i >= t by convolving with the Skellam(beta (t_i - t)) law,
// so no interpolation error enters.
class KernelSlice {
 public:
  double t() const noexcept { return t_; }
  double h(int n, Lattice y) const;
  // h_n at y - delta, y, y + delta from one pass over the grid node.
  std::array<double, 3> h_neighbours(int n, Lattice y) const;
  double price(Lattice y) const;
  // p(y + delta, t) - p(y, t); strictly positive for t < 1 when N > 1.
  double price_step(Lattice y) const;
  // Integral of p(y, r) over r in [t, 1].
  double price_remaining_integral(Lattice y) const;

 private:
  friend class PricingKernel;
  KernelSlice(const PricingKernel& kernel, double t);

  template <class NodeFn>
  double propagate(Lattice y, NodeFn&& node_value) const;

  const PricingKernel* kernel_;
  double t_;
  std::size_t node_;
  bool on_node_;
  double bridge_mu_ = 0.0;
  std::vector<double> bridge_;  // Skellam(beta (t_node - t)) pmf on 0..radius
};

// Evaluator of h_n(y, t) and p(y, t) on the delta-lattice. Rows for every
// grid node are filled at construction and immutable afterwards, so a kernel
// may be shared by any number of threads.
class PricingKernel {
 public:
  explicit PricingKernel(Quantization quant, std::size_t grid_points = 2048);

  const Quantization& quantization() const noexcept { return quant_; }
  const std::vector<double>& time_grid() const noexcept { return grid_; }
  double delta() const noexcept { return quant_.delta; }
  double beta() const noexcept { return quant_.beta; }
  std::size_t bins() const noexcept { return quant_.bins(); }

  KernelSlice at(double t) const;

  double h(int n, Lattice y, double t) const { return at(t).h(n, y); }
  double price(Lattice y, double t) const { return at(t).price(y); }
  double price_step(Lattice y, double t) const { return at(t).price_step(y); }
  // Integral of p(y, r) over r in [t0, t1].
  double price_integral(Lattice y, double t0, double t1) const;

  // Values on grid node i (direct, no propagation).
  double node_h(std::size_t i, int n, Lattice y) const;
  double node_price(std::size_t i, Lattice y) const;
  double node_price_step(std::size_t i, Lattice y) const;
  double node_price_remaining(std::size_t i, Lattice y) const;

 private:
  friend class KernelSlice;
  Quantization quant_;
  std::vector<double> grid_;
  std::vector<SkellamTable> rows_;  // Skellam(beta (1 - t_i))
  std::vector<double> jumps_;       // v_n - v_{n-1}, n = 2..N
};

// The delta -> 0 analogue: Gaussian bin probabilities and the price p^0.
class GaussianKernel {
 public:
  explicit GaussianKernel(AssetDistribution dist);

  const AssetDistribution& distribution() const noexcept { return dist_; }
  const std::vector<double>& boundaries() const noexcept { return a_; }
  std::size_t bins() const noexcept { return dist_.size(); }

  // P(y + B_{1-t} in [a_n, a_{n+1})), tail-accurate; indicator at t = 1.
  double h(int n, double y, double t) const;
  double price(double y, double t) const;
  // d/dy p^0(y, t); rejects t >= 1.
  double price_dy(double y, double t) const;
  // d/dy log h_n(y, t), robust when h_n itself underflows; rejects t >= 1.
  double log_h_dy(int n, double y, double t) const;
  int bin_of(double y) const;

 private:
  AssetDistribution dist_;
  std::vector<double> a_;
};

}  // namespace gm_bridge
