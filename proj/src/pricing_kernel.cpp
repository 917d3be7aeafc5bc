#include "gm_bridge/pricing_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "gm_bridge/errors.hpp"
#include "gm_bridge/gaussian.hpp"

namespace gm_bridge {

std::vector<double> make_time_grid(std::size_t points) {
  if (points < 8) throw Error(ErrorKind::invalid_argument, "time grid needs >= 8 points");
  const std::size_t uniform = points / 2;
  const std::size_t geometric = points - uniform - 1;
  const double step = 1.0 / static_cast<double>(uniform);
  std::vector<double> grid;
  grid.reserve(points);
  for (std::size_t i = 0; i < uniform; ++i) grid.push_back(static_cast<double>(i) * step);
  // 1 - t runs geometrically from below step down to 1e-12.
  const double ratio = std::pow(1e-12 / step, 1.0 / static_cast<double>(geometric));
  for (std::size_t j = 1; j <= geometric; ++j)
    grid.push_back(1.0 - step * std::pow(ratio, static_cast<double>(j)));
  grid.push_back(1.0);
  return grid;
}

// ---------------------------------------------------------------------------

PricingKernel::PricingKernel(Quantization quant, std::size_t grid_points)
    : quant_(std::move(quant)), grid_(make_time_grid(grid_points)) {
  rows_.reserve(grid_.size());
  for (double t : grid_) rows_.emplace_back(quant_.beta * (1.0 - t));
  for (std::size_t n = 1; n < quant_.dist.values.size(); ++n)
    jumps_.push_back(quant_.dist.values[n] - quant_.dist.values[n - 1]);
}

KernelSlice PricingKernel::at(double t) const { return KernelSlice(*this, t); }

double PricingKernel::price_integral(Lattice y, double t0, double t1) const {
  return at(t0).price_remaining_integral(y) - at(t1).price_remaining_integral(y);
}

double PricingKernel::node_h(std::size_t i, int n, Lattice y) const {
  const Lattice lo = quant_.lower_edge(n), hi = quant_.upper_edge(n);
  return rows_[i].interval(lo - y, hi - 1 - y);
}

double PricingKernel::node_price(std::size_t i, Lattice y) const {
  // v_1 + sum_m (v_m - v_{m-1}) P(y + X >= A_m): monotone in y by construction.
  const SkellamTable& row = rows_[i];
  double p = quant_.dist.values.front();
  for (std::size_t m = 0; m < jumps_.size(); ++m)
    p += jumps_[m] * row.upper_tail(quant_.edges[m + 1] - y);
  return std::min(p, quant_.dist.values.back());
}

double PricingKernel::node_price_step(std::size_t i, Lattice y) const {
  const SkellamTable& row = rows_[i];
  double d = 0.0;
  for (std::size_t m = 0; m < jumps_.size(); ++m)
    d += jumps_[m] * row.pmf(quant_.edges[m + 1] - 1 - y);
  return d;
}

double PricingKernel::node_price_remaining(std::size_t i, Lattice y) const {
  const SkellamTable& row = rows_[i];
  double acc = 0.0;
  for (std::size_t m = 0; m < jumps_.size(); ++m)
    acc += jumps_[m] * row.upper_tail_integral(quant_.edges[m + 1] - y);
  return quant_.dist.values.front() * (1.0 - grid_[i]) + acc / quant_.beta;
}

// ---------------------------------------------------------------------------

KernelSlice::KernelSlice(const PricingKernel& kernel, double t) : kernel_(&kernel), t_(t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::invalid_argument, "time outside [0, 1]");
  const auto& grid = kernel.grid_;
  node_ = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
  on_node_ = grid[node_] == t;
  if (!on_node_) {
    bridge_mu_ = kernel.beta() * (grid[node_] - t);
    const Lattice r = skellam_short_radius(bridge_mu_);
    bridge_.resize(static_cast<std::size_t>(r) + 1);
    skellam_pmf_row(bridge_mu_, r, bridge_.data());
  }
}

template <class NodeFn>
double KernelSlice::propagate(Lattice y, NodeFn&& node_value) const {
  if (on_node_) return node_value(y);
  const auto r = static_cast<Lattice>(bridge_.size()) - 1;
  double acc = bridge_[0] * node_value(y);
  for (Lattice j = r; j >= 1; --j) {
    const double w = bridge_[static_cast<std::size_t>(j)];
    acc += w * (node_value(y - j) + node_value(y + j));
  }
  return acc;
}

double KernelSlice::h(int n, Lattice y) const {
  kernel_->quant_.check_bin(n);
  return propagate(y, [&](Lattice z) { return kernel_->node_h(node_, n, z); });
}

std::array<double, 3> KernelSlice::h_neighbours(int n, Lattice y) const {
  kernel_->quant_.check_bin(n);
  if (on_node_) {
    return {kernel_->node_h(node_, n, y - 1), kernel_->node_h(node_, n, y),
            kernel_->node_h(node_, n, y + 1)};
  }
  const auto r = static_cast<Lattice>(bridge_.size()) - 1;
  // Node values on y - r - 1 .. y + r + 1, shared by the three sums.
  thread_local std::vector<double> w;
  w.resize(static_cast<std::size_t>(2 * r + 3));
  for (Lattice z = -r - 1; z <= r + 1; ++z)
    w[static_cast<std::size_t>(z + r + 1)] = kernel_->node_h(node_, n, y + z);
  std::array<double, 3> out{};
  for (int d = -1; d <= 1; ++d) {
    const std::size_t c = static_cast<std::size_t>(r + 1 + d);
    double acc = bridge_[0] * w[c];
    for (Lattice j = r; j >= 1; --j) {
      const auto uj = static_cast<std::size_t>(j);
      acc += bridge_[uj] * (w[c - uj] + w[c + uj]);
    }
    out[static_cast<std::size_t>(d + 1)] = acc;
  }
  return out;
}

double KernelSlice::price(Lattice y) const {
  const auto& v = kernel_->quant_.dist.values;
  const double p = propagate(y, [&](Lattice z) { return kernel_->node_price(node_, z); });
  return std::clamp(p, v.front(), v.back());
}

double KernelSlice::price_step(Lattice y) const {
  return propagate(y, [&](Lattice z) { return kernel_->node_price_step(node_, z); });
}

double KernelSlice::price_remaining_integral(Lattice y) const {
  // Integral over [t, t_node] of the propagated price, plus the node's tail.
  const double tail_part = kernel_->node_price_remaining(node_, y);
  if (on_node_) return tail_part;
  // occupation[j] = int_0^mu P(X_s = j) ds = sum_{m > j} P(X_mu >= m).
  const std::size_t r = bridge_.size() - 1;
  std::vector<double> upper(r + 2, 0.0), occupation(r + 1, 0.0);
  for (std::size_t m = r + 1; m-- > 1;) upper[m] = upper[m + 1] + bridge_[m];
  double acc = 0.0;
  for (std::size_t j = r + 1; j-- > 0;) {
    acc += upper[j + 1];
    occupation[j] = acc;
  }
  double head = occupation[0] * kernel_->node_price(node_, y);
  for (std::size_t j = 1; j <= r; ++j) {
    const auto lj = static_cast<Lattice>(j);
    head += occupation[j] * (kernel_->node_price(node_, y - lj) + kernel_->node_price(node_, y + lj));
  }
  return tail_part + head / kernel_->beta();
}

// ---------------------------------------------------------------------------

GaussianKernel::GaussianKernel(AssetDistribution dist)
    : dist_(std::move(dist)), a_(gaussian_boundaries(dist_)) {}

int GaussianKernel::bin_of(double y) const {
  return static_cast<int>(std::upper_bound(a_.begin(), a_.end(), y) - a_.begin());
}

double GaussianKernel::h(int n, double y, double t) const {
  if (n < 1 || n > static_cast<int>(bins()))
    throw Error(ErrorKind::invalid_argument, "bin outside range");
  const double lo = a_[static_cast<std::size_t>(n - 1)];
  const double hi = a_[static_cast<std::size_t>(n)];
  if (t >= 1.0) return (y >= lo && y < hi) ? 1.0 : 0.0;
  const double s = std::sqrt(1.0 - t);
  const double l = (lo - y) / s, u = (hi - y) / s;
  if (l >= 0.0) return normal_sf(l) - normal_sf(u);
  if (u <= 0.0) return normal_sf(-u) - normal_sf(-l);
  return 1.0 - normal_sf(-l) - normal_sf(u);
}

double GaussianKernel::price(double y, double t) const {
  if (t >= 1.0) return dist_.values[static_cast<std::size_t>(bin_of(y) - 1)];
  const double s = std::sqrt(1.0 - t);
  double p = dist_.values.front();
  for (std::size_t m = 1; m < dist_.size(); ++m)
    p += (dist_.values[m] - dist_.values[m - 1]) * normal_sf((a_[m] - y) / s);
  return p;
}

double GaussianKernel::price_dy(double y, double t) const {
  if (!(t < 1.0)) throw Error(ErrorKind::invalid_argument, "price_dy is singular at t = 1");
  const double s = std::sqrt(1.0 - t);
  double d = 0.0;
  for (std::size_t m = 1; m < dist_.size(); ++m)
    d += (dist_.values[m] - dist_.values[m - 1]) * normal_pdf((a_[m] - y) / s);
  return d / s;
}

namespace {

// (phi(l) - phi(u)) / (Q(l) - Q(u)) for 0 <= l < u, with Q the upper tail;
// uses Mills ratios when both terms underflow.
double tail_log_derivative(double l, double u) {
  if (l < 5.0) return (normal_pdf(l) - normal_pdf(u)) / (normal_sf(l) - normal_sf(u));
  const double r = u == INFINITY ? 0.0 : std::exp(-0.5 * (u - l) * (u + l));
  return (1.0 - r) / (mills_ratio(l) - mills_ratio(u) * r);
}

}  // namespace

double GaussianKernel::log_h_dy(int n, double y, double t) const {
  if (!(t < 1.0)) throw Error(ErrorKind::invalid_argument, "log_h_dy is singular at t = 1");
  if (n < 1 || n > static_cast<int>(bins()))
    throw Error(ErrorKind::invalid_argument, "bin outside range");
  const double lo = a_[static_cast<std::size_t>(n - 1)];
  const double hi = a_[static_cast<std::size_t>(n)];
  const double s = std::sqrt(1.0 - t);
  const double l = (lo - y) / s, u = (hi - y) / s;
  if (l >= 0.0) return tail_log_derivative(l, u) / s;
  if (u <= 0.0) return -tail_log_derivative(-u, -l) / s;
  const double h = 1.0 - normal_sf(-l) - normal_sf(u);
  return (normal_pdf(l) - normal_pdf(u)) / (s * h);
}

}  // namespace gm_bridge
