#include "gm_bridge/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

#include "gm_bridge/errors.hpp"
#include "gm_bridge/stats.hpp"

namespace gm_bridge {

namespace {

using Engine = RngPolicy::Engine;

double uniform01(Engine& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double exponential(Engine& rng, double rate) { return -std::log1p(-uniform01(rng)) / rate; }

// Accumulates events and exact occupation times along one path.
class PathBuilder {
 public:
  explicit PathBuilder(int bin) { rec_.bin = bin; }

  Lattice y() const noexcept { return y_; }
  std::size_t events() const noexcept { return rec_.events.size(); }

  void add(double time, Mark mark, double profit = 0.0) {
    rec_.events.push_back({time, y_, mark, profit});
    profit_.add(profit);
    if (const int move = mark_move(mark); move != 0) {
      occupation_[y_] += time - last_;
      last_ = time;
      y_ += move;
    }
  }

  PathRecord finish() {
    occupation_[y_] += 1.0 - last_;
    rec_.y_terminal = y_;
    rec_.realized_profit = profit_.value();
    rec_.occupation.assign(occupation_.begin(), occupation_.end());
    return std::move(rec_);
  }

  PathRecord& record() noexcept { return rec_; }

 private:
  PathRecord rec_;
  Lattice y_ = 0;
  double last_ = 0.0;
  std::map<Lattice, double> occupation_;
  CompensatedSum profit_;
};

// Unconditioned walk with `up` and `down` jumps at iid uniform times: the
// jump times are order statistics built from exponential spacings and the
// marks are a uniformly random arrangement of the counts.
void fill_walk(PathBuilder& b, std::int64_t up, std::int64_t down, Engine& rng) {
  const std::int64_t total = up + down;
  std::vector<double> times(static_cast<std::size_t>(total));
  double s = 0.0;
  for (auto& t : times) {
    s += exponential(rng, 1.0);
    t = s;
  }
  s += exponential(rng, 1.0);
  std::int64_t ups_left = up;
  for (std::int64_t k = 0; k < total; ++k) {
    const auto remaining = static_cast<double>(total - k);
    const bool is_up = uniform01(rng) * remaining < static_cast<double>(ups_left);
    if (is_up) --ups_left;
    b.add(times[static_cast<std::size_t>(k)] / s, is_up ? Mark::ZB : Mark::ZS);
  }
}

PathRecord walk_path(const MarketParams& params, int n, Engine& rng, bool conditioned) {
  const Quantization& q = params.quantization();
  std::poisson_distribution<std::int64_t> poisson(q.beta);
  for (std::uint64_t attempt = 1; attempt <= kRetryBudget; ++attempt) {
    const std::int64_t up = poisson(rng);
    const std::int64_t down = poisson(rng);
    if (conditioned && !q.contains(n, up - down)) continue;
    PathBuilder b(conditioned ? n : q.bin_of(up - down));
    fill_walk(b, up, down, rng);
    b.record().proposals = attempt;
    return b.finish();
  }
  throw Error(ErrorKind::retry_budget_exceeded,
              "rejection sampling exceeded its retry budget for bin " + std::to_string(n));
}

double active_rate(const Intensities& th, bool buy) { return buy ? th.buy_buy : th.sell_sell; }
double cancel_probability(const Intensities& th, bool buy, double beta) {
  return std::min(1.0, (buy ? th.buy_sell : th.sell_buy) / beta);
}

PathRecord constructive_path(const MarketParams& params, int n, Engine& rng) {
  const PricingKernel& kernel = *params.kernel;
  const Quantization& q = kernel.quantization();
  const double beta = q.beta, delta = q.delta, v = q.value(n);
  const double t_freeze = 1.0 - params.end_epsilon;
  PathBuilder b(n);
  double t = 0.0;

  // Event at time s of the given kind; d = +1 in the buy region, -1 in the
  // sell region. Prices are taken at the event time.
  auto noise_with = [&](double s, int d) { b.add(s, d > 0 ? Mark::ZB : Mark::ZS); };
  auto noise_against = [&](double s, int d) { b.add(s, d > 0 ? Mark::ZS : Mark::ZB); };
  auto insider_move = [&](double s, int d, const KernelSlice& sl) {
    const Lattice y = b.y();
    if (d > 0) b.add(s, Mark::XBB, delta * (v - sl.price(y + 1)));
    else b.add(s, Mark::XSS, -delta * (v - sl.price(y - 1)));
  };
  auto insider_cancel = [&](double s, int d, const KernelSlice& sl) {
    const double gap = delta * (v - sl.price(b.y()));
    if (d > 0) b.add(s, Mark::XBS, gap);
    else b.add(s, Mark::XSB, -gap);
  };
  auto runaway = [&] { return b.events() > params.max_events; };

  // Piecewise-deterministic phase: thinning against a segment majorant.
  while (t < t_freeze && !runaway()) {
    const Lattice y = b.y();
    const bool buy = q.buy_region(n, y);
    const int d = buy ? 1 : -1;
    double seg_end = std::min(t + std::min(0.05, 0.25 * (1.0 - t)), t_freeze);
    double bound = thinning_majorant(kernel, n, y, t, seg_end);
    bool moved = false;
    while (!moved && !runaway()) {
      const double rate = 2.0 * beta + bound;
      const double s = t + exponential(rng, rate);
      if (s >= seg_end) {
        t = seg_end;
        break;
      }
      const double u = uniform01(rng) * rate;
      if (u < beta) {
        noise_with(s, d);
        moved = true;
      } else if (u < 2.0 * beta) {
        const KernelSlice sl = kernel.at(s);
        const double c = cancel_probability(insider_intensities(sl, q, n, y), buy, beta);
        if (uniform01(rng) < c) {
          insider_cancel(s, d, sl);
        } else {
          noise_against(s, d);
          moved = true;
        }
      } else {
        const KernelSlice sl = kernel.at(s);
        const double theta = active_rate(insider_intensities(sl, q, n, y), buy);
        if (theta > bound) {
          // Majorant violated: discard the proposal and refine the segment.
          ++b.record().majorant_violations;
          if (seg_end - t > 1e-6) {
            seg_end = t + 0.5 * (seg_end - t);
            bound = thinning_majorant(kernel, n, y, t, seg_end);
          }
          bound = std::max(bound, 1.25 * theta);
          continue;
        }
        if (uniform01(rng) * bound < theta) {
          insider_move(s, d, sl);
          moved = true;
        }
      }
      t = s;
    }
  }

  // Final sliver: intensities frozen at t_freeze, exact constant-rate race.
  while (t < 1.0 && !runaway()) {
    const Lattice y = b.y();
    const bool buy = q.buy_region(n, y);
    const int d = buy ? 1 : -1;
    const Intensities th = insider_intensities(kernel.at(t_freeze), q, n, y);
    const double theta = active_rate(th, buy);
    const double rate = 2.0 * beta + theta;
    const double s = t + exponential(rng, rate);
    if (s >= 1.0) break;
    const double u = uniform01(rng) * rate;
    if (u < beta) {
      noise_with(s, d);
    } else if (u < 2.0 * beta) {
      if (uniform01(rng) < cancel_probability(th, buy, beta)) insider_cancel(s, d, kernel.at(s));
      else noise_against(s, d);
    } else {
      insider_move(s, d, kernel.at(s));
    }
    t = s;
  }

  PathRecord rec = b.finish();
  if (rec.events.size() > params.max_events) rec.status = PathStatus::runaway;
  else if (!q.contains(n, rec.y_terminal)) rec.status = PathStatus::terminal_miss;
  return rec;
}

int draw_bin(const Quantization& q, Engine& rng) {
  const double u = uniform01(rng);
  double cum = 0.0;
  for (std::size_t n = 0; n + 1 < q.bins(); ++n) {
    cum += q.bin_probs[n];
    if (u < cum) return static_cast<int>(n + 1);
  }
  return static_cast<int>(q.bins());
}

}  // namespace

const char* mark_name(Mark mark) noexcept {
  switch (mark) {
    case Mark::ZB: return "ZB";
    case Mark::ZS: return "ZS";
    case Mark::XBB: return "XBB";
    case Mark::XBS: return "XBS";
    case Mark::XSS: return "XSS";
    case Mark::XSB: return "XSB";
  }
  return "?";
}

int mark_move(Mark mark) noexcept {
  switch (mark) {
    case Mark::ZB:
    case Mark::XBB: return 1;
    case Mark::ZS:
    case Mark::XSS: return -1;
    default: return 0;
  }
}

const char* path_status_name(PathStatus status) noexcept {
  switch (status) {
    case PathStatus::ok: return "ok";
    case PathStatus::terminal_miss: return "terminal_miss";
    case PathStatus::runaway: return "runaway";
  }
  return "?";
}

double PathRecord::occupation_at(Lattice level) const noexcept {
  const auto it = std::lower_bound(occupation.begin(), occupation.end(), level,
                                   [](const auto& e, Lattice l) { return e.first < l; });
  return (it != occupation.end() && it->first == level) ? it->second : 0.0;
}

Lattice PathRecord::y_at(double t) const noexcept {
  Lattice y = 0;
  for (const Event& e : events) {
    if (e.time > t) break;
    y += mark_move(e.mark);
  }
  return y;
}

std::size_t PathRecord::count(Mark mark) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.mark == mark; }));
}

void MarketParams::validate() const {
  if (!kernel) throw Error(ErrorKind::invalid_argument, "market parameters need a kernel");
  if (!(end_epsilon > 0.0 && end_epsilon <= 0.01))
    throw Error(ErrorKind::invalid_argument, "end_epsilon must lie in (0, 0.01]");
  if (max_events < 10000) throw Error(ErrorKind::invalid_argument, "max_events must be >= 1e4");
}

namespace {

// Intensities from h_n at y - 1, y, y + 1.
Intensities intensities_from(const Quantization& q, int n, Lattice y,
                             const std::array<double, 3>& h) {
  Intensities th;
  if (q.bins() == 1) return th;
  if (!(h[1] > 0.0))
    throw Error(ErrorKind::stranded_path, "h_n(y, t) underflowed: path numerically stranded");
  const double beta = q.beta;
  if (q.buy_region(n, y)) {
    if (y != q.floor_mid(n)) th.buy_buy = beta * std::max(h[2] / h[1] - 1.0, 0.0);
    th.buy_sell = beta * std::max(1.0 - h[0] / h[1], 0.0);
  } else {
    if (y != q.ceil_mid(n)) th.sell_sell = beta * std::max(h[0] / h[1] - 1.0, 0.0);
    th.sell_buy = beta * std::max(1.0 - h[2] / h[1], 0.0);
  }
  return th;
}

}  // namespace

Intensities insider_intensities(const KernelSlice& slice, const Quantization& q, int n,
                                Lattice y) {
  q.check_bin(n);
  if (!(slice.t() < 1.0)) throw Error(ErrorKind::invalid_argument, "intensities need t < 1");
  if (q.bins() == 1) return {};
  return intensities_from(q, n, y, slice.h_neighbours(n, y));
}

Intensities insider_intensities(const PricingKernel& kernel, int n, Lattice y, double t) {
  return insider_intensities(kernel.at(t), kernel.quantization(), n, y);
}

double thinning_majorant(const PricingKernel& kernel, int n, Lattice y, double t_lo,
                         double t_hi) {
  const Quantization& q = kernel.quantization();
  q.check_bin(n);
  if (q.bins() == 1) return 0.0;
  const bool buy = q.buy_region(n, y);
  const auto& grid = kernel.time_grid();
  double m = 0.0;
  for (int k = 0; k <= 8; ++k) {
    // Each sample is read off the nearest grid node at or after it (or the
    // one before, if that node lies past t_hi), where h needs no propagation.
    const double t = t_lo + (t_hi - t_lo) * k / 8.0;
    auto i = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
    if ((grid[i] > t_hi || grid[i] >= 1.0) && i > 0) --i;
    const std::array<double, 3> h{kernel.node_h(i, n, y - 1), kernel.node_h(i, n, y),
                                  kernel.node_h(i, n, y + 1)};
    if (!(h[1] > 0.0)) continue;
    m = std::max(m, active_rate(intensities_from(q, n, y, h), buy));
  }
  return 1.25 * m;
}

PathRecord simulate_conditioned(const MarketParams& params, int n, std::uint64_t path_index) {
  params.quantization().check_bin(n);
  Engine rng = params.rng.stream_for(path_index);
  return walk_path(params, n, rng, true);
}

PathRecord simulate_unconditioned(const MarketParams& params, std::uint64_t path_index) {
  Engine rng = params.rng.stream_for(path_index);
  return walk_path(params, 0, rng, false);
}

PathRecord simulate_constructive(const MarketParams& params, int n, std::uint64_t path_index) {
  params.validate();
  params.quantization().check_bin(n);
  Engine rng = params.rng.stream_for(path_index);
  return constructive_path(params, n, rng);
}

PathRecord simulate_constructive_mixture(const MarketParams& params, std::uint64_t path_index) {
  params.validate();
  Engine rng = params.rng.stream_for(path_index);
  const int n = draw_bin(params.quantization(), rng);
  return constructive_path(params, n, rng);
}

}  // namespace gm_bridge
