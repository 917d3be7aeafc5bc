#include "gm_bridge/profit.hpp"

#include <cmath>

#include "gm_bridge/errors.hpp"
#include "gm_bridge/parallel.hpp"

namespace gm_bridge {

double u_terminal(const Quantization& q, int n, Lattice y) {
  q.check_bin(n);
  const double v = q.value(n);
  CompensatedSum acc;
  if (q.buy_region(n, y)) {
    // Buying at the terminal ask P(j + 1) from y up to the bin.
    for (Lattice j = y; j <= q.lower_edge(n) - 1; ++j) acc.add(v - q.terminal_price(j + 1));
  } else {
    // Selling at the terminal bid P(j - 1) from y down to the bin.
    for (Lattice j = q.upper_edge(n); j <= y; ++j) acc.add(q.terminal_price(j - 1) - v);
  }
  return q.delta * acc.value();
}

double u_of(const PricingKernel& kernel, int n, Lattice y, double t) {
  const Quantization& q = kernel.quantization();
  q.check_bin(n);
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::invalid_argument, "time outside [0, 1]");
  const double terminal = u_terminal(q, n, y);
  if (t == 1.0 || q.bins() == 1) return terminal;
  // delta beta * int_t^1 (p(y', r) - p(y' - 1, r)) dr is a sum of Skellam
  // occupation integrals over the price jumps.
  const SkellamTable table(q.beta * (1.0 - t));
  const Lattice shift = q.buy_region(n, y) ? 1 : 0;
  double acc = 0.0;
  for (std::size_t m = 1; m < q.bins(); ++m) {
    const double jump = q.dist.values[m] - q.dist.values[m - 1];
    acc += jump * table.occupation(q.edges[m] - shift - y);
  }
  return terminal + q.delta * acc;
}

double us_gap(const PricingKernel& kernel, int n) {
  const Quantization& q = kernel.quantization();
  q.check_bin(n);
  if (!(0 <= q.floor_mid(n))) return 0.0;
  return q.delta * (q.value(n) - kernel.price(0, 0.0));
}

double l_path_value(const PricingKernel& kernel, int n, const PathRecord& path) {
  const Quantization& q = kernel.quantization();
  q.check_bin(n);
  if (!q.interior(n)) return 0.0;
  const Lattice lo = q.floor_mid(n), hi = q.ceil_mid(n);
  const double v = q.value(n);
  const double scale = q.delta * q.beta;
  double acc = 0.0;
  auto interval = [&](Lattice y, double a, double b) {
    if (b <= a) return;
    if (y == hi) acc += v * (b - a) - kernel.price_integral(lo, a, b);
    else if (y == lo) acc -= v * (b - a) - kernel.price_integral(hi, a, b);
  };
  Lattice y = 0;
  double since = 0.0;
  for (const Event& e : path.events) {
    const int move = mark_move(e.mark);
    if (move == 0) continue;
    interval(y, since, e.time);
    y += move;
    since = e.time;
  }
  interval(y, since, 1.0);
  return scale * acc;
}

Estimate l_estimate(const PricingKernel& kernel, int n, const std::vector<PathRecord>& paths) {
  const Quantization& q = kernel.quantization();
  q.check_bin(n);
  if (!q.interior(n)) return {0.0, 0.0, paths.size()};
  RunningStats s;
  for (const PathRecord& p : paths) {
    if (p.bin != n) throw Error(ErrorKind::invalid_argument, "path conditioned on another bin");
    s.add(l_path_value(kernel, n, p));
  }
  return s.estimate();
}

ProfitSummary loss_bound(const PricingKernel& kernel, int n, const Estimate& l_hat,
                         const Estimate& realized) {
  ProfitSummary s;
  s.delta = kernel.delta();
  s.bin = n;
  s.u0 = u_of(kernel, n, 0, 0.0);
  s.us_gap = us_gap(kernel, n);
  s.l_hat = l_hat;
  s.realized = realized;
  s.loss_bound = s.us_gap + l_hat.mean;
  s.loss_bound_se = l_hat.se;
  s.paths = l_hat.count;
  return s;
}

ProfitSummary run_loss_bound(const MarketParams& params, int n, const LossBoundOptions& opts) {
  params.validate();
  const PricingKernel& kernel = *params.kernel;
  const Quantization& q = kernel.quantization();
  q.check_bin(n);
  const auto bin_tag = static_cast<std::uint64_t>(n);

  Estimate l_hat{0.0, 0.0, opts.paths};
  if (q.interior(n)) {
    MarketParams pa = params;
    pa.rng = params.rng.substream(stream_tag::conditioned).substream(bin_tag);
    const auto values = map_indexed(opts.paths, opts.workers, [&](std::size_t i) {
      return l_path_value(kernel, n, simulate_conditioned(pa, n, i));
    });
    l_hat = estimate_of(values);
  }

  Estimate realized;
  std::size_t misses = 0, runaways = 0;
  if (opts.realized) {
    MarketParams pb = params;
    pb.rng = params.rng.substream(stream_tag::constructive).substream(bin_tag);
    struct Outcome {
      double profit = 0.0;
      PathStatus status = PathStatus::ok;
    };
    const auto outcomes = map_indexed(opts.paths, opts.workers, [&](std::size_t i) {
      const PathRecord rec = simulate_constructive(pb, n, i);
      return Outcome{rec.realized_profit, rec.status};
    });
    RunningStats s;
    for (const Outcome& o : outcomes) {
      if (o.status == PathStatus::runaway) {
        ++runaways;
        continue;
      }
      if (o.status == PathStatus::terminal_miss) ++misses;
      s.add(o.profit);
    }
    realized = s.estimate();
  }

  ProfitSummary summary = loss_bound(kernel, n, l_hat, realized);
  summary.paths = opts.paths;
  summary.terminal_misses = misses;
  summary.runaways = runaways;
  return summary;
}

Estimate mixture_bound(const Quantization& q, const std::vector<ProfitSummary>& per_bin) {
  double mean = 0.0, var = 0.0;
  std::size_t count = 0;
  for (const ProfitSummary& s : per_bin) {
    q.check_bin(s.bin);
    const double w = q.bin_probs[static_cast<std::size_t>(s.bin - 1)];
    mean += w * s.loss_bound;
    var += w * w * s.loss_bound_se * s.loss_bound_se;
    count += s.paths;
  }
  return {mean, std::sqrt(var), count};
}

}  // namespace gm_bridge
