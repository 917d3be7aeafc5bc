#include "gm_bridge/convergence.hpp"

#include <cmath>
#include <memory>

#include "gm_bridge/errors.hpp"
#include "gm_bridge/kyle.hpp"
#include "gm_bridge/parallel.hpp"
#include "gm_bridge/profit.hpp"
#include "gm_bridge/simulator.hpp"

namespace gm_bridge {

namespace {

MarketParams make_params(const AssetDistribution& dist, double delta, const SuiteOptions& opts) {
  MarketParams p;
  p.kernel = std::make_shared<const PricingKernel>(quantize(dist, delta));
  p.end_epsilon = opts.end_epsilon;
  p.max_events = opts.max_events;
  p.rng = RngPolicy(opts.seed);
  p.validate();
  return p;
}

// Time spent at `level` on [0, t].
double occupation_until(const PathRecord& path, Lattice level, double t) {
  Lattice y = 0;
  double since = 0.0, acc = 0.0;
  for (const Event& e : path.events) {
    if (e.time > t) break;
    const int move = mark_move(e.mark);
    if (move == 0) continue;
    if (y == level) acc += e.time - since;
    y += move;
    since = e.time;
  }
  if (y == level) acc += t - since;
  return acc;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorKind::invalid_argument, "delta grid is empty");
  for (double d : grid)
    if (!(d > 0.0)) throw Error(ErrorKind::invalid_argument, "delta grid entries must be > 0");
}

}  // namespace

std::vector<OccupationRow> occupation_convergence(const AssetDistribution& dist,
                                                  const std::vector<double>& delta_grid,
                                                  int n, double t, const SuiteOptions& opts) {
  check_grid(delta_grid);
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::invalid_argument, "time outside [0, 1]");
  const GaussianKernel gauss(dist);
  std::vector<OccupationRow> rows;
  for (double delta : delta_grid) {
    MarketParams params = make_params(dist, delta, opts);
    params.rng = params.rng.substream(stream_tag::unconditioned);
    const Quantization& q = params.quantization();
    q.check_bin(n);
    const bool mids = q.interior(n);
    const double scale = 1.0 / (2.0 * delta);
    struct Sample {
      double zero, abs_y, lo, hi;
    };
    const auto samples = map_indexed(opts.paths, opts.workers, [&](std::size_t i) {
      const PathRecord p = simulate_unconditioned(params, i);
      Sample s{};
      s.zero = scale * occupation_until(p, 0, t);
      s.abs_y = delta * static_cast<double>(std::llabs(p.y_at(t)));
      if (mids) {
        s.lo = scale * occupation_until(p, q.floor_mid(n), t);
        s.hi = scale * occupation_until(p, q.ceil_mid(n), t);
      }
      return s;
    });
    RunningStats zero, abs_y, gap, lo, hi;
    for (const Sample& s : samples) {
      zero.add(s.zero);
      abs_y.add(s.abs_y);
      gap.add(2.0 * s.zero - s.abs_y);
      lo.add(s.lo);
      hi.add(s.hi);
    }
    OccupationRow row;
    row.delta = delta;
    row.t = t;
    row.level_kind = "zero";
    row.occupation = zero.estimate();
    row.abs_demand = abs_y.estimate();
    row.identity_gap = gap.estimate();
    row.brownian = brownian_local_time_mean(0.0, t);
    rows.push_back(row);
    if (mids) {
      const auto& a = gauss.boundaries();
      const double m0 = 0.5 * (a[static_cast<std::size_t>(n - 1)] + a[static_cast<std::size_t>(n)]);
      for (auto [kind, level, stats] :
           {std::tuple{"floor_mid", q.floor_mid(n), &lo}, std::tuple{"ceil_mid", q.ceil_mid(n), &hi}}) {
        OccupationRow r;
        r.delta = delta;
        r.t = t;
        r.level_kind = kind;
        r.level = delta * static_cast<double>(level);
        r.occupation = stats->estimate();
        r.brownian = brownian_local_time_mean(m0, t);
        rows.push_back(r);
      }
    }
  }
  return rows;
}

std::vector<LossRow> loss_convergence(const AssetDistribution& dist,
                                      const std::vector<double>& delta_grid,
                                      const SuiteOptions& opts) {
  check_grid(delta_grid);
  std::vector<LossRow> rows;
  for (double delta : delta_grid) {
    const MarketParams params = make_params(dist, delta, opts);
    const Quantization& q = params.quantization();
    std::vector<ProfitSummary> per_bin;
    LossBoundOptions lo;
    lo.paths = opts.paths;
    lo.workers = opts.workers;
    for (int n = 1; n <= static_cast<int>(q.bins()); ++n)
      per_bin.push_back(run_loss_bound(params, n, lo));
    const Estimate mix = mixture_bound(q, per_bin);
    for (const ProfitSummary& s : per_bin)
      rows.push_back({delta, s.bin, {s.loss_bound, s.loss_bound_se, s.paths}, mix});
    rows.push_back({delta, 0, mix, mix});
  }
  return rows;
}

std::vector<KsRow> strategy_convergence(const AssetDistribution& dist,
                                        const std::vector<double>& delta_grid, int n,
                                        const std::vector<double>& time_grid,
                                        const SuiteOptions& opts) {
  check_grid(delta_grid);
  const GaussianKernel gauss(dist);
  if (n < 1 || n > static_cast<int>(gauss.bins()))
    throw Error(ErrorKind::invalid_argument, "bin outside range");
  KyleParams kp;
  kp.dt = opts.kyle_dt;
  kp.end_epsilon = opts.end_epsilon;
  const RngPolicy kyle_rng = RngPolicy(opts.seed).substream(stream_tag::kyle).substream(
      static_cast<std::uint64_t>(n));
  const auto limit = map_indexed(opts.paths, opts.workers, [&](std::size_t i) {
    RngPolicy::Engine eng = kyle_rng.stream_for(i);
    const KylePath p = simulate_kyle(gauss, n, kp, eng);
    std::vector<double> marginals;
    const double last = static_cast<double>(p.trajectory.size() - 1);
    for (double t : time_grid)
      marginals.push_back(p.trajectory[static_cast<std::size_t>(std::llround(t * last))]);
    return marginals;
  });

  std::vector<KsRow> rows;
  for (double delta : delta_grid) {
    MarketParams params = make_params(dist, delta, opts);
    params.rng = params.rng.substream(stream_tag::conditioned).substream(
        static_cast<std::uint64_t>(n));
    const auto walk = map_indexed(opts.paths, opts.workers, [&](std::size_t i) {
      const PathRecord p = simulate_conditioned(params, n, i);
      std::vector<double> marginals;
      for (double t : time_grid) marginals.push_back(delta * static_cast<double>(p.y_at(t)));
      return marginals;
    });
    for (std::size_t k = 0; k < time_grid.size(); ++k) {
      std::vector<double> a, b;
      a.reserve(walk.size());
      b.reserve(limit.size());
      for (const auto& m : walk) a.push_back(m[k]);
      for (const auto& m : limit) b.push_back(m[k]);
      const KsResult ks = ks_two_sample(std::move(a), std::move(b));
      rows.push_back({delta, n, time_grid[k], ks.statistic, ks.p_value,
                      ks_critical_value(ks.n, ks.m, 0.01), opts.paths});
    }
  }
  return rows;
}

}  // namespace gm_bridge
