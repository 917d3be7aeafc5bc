// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Every tolerance, sample size and seed is pinned below.

#include <algorithm>
#include <array>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "gm_bridge/convergence.hpp"
#include "gm_bridge/kyle.hpp"
#include "gm_bridge/parallel.hpp"
#include "gm_bridge/profit.hpp"
#include "gm_bridge/quantizer.hpp"
#include "gm_bridge/simulator.hpp"
#include "gm_bridge/skellam.hpp"
#include "gm_bridge/stats.hpp"
#include "oracles.hpp"

using namespace gm_bridge;

namespace {

constexpr std::uint64_t kSeed = 20240611;
const std::vector<double> kDeltaGrid{0.4, 0.2, 0.1, 0.05};
constexpr double kKylePaper = 0.512;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::shared_ptr<const PricingKernel> kernel_at(double delta) {
  return std::make_shared<const PricingKernel>(quantize(example_distribution(), delta));
}

MarketParams params_at(double delta, std::uint64_t tag) {
  MarketParams p;
  p.kernel = kernel_at(delta);
  p.rng = RngPolicy(kSeed).substream(tag);
  return p;
}

// 1. Skellam pmf against the double-Poisson convolution.
Outcome skellam_accuracy() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_small = 0.0, worst_large = 0.0;
  for (double mu : {1e-3, 0.1, 1.0, 5.0, 20.0, 50.0, 200.0, 1000.0, 1e4}) {
    const double tol = mu <= 50.0 ? 1e-12 : 1e-9;
    double& worst = mu <= 50.0 ? worst_small : worst_large;
    for (std::int64_t k = -200; k <= 200; ++k) {
      const double ref = oracle::skellam_pmf(k, mu), got = skellam_pmf(k, mu);
      // Below DBL_MIN relative accuracy is not representable in binary64.
      const double err = ref < DBL_MIN ? std::abs(got - ref) / DBL_MIN
                                       : std::abs(got - ref) / ref;
      worst = std::max(worst, err / tol);
    }
  }
  const double secs = seconds_since(t0);
  return {worst_small <= 1.0 && worst_large <= 1.0 && secs < 10.0,
          fmt("max err/tol %.3g (mu<=50, tol 1e-12), %.3g (mu<=1e4, tol 1e-9); %.2f s",
              worst_small, worst_large, secs)};
}

// Relative residual of d/dt f + beta (f(y+1) - 2 f(y) + f(y-1)). The step
// shrinks with 1 - t and with the lattice distance to the bins, where the
// time derivatives of the tails grow. Skellam rows are cut at about 12 sd
// (mass there ~1e-60), so values below kHeatFloor are compared absolutely.
constexpr double kHeatFloor = 1e-30;

double heat_residual(const std::function<double(Lattice, double)>& f, Lattice y, double t,
                     double beta, Lattice centre, std::size_t& floored) {
  const double tau = 1e-4 * (1.0 - t) / (5.0 + static_cast<double>(std::abs(y - centre)));
  const double ut = (f(y, t + tau) - f(y, t - tau)) / (2 * tau);
  const double a = f(y + 1, t), b = f(y, t), c = f(y - 1, t);
  const double scale = std::abs(ut) + beta * (std::abs(a) + 2 * std::abs(b) + std::abs(c));
  if (scale < beta * kHeatFloor) ++floored;
  return std::abs(ut + beta * (a - 2 * b + c)) / (scale + beta * kHeatFloor);
}

// 2. Heat equation for h_n and p on a 200 x 200 grid at delta = 0.5.
Outcome heat_equation() {
  const auto k = kernel_at(0.5);
  const Quantization& q = k->quantization();
  const Lattice centre = (q.edges[1] + q.edges[2]) / 2;
  const double beta = q.beta;
  std::vector<double> times(200);
  for (int j = 0; j < 200; ++j) times[j] = (j + 1) / 201.0;
  const auto per_t = map_indexed(times.size(), 0, [&](std::size_t j) {
    const double t = times[j];
    double w = 0.0;
    std::size_t floored = 0;
    for (Lattice y = centre - 100; y < centre + 100; ++y) {
      for (int n = 1; n <= 3; ++n)
        w = std::max(w, heat_residual([&](Lattice z, double s) { return k->h(n, z, s); }, y, t,
                                      beta, centre, floored));
      w = std::max(w, heat_residual([&](Lattice z, double s) { return k->price(z, s); }, y, t,
                                    beta, centre, floored));
    }
    return std::pair{w, floored};
  });
  double worst = 0.0;
  std::size_t floored = 0;
  for (const auto& [w, f] : per_t) worst = std::max(worst, w), floored += f;
  return {worst < 1e-4, fmt("max relative residual %.3g (tol 1e-4, absolute floor %.0e); "
                            "%zu of 160000 evaluations below the floor",
                            worst, kHeatFloor, floored)};
}

// 3. The five equations for U on [a_2 - 10 delta, a_3 + 10 delta], delta = 0.5.
Outcome lemma_residuals() {
  const auto k = kernel_at(0.5);
  const Quantization& q = k->quantization();
  const double beta = q.beta, delta = q.delta, tau = 1e-6;
  // U and p near v_N carry ~1e-16 absolute rounding; this floor keeps
  // relative residuals of vanishing terms meaningful.
  const double floor = 1e-10 * delta * q.dist.values.back();
  double worst_gen = 0.0, worst_first = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const double v = q.value(n);
    auto U = [&](Lattice y, double t) { return u_of(*k, n, y, t); };
    for (double t : {0.05, 0.25, 0.5, 0.75, 0.9, 0.99})
      for (Lattice y = q.edges[1] - 10; y <= q.edges[2] + 10; ++y) {
        const double ut = (U(y, t + tau) - U(y, t - tau)) / (2 * tau);
        const double a = U(y + 1, t), b = U(y, t), c = U(y - 1, t);
        double source = 0.0;
        if (q.interior(n) && y == q.ceil_mid(n))
          source = delta * beta * (k->price(q.floor_mid(n), t) - v);
        if (q.interior(n) && y == q.floor_mid(n))
          source = delta * beta * (v - k->price(q.ceil_mid(n), t));
        const double gen_scale =
            std::abs(ut) + beta * (std::abs(a) + 2 * std::abs(b) + std::abs(c)) +
            std::abs(source) + beta * floor;
        worst_gen = std::max(worst_gen,
                             std::abs(ut + beta * (a - 2 * b + c) - source) / gen_scale);
        const double gap = delta * (v - k->price(y, t));
        const double first = q.buy_region(n, y) ? b - c + gap : b - a - gap;
        worst_first = std::max(worst_first, std::abs(first) / (std::abs(a) + std::abs(b) +
                                                               std::abs(c) + std::abs(gap) +
                                                               floor));
      }
  }
  return {worst_gen < 1e-3 && worst_first < 1e-3,
          fmt("max relative residual: generator %.3g, first-order %.3g (tol 1e-3)", worst_gen,
              worst_first)};
}

// 4. E[p(Y_t, t)] = p(0, 0) for the unconditioned walk.
Outcome rational_pricing() {
  const auto t0 = std::chrono::steady_clock::now();
  const MarketParams p = params_at(0.2, 4);
  const std::vector<double> times{0.25, 0.5, 0.75};
  std::vector<KernelSlice> slices;
  for (double t : times) slices.push_back(p.kernel->at(t));
  const std::size_t paths = 100000;
  const auto prices = map_indexed(paths, 0, [&](std::size_t i) {
    const PathRecord r = simulate_unconditioned(p, i);
    std::array<double, 3> out{};
    for (std::size_t j = 0; j < times.size(); ++j) out[j] = slices[j].price(r.y_at(times[j]));
    return out;
  });
  const double p00 = p.kernel->price(0, 0.0);
  bool ok = true;
  std::string detail = fmt("p(0,0)=%.6f;", p00);
  for (std::size_t j = 0; j < times.size(); ++j) {
    RunningStats s;
    for (const auto& row : prices) s.add(row[j]);
    const double z = (s.mean() - p00) / s.standard_error();
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt(" t=%.2f mean %.6f (z=%.2f);", times[j], s.mean(), z);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 120.0;
  return {ok, detail + fmt(" %.1f s (tol 3 SE, < 120 s)", secs)};
}

// Mode (b) mixture paths shared by criteria 5 and 6.
const std::vector<PathRecord>& mixture_paths() {
  static const std::vector<PathRecord> paths = [] {
    const MarketParams p = params_at(0.2, 5);
    return map_indexed(10000, 0, [&](std::size_t i) { return simulate_constructive_mixture(p, i); });
  }();
  return paths;
}

// 5. Up-jumps of the total demand are Poisson(beta) over the mixture.
Outcome inconspicuous_trade() {
  const MarketParams p = params_at(0.2, 5);
  const double beta = p.quantization().beta;
  std::vector<double> observed;
  for (const PathRecord& r : mixture_paths()) {
    // Cancelled noise buys are recorded as XSB and never move the demand.
    const std::size_t up = r.count(Mark::ZB) + r.count(Mark::XBB);
    if (up >= observed.size()) observed.resize(up + 1, 0.0);
    observed[up] += 1.0;
  }
  std::vector<double> probs(observed.size());
  for (std::size_t k = 0; k < probs.size(); ++k)
    probs[k] = oracle::poisson_pmf(static_cast<std::int64_t>(k), beta);
  const ChiSquareResult chi = chi_square_gof(observed, probs);
  return {chi.p_value > 0.01, fmt("chi2 %.2f on %.0f dof, p = %.4f (need > 0.01), 10000 paths",
                                  chi.statistic, chi.dof, chi.p_value)};
}

// 6. Mode (b) paths end in their assigned bin.
Outcome bridge_property() {
  const MarketParams p = params_at(0.2, 5);
  const Quantization& q = p.quantization();
  const auto& paths = mixture_paths();
  std::array<std::size_t, 4> total{}, missed{};
  std::size_t runaways = 0;
  for (const PathRecord& r : paths) {
    ++total[r.bin];
    if (!q.contains(r.bin, r.y_terminal)) ++missed[r.bin];
    if (r.status == PathStatus::runaway) ++runaways;
  }
  const std::size_t misses = missed[1] + missed[2] + missed[3];
  const double hit = 1.0 - static_cast<double>(misses) / paths.size();
  return {hit >= 0.99, fmt("hit rate %.4f (need >= 0.99); misses by bin %zu/%zu, %zu/%zu, "
                           "%zu/%zu; runaways %zu",
                           hit, missed[1], total[1], missed[2], total[2], missed[3], total[3],
                           runaways)};
}

// 7. Modes (a) and (b) agree on Y_1 and on the ceil-mid occupation, bin 2.
Outcome mode_equivalence() {
  const MarketParams pa = params_at(0.2, 7), pb = params_at(0.2, 8);
  const Quantization& q = pa.quantization();
  const Lattice level = q.ceil_mid(2);
  const std::size_t paths = 10000;
  auto sample = [&](bool constructive) {
    return map_indexed(paths, 0, [&](std::size_t i) {
      const PathRecord r = constructive ? simulate_constructive(pb, 2, i)
                                        : simulate_conditioned(pa, 2, i);
      return std::pair{static_cast<double>(r.y_terminal), r.occupation_at(level)};
    });
  };
  const auto a = sample(false), b = sample(true);
  std::vector<double> ya, yb, oa, ob;
  for (const auto& [y, o] : a) ya.push_back(y), oa.push_back(o);
  for (const auto& [y, o] : b) yb.push_back(y), ob.push_back(o);
  const KsResult ky = ks_two_sample(ya, yb), ko = ks_two_sample(oa, ob);
  const double crit = ks_critical_value(paths, paths, 0.01);
  return {ky.statistic < crit && ko.statistic < crit,
          fmt("KS Y_1 %.4f, KS occupation %.4f (1%% critical %.4f)", ky.statistic, ko.statistic,
              crit)};
}

// 8. Realised mode (b) profit equals U(v_n, 0, 0) - L per bin.
Outcome profit_identity() {
  const MarketParams p = params_at(0.2, 9);
  bool ok = true;
  std::string detail;
  for (int n = 1; n <= 3; ++n) {
    const ProfitSummary s = run_loss_bound(p, n, {100000, true, 0});
    const double target = s.u0 - s.l_hat.mean;
    const double se = std::hypot(s.realized.se, s.l_hat.se);
    const double z = se > 0.0 ? (s.realized.mean - target) / se : 0.0;
    ok = ok && std::abs(s.realized.mean - target) <= 3.0 * se + 1e-15;
    detail += fmt("bin %d realized %.5f vs %.5f (z=%.2f, runaways %zu); ", n, s.realized.mean,
                  target, z, s.runaways);
  }
  return {ok, detail + "tol 3 combined SE, 1e5 paths per bin"};
}

// 9. Kyle equilibrium profit of the example.
Outcome kyle_profit() {
  const auto t0 = std::chrono::steady_clock::now();
  const GaussianKernel g(example_distribution());
  KyleParams kp;
  kp.dt = 1e-4;
  const auto rows = run_kyle(g, kp, 100000, RngPolicy(kSeed).substream(stream_tag::kyle));
  const KyleSummary& mix = rows.back();
  const double closed = oracle::kyle_profit_closed_form({1, 2, 3}, {0.55, 0.35, 0.1});
  const double secs = seconds_since(t0);
  return {std::abs(mix.profit.mean - kKylePaper) <= 0.01 && secs < 600.0,
          fmt("MC profit %.4f +- %.4f, hit rate %.4f; target %.3f +- 0.01; closed-form "
              "E[p(Y_1,1) Y_1] = %.4f; %.0f s",
              mix.profit.mean, mix.profit.se, mix.hit_rate, kKylePaper, closed, secs)};
}

// 10. Mixture loss bound decreasing over the delta grid and small at 0.05.
Outcome figure1() {
  SuiteOptions opts;
  opts.paths = 20000;
  opts.seed = kSeed + 10;
  const auto rows = loss_convergence(example_distribution(), kDeltaGrid, opts);
  std::vector<Estimate> mix;
  for (const LossRow& r : rows)
    if (r.bin == 0) mix.push_back(r.mixture_bound);
  bool ok = mix.size() == kDeltaGrid.size();
  std::string detail;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    detail += fmt("d=%.2f %.5f+-%.5f; ", kDeltaGrid[i], mix[i].mean, mix[i].se);
    if (i > 0) ok = ok && mix[i].mean < mix[i - 1].mean + std::hypot(mix[i].se, mix[i - 1].se);
  }
  const double cap = 0.05 * kKylePaper;
  ok = ok && !mix.empty() && mix.back().mean < cap;
  return {ok, detail + fmt("final < %.4f, 1 SE slack", cap)};
}

// 11. 2 E[occupation at 0] = E|Y_1| at every delta; limit sqrt(2/pi)/2.
Outcome local_time() {
  SuiteOptions opts;
  opts.paths = 100000;
  opts.seed = kSeed + 11;
  const auto rows = occupation_convergence(example_distribution(), kDeltaGrid, 2, 1.0, opts);
  const double limit = std::sqrt(2.0 / std::numbers::pi) / 2;
  bool ok = true;
  std::string detail;
  double last = NAN;
  for (const OccupationRow& r : rows) {
    if (r.level_kind != "zero") continue;
    const Estimate& g = r.identity_gap;
    ok = ok && std::abs(g.mean) <= 3.0 * g.se;
    detail += fmt("d=%.2f gap %.2e+-%.1e occ %.4f; ", r.delta, g.mean, g.se, r.occupation.mean);
    if (r.delta == kDeltaGrid.back()) last = r.occupation.mean;
  }
  const double rel = std::abs(last - limit) / limit;
  ok = ok && rel <= 0.05;
  return {ok, detail + fmt("limit %.4f, rel err %.3f (tol 0.05)", limit, rel)};
}

// 12. Quantizer boundaries and probabilities approach the Gaussian limit.
Outcome quantizer_convergence() {
  const AssetDistribution dist = example_distribution();
  const auto a0 = gaussian_boundaries(dist);
  std::vector<double> ea, ep;
  for (double delta : kDeltaGrid) {
    const Quantization q = quantize(dist, delta);
    double wa = 0.0, wp = 0.0;
    for (int n = 2; n <= 3; ++n)
      wa = std::max(wa, std::abs(static_cast<double>(q.lower_edge(n)) * delta - a0[n - 1]));
    for (int n = 1; n <= 3; ++n)
      wp = std::max(wp, std::abs(q.bin_probs[n - 1] - dist.probs[n - 1]));
    ea.push_back(wa);
    ep.push_back(wp);
  }
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < ea.size(); ++i) {
    detail += fmt("d=%.2f |da| %.4f |dp| %.4f; ", kDeltaGrid[i], ea[i], ep[i]);
    if (i > 0) ok = ok && ea[i] < ea[i - 1] && ep[i] < ep[i - 1];
  }
  return {ok, detail + "strictly decreasing required"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Skellam pmf accuracy", skellam_accuracy},
      {"heat equation residuals", heat_equation},
      {"U equation residuals", lemma_residuals},
      {"rational pricing", rational_pricing},
      {"inconspicuous trade", inconspicuous_trade},
      {"bridge property", bridge_property},
      {"mode equivalence", mode_equivalence},
      {"profit identity", profit_identity},
      {"Kyle profit", kyle_profit},
      {"Figure-1 loss bound", figure1},
      {"local-time convergence", local_time},
      {"quantizer convergence", quantizer_convergence},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
