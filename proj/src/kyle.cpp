#include "gm_bridge/kyle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gm_bridge/errors.hpp"
#include "gm_bridge/gaussian.hpp"
#include "gm_bridge/parallel.hpp"

namespace gm_bridge {

double kyle_drift(const GaussianKernel& kernel, int n, double y, double t) {
  return kernel.log_h_dy(n, y, t);
}

double brownian_local_time_mean(double level, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::invalid_argument, "time outside [0, 1]");
  if (t == 0.0) return 0.0;
  // (E|B_t - m| - |m|) / 2 = E(B_t - |m|)_+.
  const double s = std::sqrt(t);
  const double m = std::abs(level);
  return s * normal_pdf(m / s) - m * normal_sf(m / s);
}

namespace {

// Price and drift at one Euler step, sharing the Gaussian evaluations.
struct StepValues {
  double price;
  double drift;
};

StepValues step_values(const GaussianKernel& kernel, int n, double y, double t,
                       double t_drift) {
  const auto& a = kernel.boundaries();
  const auto& v = kernel.distribution().values;
  const double s = std::sqrt(1.0 - t);
  double price = v.front();
  for (std::size_t m = 1; m < v.size(); ++m) price += (v[m] - v[m - 1]) * normal_sf((a[m] - y) / s);
  return {price, kyle_drift(kernel, n, y, t_drift)};
}

}  // namespace

KylePath simulate_kyle(const GaussianKernel& kernel, int n, const KyleParams& params,
                       RngPolicy::Engine& rng) {
  if (n < 1 || n > static_cast<int>(kernel.bins()))
    throw Error(ErrorKind::invalid_argument, "bin outside range");
  if (!(params.dt > 0.0 && params.dt <= 1e-3))
    throw Error(ErrorKind::invalid_argument, "Kyle time step must lie in (0, 1e-3]");
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / params.dt));
  const double dt = 1.0 / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);
  const double v = kernel.distribution().values[static_cast<std::size_t>(n - 1)];
  const double t_freeze = 1.0 - params.end_epsilon;
  std::normal_distribution<double> gauss;

  KylePath path;
  path.bin = n;
  path.dt = dt;
  path.trajectory.resize(steps + 1);
  double y = 0.0;
  path.trajectory[0] = y;
  CompensatedSum profit;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const StepValues sv = step_values(kernel, n, y, t, std::min(t, t_freeze));
    const double drift = std::clamp(sv.drift, -params.drift_clip, params.drift_clip);
    profit.add((v - sv.price) * drift * dt);
    y += drift * dt + sqrt_dt * gauss(rng);
    path.trajectory[k + 1] = y;
  }
  path.profit = profit.value();
  path.hit = kernel.bin_of(y) == n;
  return path;
}

std::vector<KyleSummary> run_kyle(const GaussianKernel& kernel, const KyleParams& params,
                                  std::size_t paths, const RngPolicy& rng,
                                  std::size_t workers) {
  struct Outcome {
    int bin = 0;
    double profit = 0.0;
    bool hit = false;
  };
  const auto& probs = kernel.distribution().probs;
  const auto outcomes = map_indexed(paths, workers, [&](std::size_t i) {
    RngPolicy::Engine eng = rng.stream_for(i);
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    int n = static_cast<int>(probs.size());
    double cum = 0.0;
    for (std::size_t m = 0; m + 1 < probs.size(); ++m) {
      cum += probs[m];
      if (u < cum) {
        n = static_cast<int>(m + 1);
        break;
      }
    }
    const KylePath p = simulate_kyle(kernel, n, params, eng);
    return Outcome{n, p.profit, p.hit};
  });

  const std::size_t N = kernel.bins();
  std::vector<RunningStats> profit(N + 1);
  std::vector<std::size_t> hits(N + 1, 0);
  for (const Outcome& o : outcomes) {
    for (std::size_t slot : {static_cast<std::size_t>(o.bin), std::size_t{0}}) {
      profit[slot].add(o.profit);
      hits[slot] += o.hit ? 1 : 0;
    }
  }
  std::vector<KyleSummary> rows;
  auto row = [&](std::size_t slot) {
    KyleSummary s;
    s.bin = static_cast<int>(slot);
    s.dt = params.dt;
    s.profit = profit[slot].estimate();
    s.paths = profit[slot].count();
    s.hit_rate = s.paths ? static_cast<double>(hits[slot]) / static_cast<double>(s.paths) : 0.0;
    rows.push_back(s);
  };
  for (std::size_t n = 1; n <= N; ++n) row(n);
  row(0);
  return rows;
}

}  // namespace gm_bridge
