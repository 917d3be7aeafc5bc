#include "gm_bridge/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gm_bridge/errors.hpp"
#include "gm_bridge/gaussian.hpp"
#include "gm_bridge/skellam.hpp"

namespace gm_bridge {

namespace {

Lattice floor_half(Lattice s) { return s >= 0 ? s / 2 : -((-s + 1) / 2); }

[[noreturn]] void unresolvable(int n, double delta) {
  std::ostringstream os;
  os << "distribution unresolvable at this delta (" << delta << "): boundaries " << n
     << " and " << n + 1 << " coincide";
  throw Error(ErrorKind::unresolvable_quantization, os.str());
}

nlohmann::json lattice_value(Lattice k, double delta) {
  if (k <= kLatticeNegInf) return "-inf";
  if (k >= kLatticePosInf) return "inf";
  return static_cast<double>(k) * delta;
}

nlohmann::json lattice_index(Lattice k) {
  if (k <= kLatticeNegInf) return "-inf";
  if (k >= kLatticePosInf) return "inf";
  return k;
}

}  // namespace

int Quantization::bin_of(Lattice y) const {
  const auto it = std::upper_bound(edges.begin(), edges.end(), y);
  return static_cast<int>(it - edges.begin());
}

void Quantization::check_bin(int n) const {
  if (n < 1 || n > static_cast<int>(bins())) {
    std::ostringstream os;
    os << "bin " << n << " outside 1.." << bins();
    throw Error(ErrorKind::invalid_argument, os.str());
  }
}

Quantization quantize(const AssetDistribution& dist, double delta) {
  dist.validate();
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw Error(ErrorKind::invalid_argument, "delta must be finite and > 0");

  Quantization q;
  q.dist = dist;
  q.delta = delta;
  q.beta = 1.0 / (2.0 * delta * delta);
  const int N = static_cast<int>(dist.size());

  q.edges.push_back(kLatticeNegInf);
  if (N == 1) {
    q.edges.push_back(kLatticePosInf);
    q.bin_probs = {1.0};
    q.mid_lower = q.mid_upper = {kLatticeNegInf};
    return q;
  }

  const SkellamTable z1(q.beta);
  const Lattice r = z1.radius();
  double cum = 0.0;
  for (int n = 1; n <= N - 1; ++n) {
    cum += dist.probs[static_cast<std::size_t>(n - 1)];
    if (z1.cdf(r) < cum) unresolvable(n, delta);
    // Smallest k with CDF(k) >= cum; CDF(-r-1) = 0 < cum.
    Lattice lo = -r - 1, hi = r;
    while (hi - lo > 1) {
      const Lattice mid = lo + (hi - lo) / 2;
      if (z1.cdf(mid) >= cum) hi = mid;
      else lo = mid;
    }
    Lattice k = hi;
    const Lattice prev = q.edges.back();
    if (n >= 2) {
      // Keep the midpoint of bin n off the lattice.
      if ((prev + k - 1) % 2 == 0) ++k;
      if (k <= prev) unresolvable(n, delta);
    }
    q.edges.push_back(k);
  }
  q.edges.push_back(kLatticePosInf);

  for (int n = 1; n <= N; ++n) {
    const Lattice lo = q.lower_edge(n), hi = q.upper_edge(n);
    q.bin_probs.push_back(z1.interval(lo, hi - 1));
    if (n == 1) {
      q.mid_lower.push_back(kLatticeNegInf);
      q.mid_upper.push_back(kLatticeNegInf);
    } else if (n == N) {
      q.mid_lower.push_back(kLatticePosInf);
      q.mid_upper.push_back(kLatticePosInf);
    } else {
      const Lattice m = floor_half(lo + hi - 1);
      q.mid_lower.push_back(m);
      q.mid_upper.push_back(m + 1);
    }
  }
  return q;
}

std::vector<double> gaussian_boundaries(const AssetDistribution& dist) {
  dist.validate();
  std::vector<double> a{-INFINITY};
  double cum = 0.0;
  for (std::size_t n = 0; n + 1 < dist.size(); ++n) {
    cum += dist.probs[n];
    a.push_back(normal_quantile(cum));
  }
  a.push_back(INFINITY);
  return a;
}

nlohmann::json to_json(const Quantization& q) {
  nlohmann::json j;
  j["distribution"] = to_json(q.dist);
  j["delta"] = q.delta;
  j["beta"] = q.beta;
  auto& b = j["boundaries"] = nlohmann::json::array();
  auto& bi = j["boundary_indices"] = nlohmann::json::array();
  for (Lattice e : q.edges) {
    b.push_back(lattice_value(e, q.delta));
    bi.push_back(lattice_index(e));
  }
  j["bin_probs"] = q.bin_probs;
  auto& lo = j["mid_lower"] = nlohmann::json::array();
  auto& hi = j["mid_upper"] = nlohmann::json::array();
  for (std::size_t n = 0; n < q.bins(); ++n) {
    lo.push_back(lattice_value(q.mid_lower[n], q.delta));
    hi.push_back(lattice_value(q.mid_upper[n], q.delta));
  }
  return j;
}

}  // namespace gm_bridge
