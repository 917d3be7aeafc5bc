#include "gm_bridge/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "gm_bridge/errors.hpp"

namespace gm_bridge {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
  else comp_ += (x - t) + sum_;
  sum_ = t;
}

void RunningStats::add(double x) noexcept {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningStats::mean() const noexcept { return mean_; }

double RunningStats::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::standard_error() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

Estimate estimate_of(const std::vector<double>& xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return s.estimate();
}

namespace {

// Limiting distribution: P(sqrt(n) D > lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_sf(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::invalid_argument, "KS needs two samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  KsResult r;
  r.statistic = d;
  r.n = a.size();
  r.m = b.size();
  const double en = std::sqrt(n * m / (n + m));
  r.p_value = kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
  return r;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected_probs, double min_expected) {
  if (observed.size() != expected_probs.size() || observed.empty())
    throw Error(ErrorKind::invalid_argument, "chi-square needs matching, non-empty cells");
  double total = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    total += observed[k];
    mass += expected_probs[k];
  }
  std::vector<double> probs = expected_probs;
  probs.back() += std::max(0.0, 1.0 - mass);

  std::vector<double> obs, exp;
  double o = 0.0, e = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    o += observed[k];
    e += probs[k] * total;
    if (e >= min_expected) {
      obs.push_back(o);
      exp.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp.empty()) {
      obs.push_back(o);
      exp.push_back(e);
    } else {
      obs.back() += o;
      exp.back() += e;
    }
  }
  ChiSquareResult r;
  r.cells = obs.size();
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const double diff = obs[k] - exp[k];
    r.statistic += diff * diff / exp[k];
  }
  r.dof = static_cast<double>(r.cells) - 1.0;
  if (r.dof >= 1.0) {
    const boost::math::chi_squared_distribution<double> chi(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(chi, r.statistic));
  }
  return r;
}

}  // namespace gm_bridge
