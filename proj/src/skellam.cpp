#include "gm_bridge/skellam.hpp"

#include <algorithm>
#include <cmath>

#include "gm_bridge/errors.hpp"

namespace gm_bridge {

namespace {

constexpr int kScaleExp = 600;

// pmf[k] = e^{-x} I_k(x), x = 2 mu, for k = 0..radius, by Miller's backward
// recurrence I_{k-1} = (2k/x) I_k + I_{k+1}, normalised with
// e^{-x} (I_0 + 2 sum_{k>=1} I_k) = 1. The start order is pushed far enough
// past `radius` that the spurious K_k component is below rounding there.
// Each stored value remembers how many times the running sequence was scaled
// down, so entries far below DBL_MIN relative to the peak are still exact.
void fill_pmf(double mu, std::int64_t radius, double* pmf) {
  const auto size = static_cast<std::size_t>(radius) + 1;
  std::fill(pmf, pmf + size, 0.0);
  if (mu == 0.0) {
    pmf[0] = 1.0;
    return;
  }
  const double x = 2.0 * mu;
  const double r = static_cast<double>(radius);
  const auto start = std::max<std::int64_t>(
      radius + 30, static_cast<std::int64_t>(std::ceil(std::sqrt(r * r + 50.0 * x))) + 10);
  const double big = std::ldexp(1.0, kScaleExp);
  const double small = std::ldexp(1.0, -kScaleExp);

  thread_local std::vector<int> scale;
  scale.assign(size, 0);
  double f_next = 0.0;
  double f = 1.0;
  double sum = 0.0;
  int c = 0;
  for (std::int64_t k = start; k >= 1; --k) {
    if (k <= radius) {
      pmf[static_cast<std::size_t>(k)] = f;
      scale[static_cast<std::size_t>(k)] = c;
    }
    sum += 2.0 * f;
    const double f_prev = (2.0 * static_cast<double>(k) / x) * f + f_next;
    f_next = f;
    f = f_prev;
    if (f > big) {
      f *= small;
      f_next *= small;
      sum *= small;
      ++c;
    }
  }
  pmf[0] = f;
  scale[0] = c;
  sum += f;
  for (std::size_t k = 0; k < size; ++k)
    pmf[k] = std::ldexp(pmf[k] / sum, kScaleExp * (scale[k] - c));
}

void check_mu(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw Error(ErrorKind::invalid_argument, "Skellam parameter must be finite and >= 0");
}

}  // namespace

std::int64_t skellam_support_radius(double mu) noexcept {
  return static_cast<std::int64_t>(std::ceil(12.0 * std::sqrt(2.0 * mu) + 20.0));
}

SkellamTable::SkellamTable(double mu, std::int64_t radius) : mu_(mu) {
  check_mu(mu);
  radius_ = radius < 0 ? skellam_support_radius(mu) : radius;
  pmf_.resize(static_cast<std::size_t>(radius_) + 1);
  fill_pmf(mu, radius_, pmf_.data());
  const std::size_t size = pmf_.size();
  tail_.assign(size, 0.0);
  tail_sum_table_.assign(size, 0.0);
  tail_sum2_table_.assign(size, 0.0);
  double acc = 0.0, acc1 = 0.0, acc2 = 0.0;
  for (std::size_t m = size; m-- > 0;) {
    acc += pmf_[m];
    tail_[m] = acc;
    acc1 += acc;
    tail_sum_table_[m] = acc1;
    acc2 += acc1;
    tail_sum2_table_[m] = acc2;
  }
}

std::int64_t skellam_short_radius(double mu, double eps) noexcept {
  std::int64_t j = 0;
  double bound = 1.0;
  while (mu > 0.0 && bound >= eps) {
    ++j;
    bound *= mu / static_cast<double>(j);
  }
  return std::max<std::int64_t>(j, 1);
}

void skellam_pmf_row(double mu, std::int64_t radius, double* out) {
  check_mu(mu);
  fill_pmf(mu, radius, out);
}

SkellamTable SkellamTable::short_range(double mu, double eps) {
  check_mu(mu);
  return SkellamTable(mu, skellam_short_radius(mu, eps));
}

double SkellamTable::interval(std::int64_t lo, std::int64_t hi) const noexcept {
  if (lo > hi) return 0.0;
  if (lo >= 1) return upper_(lo) - upper_(hi + 1);
  if (hi <= -1) return upper_(-hi) - upper_(1 - lo);
  return 1.0 - upper_(1 - lo) - upper_(hi + 1);
}

double skellam_pmf(std::int64_t k, double mu) {
  check_mu(mu);
  const std::int64_t a = k < 0 ? -k : k;
  return SkellamTable(mu, std::max(skellam_support_radius(mu), a)).pmf(k);
}

double skellam_cdf(std::int64_t k, double mu) {
  check_mu(mu);
  const std::int64_t a = k < 0 ? -k : k;
  return SkellamTable(mu, std::max(skellam_support_radius(mu), a + 1)).cdf(k);
}

}  // namespace gm_bridge
