#pragma once

#include <cstdint>
#include <vector>

namespace gm_bridge {

// P(X = k) for X = N1 - N2, N1, N2 iid Poisson(mu); equals e^{-2mu} I_|k|(2mu).
double skellam_pmf(std::int64_t k, double mu);
// P(X <= k).
double skellam_cdf(std::int64_t k, double mu);

// e^{-2mu} I_k(2mu) for k = 0..radius, written to out[0..radius].
void skellam_pmf_row(double mu, std::int64_t radius, double* out);
// Smallest j >= 1 with the pmf bound mu^j / j! < eps; the mass beyond it is
// negligible for short propagation steps.
std::int64_t skellam_short_radius(double mu, double eps = 1e-20) noexcept;

// Half-width beyond which the Skellam(mu) mass is negligible:
// ceil(12 sqrt(2 mu) + 20).
std::int64_t skellam_support_radius(double mu) noexcept;

// One Skellam law tabulated on |k| <= radius, with cumulative tails.
//
// All quantities are built from a single normalised backward Bessel
// recurrence, so each entry keeps full relative accuracy even far in the
// tails. Mass beyond the radius is treated as zero.
class SkellamTable {
 public:
  SkellamTable() : SkellamTable(0.0, 0) {}
  // radius < 0 selects skellam_support_radius(mu).
  explicit SkellamTable(double mu, std::int64_t radius = -1);

  // Table whose radius is the smallest j with the pmf bound mu^j/j! < eps.
  static SkellamTable short_range(double mu, double eps = 1e-20);

  double mu() const noexcept { return mu_; }
  std::int64_t radius() const noexcept { return radius_; }

  double pmf(std::int64_t k) const noexcept {
    const std::int64_t a = k < 0 ? -k : k;
    return a > radius_ ? 0.0 : pmf_[static_cast<std::size_t>(a)];
  }
  // P(X >= m).
  double upper_tail(std::int64_t m) const noexcept {
    if (m <= 0) return 1.0 - upper_(1 - m);
    return upper_(m);
  }
  // P(X <= k).
  double cdf(std::int64_t k) const noexcept { return upper_tail(-k); }
  // P(lo <= X <= hi), computed from whichever tail keeps relative accuracy.
  double interval(std::int64_t lo, std::int64_t hi) const noexcept;
  // Integral over s in [0, mu] of P(X_s = k) where X_s ~ Skellam(s).
  double occupation(std::int64_t k) const noexcept {
    const std::int64_t a = k < 0 ? -k : k;
    return tail_sum_(a + 1);
  }
  // Integral over s in [0, mu] of P(X_s >= j).
  double upper_tail_integral(std::int64_t j) const noexcept {
    if (j <= 0) return mu_ - tail_sum2_(2 - j);
    return tail_sum2_(j + 1);
  }

 private:
  double upper_(std::int64_t m) const noexcept {
    return m > radius_ ? 0.0 : tail_[static_cast<std::size_t>(m)];
  }
  double tail_sum_(std::int64_t m) const noexcept {
    return m > radius_ ? 0.0 : tail_sum_table_[static_cast<std::size_t>(m)];
  }

  double tail_sum2_(std::int64_t m) const noexcept {
    return m > radius_ ? 0.0 : tail_sum2_table_[static_cast<std::size_t>(m)];
  }

  double mu_;
  std::int64_t radius_;
  std::vector<double> pmf_;             // pmf_[k], k = 0..radius
  std::vector<double> tail_;            // P(X >= m), m = 0..radius
  std::vector<double> tail_sum_table_;  // sum_{i >= m} P(X >= i)
  std::vector<double> tail_sum2_table_; // sum_{i >= m} tail_sum_table_[i]
};

}  // namespace gm_bridge
