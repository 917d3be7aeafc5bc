#pragma once

#include <cstddef>
#include <vector>

namespace gm_bridge {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

// Welford mean/variance, accumulated in call order so results are reproducible.
class RunningStats {
 public:
  void add(double x) noexcept;
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept;
  double variance() const noexcept;  // unbiased
  double standard_error() const noexcept;
  Estimate estimate() const noexcept { return {mean(), standard_error(), n_}; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

Estimate estimate_of(const std::vector<double>& xs);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t m = 0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
// Asymptotic critical value of the two-sample statistic at level alpha.
double ks_critical_value(std::size_t n, std::size_t m, double alpha = 0.01);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  std::size_t cells = 0;
};

// Pearson goodness-of-fit of integer-labelled counts against probabilities.
// Adjacent cells are merged until each expected count is at least
// min_expected; the final cell absorbs the remaining probability mass.
ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected_probs,
                               double min_expected = 5.0);

}  // namespace gm_bridge
