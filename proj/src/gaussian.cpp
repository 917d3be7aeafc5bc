#include "gm_bridge/gaussian.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "gm_bridge/errors.hpp"

namespace gm_bridge {

double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -INFINITY;
    if (p == 1.0) return INFINITY;
    throw Error(ErrorKind::invalid_argument, "normal_quantile: p outside [0, 1]");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double mills_ratio(double x) noexcept {
  if (x == INFINITY) return 0.0;
  if (x < 5.0) return normal_sf(x) / normal_pdf(x);
  // Continued fraction R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))),
  // evaluated bottom-up; 60 levels are ample for x >= 5.
  double tail = x;
  for (int k = 60; k >= 1; --k) tail = x + k / tail;
  return 1.0 / tail;
}

}  // namespace gm_bridge
