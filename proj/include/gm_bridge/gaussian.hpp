#pragma once

namespace gm_bridge {

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
// Upper tail 1 - Phi(x), accurate for large positive x.
double normal_sf(double x) noexcept;
double normal_quantile(double p);
// Mills ratio (1 - Phi(x)) / phi(x); finite for all x, ~1/x as x -> inf.
double mills_ratio(double x) noexcept;

}  // namespace gm_bridge
