"""Python bindings for the gm_bridge C++ core."""

from ._core import (
    AssetDistribution,
    Error,
    PricingKernel,
    Quantization,
    brownian_local_time_mean,
    example_distribution,
    gaussian_boundaries,
    kyle_profit,
    loss_bound,
    quantize,
    simulate,
    skellam_cdf,
    skellam_pmf,
)

__all__ = [
    "AssetDistribution",
    "Error",
    "PricingKernel",
    "Quantization",
    "brownian_local_time_mean",
    "example_distribution",
    "gaussian_boundaries",
    "kyle_profit",
    "loss_bound",
    "quantize",
    "simulate",
    "skellam_cdf",
    "skellam_pmf",
]
