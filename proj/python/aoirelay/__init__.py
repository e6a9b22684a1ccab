"""Relay-assisted age-of-information simulator."""

from ._core import (
    ConfigError,
    bound,
    convolved_pmf,
    experiment_csv,
    max_weight_matching,
    network_aoi_ccdf,
    optimize_activation,
    preset_names,
    signaling_cost,
    simulate,
    success_prob,
)

__all__ = [
    "ConfigError",
    "bound",
    "convolved_pmf",
    "experiment_csv",
    "max_weight_matching",
    "network_aoi_ccdf",
    "optimize_activation",
    "preset_names",
    "signaling_cost",
    "simulate",
    "success_prob",
]
