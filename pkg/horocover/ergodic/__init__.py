"""Horocycle ergodic integrals and the asymptotic experiments built on them."""

from .experiments import (
    AsymptoticPrediction,
    DeviationFit,
    fit_deviation_exponent,
    geometric_schedule,
    pushed_arc_integral,
    theorem_a_experiment,
    theorem_b_experiment,
    theorem_c_experiment,
)
from .horocycle import (
    BumpNeighborhood,
    HorocycleIntegral,
    RenormalizedIdentity,
    horocycle_integral,
    pushed_back_values,
    renormalized_integral,
    smoothing_error_constant,
)
from .window import DEFAULT_DELTA, SmoothingWindow

__all__ = [
    "DEFAULT_DELTA",
    "SmoothingWindow",
    "BumpNeighborhood",
    "HorocycleIntegral",
    "horocycle_integral",
    "RenormalizedIdentity",
    "pushed_back_values",
    "renormalized_integral",
    "smoothing_error_constant",
    "AsymptoticPrediction",
    "DeviationFit",
    "geometric_schedule",
    "pushed_arc_integral",
    "theorem_a_experiment",
    "theorem_b_experiment",
    "theorem_c_experiment",
    "fit_deviation_exponent",
]
