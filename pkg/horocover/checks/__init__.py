"""Acceptance verdicts recorded in run manifests."""

from .geometry_checks import (
    evaluate_determinant_drift,
    evaluate_flow_deck_commutation,
    evaluate_reduction_growth,
    evaluate_relation,
    evaluate_tiling,
    reduction_growth,
)
from .identity_checks import (
    evaluate_jacobi_bounds,
    evaluate_reconstruction,
    evaluate_tau_table,
    evaluate_twist_identities,
    jacobi_bounds_table,
    jacobi_inverse_residual,
    reconstruction_errors,
    sample_shifts,
    tau_table,
    twist_identity_residuals,
)
from .models import Verdict, verdict
from .spectral_checks import (
    evaluate_clt,
    evaluate_drift,
    evaluate_sigma_consistency,
    evaluate_ulam,
    sigma_gaps,
)
from .trend_checks import evaluate_theorem_a, evaluate_theorem_b, evaluate_theorem_c

__all__ = [
    "Verdict",
    "verdict",
    "evaluate_relation",
    "evaluate_flow_deck_commutation",
    "evaluate_determinant_drift",
    "evaluate_tiling",
    "reduction_growth",
    "evaluate_reduction_growth",
    "tau_table",
    "evaluate_tau_table",
    "jacobi_inverse_residual",
    "jacobi_bounds_table",
    "evaluate_jacobi_bounds",
    "reconstruction_errors",
    "evaluate_reconstruction",
    "twist_identity_residuals",
    "evaluate_twist_identities",
    "sample_shifts",
    "sigma_gaps",
    "evaluate_sigma_consistency",
    "evaluate_drift",
    "evaluate_clt",
    "evaluate_ulam",
    "evaluate_theorem_a",
    "evaluate_theorem_b",
    "evaluate_theorem_c",
]
