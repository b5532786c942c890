"""Checks: covariance consistency, CLT agreement and the Ulam spectral picture."""

import logging
import math
from collections.abc import Sequence

import numpy as np

from horocover.spectral import CLTReport, CovarianceMatrix, UlamSpectrum, frobenius_relative

from .models import Verdict, verdict

logger = logging.getLogger(__name__)

SIGMA_CONSISTENCY = 0.10
CLT_P_VALUE = 0.01
CLT_PASS_FRACTION = 0.8
CLT_COVARIANCE_TOLERANCE = 0.1
LAMBDA_ZERO_BAND = (0.9, 1.1)
ORDERING_BAND = (0.1, 0.5)
QUADRATIC_TOLERANCE = 0.25


def sigma_gaps(first: CovarianceMatrix | np.ndarray, second: CovarianceMatrix | np.ndarray) -> np.ndarray:
    """
    |Σ₁ - Σ₂| per entry, relative to √(Σ_ii·Σ_jj) of the first estimate.

    Off-diagonal entries of an uncorrelated cover sit near zero, so they are measured on the diagonal scale.
    """
    a = np.asarray(first, dtype=float)
    b = np.asarray(second, dtype=float)
    scale = np.sqrt(np.outer(np.diag(a), np.diag(a)))
    return np.abs(a - b) / scale


def evaluate_sigma_consistency(
    first: CovarianceMatrix, second: CovarianceMatrix, tolerance: float = SIGMA_CONSISTENCY
) -> Verdict:
    gaps = sigma_gaps(first, second)
    worst = float(gaps.max())
    return verdict(
        "sigma_consistency",
        worst <= tolerance,
        f"Σ̂(t={first.time:g}) and Σ̂(t={second.time:g}) differ by {worst:.1%} at most (tolerance {tolerance:.0%})",
        worst=f"{worst:.6e}",
    )


def evaluate_drift(estimate: CovarianceMatrix) -> Verdict:
    drift = estimate.drift
    return Verdict(
        "sigma_drift",
        not estimate.drift_flagged,
        f"Mean winding drift {drift:.2f} standard errors",
        "info" if not estimate.drift_flagged else "warning",
        {"value": f"{drift:.6e}"},
    )


def evaluate_clt(reports: Sequence[CLTReport]) -> list[Verdict]:
    """KS p-values above 0.01 on every coordinate for at least 80% of the seeds, whitened covariance near I."""
    usable = [r for r in reports if not r.degenerate]
    if not usable:
        return [verdict("clt_normality", False, "Every CLT report is degenerate (t = 0)")]
    passing = sum(1 for r in usable if r.min_p_value > CLT_P_VALUE)
    needed = math.ceil(CLT_PASS_FRACTION * len(usable))
    worst_covariance = max(r.covariance_error for r in usable)
    return [
        verdict(
            "clt_normality",
            passing >= needed,
            f"{passing} of {len(usable)} seeds have every KS p-value above {CLT_P_VALUE:g} (need {needed})",
            passing=passing,
            seeds=len(usable),
        ),
        verdict(
            "clt_covariance",
            worst_covariance <= CLT_COVARIANCE_TOLERANCE,
            f"Whitened covariance within {worst_covariance:.3f} of the identity "
            f"(tolerance {CLT_COVARIANCE_TOLERANCE:g})",
            worst=f"{worst_covariance:.6e}",
        ),
    ]


def evaluate_ulam(spectrum: UlamSpectrum, sigma: np.ndarray | None, fit_radius: float) -> list[Verdict]:
    """
    Ulam picture: λ̂(0) near 1, strictly dominant over twists with ‖ω‖ in [0.1, 0.5], and a quadratic
    decay rate close to 2π²Σ when a covariance estimate is available.
    """
    lambda_zero = spectrum.lambda_zero
    low, high = LAMBDA_ZERO_BAND
    verdicts = [
        verdict(
            "ulam_lambda_zero",
            low <= lambda_zero <= high,
            f"λ̂(0) = {lambda_zero:.6f}, expected in [{low:g}, {high:g}]",
            value=f"{lambda_zero:.12g}",
        )
    ]

    norms = np.linalg.norm(spectrum.omegas, axis=1)
    band = (norms >= ORDERING_BAND[0]) & (norms <= ORDERING_BAND[1])
    if np.any(band):
        largest = float(spectrum.table.loc[band, "normalized_modulus"].max())
        verdicts.append(
            verdict(
                "ulam_ordering",
                largest < lambda_zero,
                f"Largest |λ̂(ω)| for ‖ω‖ in [{ORDERING_BAND[0]:g}, {ORDERING_BAND[1]:g}] is {largest:.6f} "
                f"against λ̂(0) = {lambda_zero:.6f}",
                largest=f"{largest:.12g}",
            )
        )
    else:
        logger.warning("No twist of the grid falls in the ordering band; skipping the ordering check")

    if sigma is None:
        logger.warning("No Σ estimate available; skipping the quadratic-form check")
        return verdicts
    quadratic = spectrum.quadratic_form(fit_radius)
    target = 2.0 * math.pi**2 * np.atleast_2d(np.asarray(sigma, dtype=float))
    gap = frobenius_relative(quadratic, target)
    verdicts.append(
        verdict(
            "ulam_quadratic",
            gap <= QUADRATIC_TOLERANCE,
            f"Quadratic decay form within {gap:.1%} of 2π²Σ̂ in Frobenius norm (tolerance {QUADRATIC_TOLERANCE:.0%})",
            relative_gap=f"{gap:.6e}",
        )
    )
    return verdicts
