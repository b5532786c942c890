"""Checks: trends and envelopes of the asymptotic experiments."""

import logging
import math

import numpy as np
import pandas as pd
from scipy import stats

from horocover.ergodic import DeviationFit, fit_deviation_exponent
from horocover.errors import DegenerateFit

from .models import Verdict, verdict

logger = logging.getLogger(__name__)

RATIO_BAND = (0.3, 3.0)
RATIO_FROM = 1e3
GROWTH_FACTOR = 3.0
MIN_R_SQUARED = 0.9


def evaluate_theorem_a(table: pd.DataFrame) -> list[Verdict]:
    """Median ratio inside [0.3, 3] for T >= 10³ and a non-increasing median normalized residual."""
    medians = table.groupby("T").agg(ratio=("ratio", "median"), residual=("normalized_residual", "median"))
    late = medians[medians.index >= RATIO_FROM]
    low, high = RATIO_BAND
    verdicts = []
    if late.empty:
        logger.warning(f"No orbit length reaches {RATIO_FROM:g}; skipping the ratio band check")
    else:
        outside = late[(late["ratio"] < low) | (late["ratio"] > high)]
        verdicts.append(
            verdict(
                "theorem_a_ratio",
                outside.empty,
                f"Median ratio in [{late['ratio'].min():.3f}, {late['ratio'].max():.3f}] for T >= {RATIO_FROM:g}, "
                f"{len(outside)} of {len(late)} outside [{low:g}, {high:g}]",
                outside=len(outside),
            )
        )
    if len(medians) < 2:
        verdicts.append(verdict("theorem_a_trend", False, "Trend needs at least two orbit lengths"))
        return verdicts
    rho = float(stats.spearmanr(medians.index.to_numpy(), medians["residual"].to_numpy()).statistic)
    verdicts.append(
        verdict(
            "theorem_a_trend",
            not rho > 0,
            f"Spearman ρ of the median normalized residual against T is {rho:.3f} (need <= 0)",
            spearman=f"{rho:.6f}",
        )
    )
    return verdicts


def evaluate_theorem_b(table: pd.DataFrame) -> Verdict:
    """Median scaled residual at every t at most 3 times its value at the first t > 1."""
    medians = table.dropna(subset=["scaled_residual"]).groupby("t")["scaled_residual"].median()
    if medians.empty:
        return verdict("theorem_b_growth", False, "No push time above 1 to measure the scaled residual")
    reference = float(medians.iloc[0])
    worst = float((medians / reference).max()) if reference > 0 else math.inf
    return verdict(
        "theorem_b_growth",
        worst <= GROWTH_FACTOR,
        f"Median scaled residual grows by at most {worst:.3f}× over t = {medians.index[0]:g} "
        f"(limit {GROWTH_FACTOR:g}×)",
        growth=f"{worst:.6e}",
    )


def evaluate_theorem_c(table: pd.DataFrame) -> tuple[list[Verdict], DeviationFit | None]:
    """Deviation exponent a in (0, 1) with R² >= 0.9, and median deviations decaying decade to decade."""
    verdicts = []
    try:
        fit = fit_deviation_exponent(table)
    except DegenerateFit as e:
        logger.warning(f"Deviation fit failed: {e}")
        fit = None
        verdicts.append(verdict("theorem_c_exponent", False, str(e)))
    if fit is not None:
        verdicts.append(
            verdict(
                "theorem_c_exponent",
                0.0 < fit.exponent < 1.0 and fit.r_squared >= MIN_R_SQUARED,
                f"Deviation exponent a = {fit.exponent:.4f} with R² = {fit.r_squared:.3f} "
                f"(need a in (0, 1), R² >= {MIN_R_SQUARED:g})",
                exponent=f"{fit.exponent:.6f}",
                r_squared=f"{fit.r_squared:.6f}",
            )
        )

    medians = table.groupby("T")["deviation"].median()
    exponents = np.log10(medians.index.to_numpy(dtype=float))
    decades = medians[np.isclose(exponents, np.round(exponents))]
    if len(decades) < 2:
        logger.warning("Fewer than two whole decades in the schedule; checking every step instead")
        decades = medians
    increases = int(np.sum(np.diff(decades.to_numpy()) > 0))
    verdicts.append(
        verdict(
            "theorem_c_monotone",
            increases == 0,
            f"Median deviation increases {increases} time(s) over {len(decades)} successive decades",
            increases=increases,
        )
    )
    return verdicts, fit
