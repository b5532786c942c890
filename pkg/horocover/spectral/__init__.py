"""Winding covariance, CLT diagnostics, Ulam spectra and entropy estimates."""

from .clt import CLTReport, clt_diagnostic, inverse_square_root, whiten
from .covariance import CovarianceMatrix, estimate_sigma, sample_windings
from .entropy import EntropyEstimate, estimate_entropy
from .ulam import (
    UlamGrid,
    UlamOperator,
    UlamSpectrum,
    fit_quadratic_form,
    frobenius_relative,
    load_dump,
    omega_grid,
    power_iteration,
    ulam_spectrum,
)

__all__ = [
    "CovarianceMatrix",
    "estimate_sigma",
    "sample_windings",
    "CLTReport",
    "clt_diagnostic",
    "inverse_square_root",
    "whiten",
    "EntropyEstimate",
    "estimate_entropy",
    "UlamGrid",
    "UlamOperator",
    "UlamSpectrum",
    "power_iteration",
    "omega_grid",
    "fit_quadratic_form",
    "frobenius_relative",
    "load_dump",
    "ulam_spectrum",
]
