"""Observables, the twist decomposition π_ω and transfer operators."""

from .fourier import (
    TwistedSection,
    aliased_value,
    apply_twist,
    minimum_grid,
    project_twist,
    project_twist_batch,
    reconstruct,
    twist_grid,
)
from .observables import BaseBump, ConstantObservable, CoverObservable, SurfaceObservable
from .transfer import (
    backward_weight,
    transfer_apply,
    twisted_transfer_apply,
    twisted_transfer_batch,
    twisted_transfer_via_frobenius,
)

__all__ = [
    "BaseBump",
    "CoverObservable",
    "SurfaceObservable",
    "ConstantObservable",
    "project_twist",
    "project_twist_batch",
    "apply_twist",
    "twist_grid",
    "minimum_grid",
    "reconstruct",
    "aliased_value",
    "TwistedSection",
    "backward_weight",
    "transfer_apply",
    "twisted_transfer_apply",
    "twisted_transfer_via_frobenius",
    "twisted_transfer_batch",
]
