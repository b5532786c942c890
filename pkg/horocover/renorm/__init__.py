"""Jacobi fields, the renormalization time τ and the normalizing time t★."""

from .curvature import ConstantCurvature, CurvatureModel, SamplerCurvature, build_curvature_model
from .jacobi import (
    JacobiProfile,
    backward_jacobi_field,
    jacobi_at_frames,
    jacobi_field,
    shooting_jacobi,
    stable_divergence,
    unstable_jacobi_field,
)
from .quadrature import composite_gauss_legendre, gauss_legendre_nodes
from .tau import HorocycleArc, RenormRecord, normalizing_time, tau

__all__ = [
    "ConstantCurvature",
    "SamplerCurvature",
    "CurvatureModel",
    "build_curvature_model",
    "JacobiProfile",
    "jacobi_field",
    "backward_jacobi_field",
    "unstable_jacobi_field",
    "stable_divergence",
    "shooting_jacobi",
    "jacobi_at_frames",
    "composite_gauss_legendre",
    "gauss_legendre_nodes",
    "HorocycleArc",
    "RenormRecord",
    "tau",
    "normalizing_time",
]
