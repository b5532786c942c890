"""
Named presets for cover projections and curvature models.

Configuration files may refer to these by name instead of spelling out matrices and parameters.
Projection rows are coordinates in the homology basis (a1, b1, a2, b2).
"""

PROJECTIONS = {
    # Z-cover unwinding a1
    "d1": ((1, 0, 0, 0),),
    # Z-cover unwinding b1
    "d1-b1": ((0, 1, 0, 0),),
    # Z²-cover unwinding one handle in each direction
    "d2": ((1, 0, 0, 0), (0, 0, 1, 0)),
    # Z²-cover unwinding the first handle completely
    "d2-handle": ((1, 0, 0, 0), (0, 1, 0, 0)),
    # Maximal Abelian cover
    "d4": ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)),
    # Zero row; only useful to exercise singular-covariance handling
    "degenerate": ((0, 0, 0, 0),),
}

CURVATURE_PRESETS = {
    "constant": {"kind": "constant"},
    # K in [-2, -1]
    "sinusoidal": {"kind": "sampler", "mean": 1.5, "amplitude": 0.5, "frequency": 1.0},
    # K in [-4, -1]
    "sinusoidal-wide": {"kind": "sampler", "mean": 2.5, "amplitude": 1.5, "frequency": 1.0},
    # K in [-1.2, -0.8], slowly varying
    "sinusoidal-mild": {"kind": "sampler", "mean": 1.0, "amplitude": 0.2, "frequency": 0.5},
}


def get_projection(name: str = "d1") -> tuple[tuple[int, ...], ...]:
    """
    Get a cover projection by name.

    Args:
        name: Name of the projection (default: "d1")

    Returns:
        Projection rows, one per deck coordinate

    Raises:
        KeyError: If the projection name doesn't exist

    Example:
        >>> get_projection("d2")
        ((1, 0, 0, 0), (0, 0, 1, 0))
    """
    if name not in PROJECTIONS:
        available = ", ".join(PROJECTIONS.keys())
        raise KeyError(f"Projection '{name}' not found. Available projections: {available}")
    return PROJECTIONS[name]


def get_curvature_preset(name: str = "constant") -> dict:
    """
    Get curvature model parameters by name.

    Raises:
        KeyError: If the preset name doesn't exist
    """
    if name not in CURVATURE_PRESETS:
        available = ", ".join(CURVATURE_PRESETS.keys())
        raise KeyError(f"Curvature preset '{name}' not found. Available presets: {available}")
    return dict(CURVATURE_PRESETS[name])


def list_projections() -> list[str]:
    return list(PROJECTIONS.keys())


def list_curvature_presets() -> list[str]:
    return list(CURVATURE_PRESETS.keys())
