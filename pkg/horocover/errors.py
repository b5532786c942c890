"""
Error types raised across horocover.

Two families matter to callers:
- ConfigError / ValidationError: the run cannot start or a validation check failed (CLI exit code 2)
- NumericGuardError: a numeric precondition was violated mid-computation (CLI exit code 3)
"""


class HorocoverError(Exception):
    """Base class for all horocover errors."""


class ConfigError(HorocoverError, ValueError):
    """Malformed configuration, missing key, or missing prerequisite file."""


class ValidationError(HorocoverError):
    """A geometric or numeric validation check failed."""


class NumericGuardError(HorocoverError, ArithmeticError):
    """A numeric guard tripped; the message names the violated precondition."""


class NonTermination(NumericGuardError):
    """Fundamental-domain reduction exceeded its step budget."""


class HorizonTooShort(NumericGuardError):
    """Backward Riccati horizon did not stabilize the initial value."""


class BracketFailure(NumericGuardError):
    """No sign change found for the normalizing-time bisection."""


class GridTooCoarse(NumericGuardError):
    """Fourier reconstruction grid is below the aliasing bound."""


class StepTooCoarse(NumericGuardError):
    """Quadrature step is too large for the observable's bump radius."""


class DegenerateFit(NumericGuardError):
    """Too few usable points for a regression."""


class SingularEstimate(NumericGuardError):
    """Estimated covariance is not positive definite."""


class PowerIterationStall(NumericGuardError):
    """Power iteration did not converge within its iteration budget."""


class ArcOverflow(NumericGuardError):
    """Geodesic-pushed horocycle arc is too long to integrate."""
