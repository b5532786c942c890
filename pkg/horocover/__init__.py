__version__ = "0.1.0"

from .errors import (
    ConfigError,
    HorocoverError,
    NumericGuardError,
    ValidationError,
)

__all__ = [
    "__version__",
    "HorocoverError",
    "ConfigError",
    "ValidationError",
    "NumericGuardError",
]
