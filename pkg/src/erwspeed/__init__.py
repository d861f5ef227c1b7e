"""Verification and exploration toolkit for the speed of excited random walk."""

__version__ = "0.1.0"

from .core import ModelParams, WalkPath, extend, is_fresh, transition_probability  # noqa: E402
from .errors import DivergenceError, DomainError, PrecisionError, ResourceError  # noqa: E402

__all__ = [
    "ModelParams", "WalkPath", "extend", "is_fresh", "transition_probability",
    "DivergenceError", "DomainError", "PrecisionError", "ResourceError",
]
