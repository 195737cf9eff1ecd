"""Argument checks shared by the public dataclasses and functions.

Each helper coerces to float, validates, and returns the coerced value so
callers can write ``self.x = check_positive("x", x)`` style assignments.
"""

from __future__ import annotations

import math

from .errors import ParameterError


def as_float(name: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a real number, got {value!r}") from None


def check_finite(name: str, value) -> float:
    value = as_float(name, value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value}")
    return value


def check_finite_nonnegative(name: str, value) -> float:
    value = check_finite(name, value)
    if value < 0.0:
        raise ParameterError(f"{name} must be >= 0, got {value}")
    return value


def check_positive(name: str, value) -> float:
    value = check_finite(name, value)
    if value <= 0.0:
        raise ParameterError(f"{name} must be > 0, got {value}")
    return value


def check_unit_interval(name: str, value) -> float:
    value = check_finite(name, value)
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_index(name: str, value, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return value
