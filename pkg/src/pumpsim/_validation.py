"""Small input-validation helpers used throughout the package."""

import math

import numpy as np

from .errors import ValidationError


def require(condition, message):
    if not condition:
        raise ValidationError(message)


def check_finite(value, name):
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return float(value)


def check_positive(value, name):
    value = check_finite(value, name)
    if value <= 0.0:
        raise ValidationError(f"{name} must be > 0, got {value!r}")
    return value


def check_nonnegative(value, name):
    value = check_finite(value, name)
    if value < 0.0:
        raise ValidationError(f"{name} must be >= 0, got {value!r}")
    return value


def check_index(value, n, name):
    if not isinstance(value, (int, np.integer)) or not 0 <= value < n:
        raise ValidationError(f"{name} must be an integer in [0, {n}), got {value!r}")
    return int(value)


def as_finite_1d(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr
