"""Exceptions and small argument checks shared across the package."""

import math

import numpy as np


class DickeIsingError(Exception):
    """Base class for errors raised by this package."""


class DomainError(DickeIsingError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(DickeIsingError, RuntimeError):
    """An iterative procedure exhausted its budget without converging."""


class NoSolutionError(DickeIsingError, ValueError):
    """A root or fixed point requested by the caller does not exist."""


class OutOfRegionError(DickeIsingError, ValueError):
    """The operating point is not in the region the computation needs."""


class DegenerateDesignError(DickeIsingError, ValueError):
    """An estimator design carries no information about the parameter."""


class TruncationError(DickeIsingError, RuntimeError):
    """A truncated Hilbert space is too small for the requested accuracy."""


class ResourceError(DickeIsingError, ValueError):
    """The requested problem size exceeds the dense-diagonalization budget."""


def check_finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_positive(name, value, allow_inf=False):
    value = float(value)
    if math.isnan(value) or value <= 0 or (math.isinf(value) and not allow_inf):
        raise DomainError(f"{name} must be > 0, got {value!r}")
    return value


def check_nonnegative(name, value):
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def check_int(name, value, minimum=None, maximum=None):
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise DomainError(f"{name} must be <= {maximum}, got {value}")
    return value


def check_increasing(name, values, strict=True):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional")
    d = np.diff(arr)
    if (strict and np.any(d <= 0)) or (not strict and np.any(d < 0)):
        raise DomainError(f"{name} must be sorted ascending")
    return arr
