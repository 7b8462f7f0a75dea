"""Input checks shared by the estimator wrappers and the CLI."""

from __future__ import annotations

import math

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import DomainError

__all__ = ["check_positive", "check_fraction", "check_records", "check_amplitudes"]


def check_positive(name: str, value, *, allow_zero: bool = False) -> float:
    """Return ``value`` as a float, raising DomainError unless it is positive and finite."""
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a number, got {value!r}") from None
    ok = v >= 0 if allow_zero else v > 0
    if not (ok and math.isfinite(v)):
        bound = "non-negative" if allow_zero else "positive"
        raise DomainError(f"{name} must be {bound} and finite, got {value!r}")
    return v


def check_fraction(name: str, value) -> float:
    v = check_positive(name, value)
    if not v < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value!r}")
    return v


def check_records(X) -> np.ndarray:
    """Detector records as a 2-D float array, one record per row.

    A 1-D input is treated as a single record.
    """
    X = np.asarray(X, dtype=float) if not hasattr(X, "samples") else np.asarray(X.samples, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    return check_array(X, dtype=float, ensure_2d=True, ensure_min_samples=1, ensure_min_features=2)


def check_amplitudes(X) -> np.ndarray:
    """Non-negative spectral amplitudes, flattened to 1-D."""
    r = check_array(np.atleast_2d(np.asarray(X, dtype=float)), dtype=float, ensure_2d=True).ravel()
    if np.any(r < 0):
        raise DomainError("amplitudes must be non-negative")
    return r
