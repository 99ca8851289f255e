"""Input validation helpers shared by the estimators and the bench layer."""

from __future__ import annotations

import math
from numbers import Integral, Real

import numpy as np


def check_portfolio(x, n: int) -> np.ndarray:
    """Return ``x`` as an int8 0/1 vector of length ``n``.

    Raises
    ------
    ValueError
        If the length differs from ``n`` or an entry is not exactly 0 or 1.
    """
    arr = np.asarray(x)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ValueError(f"portfolio must have length {n}, got shape {arr.shape}")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("portfolio entries must be exactly 0 or 1")
    return arr.astype(np.int8)


def check_probability(value, name: str) -> float:
    if not isinstance(value, Real) or not 0.0 <= float(value) <= 1.0:
        raise ValueError(f"{name} must be a probability in [0, 1], got {value!r}")
    return float(value)


def check_count(value, name: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_angle(value, name: str, low: float, high: float, low_open: bool = True) -> float:
    """Check ``value`` lies in ``(low, high]`` (or ``[low, high]`` when ``low_open`` is false)."""
    if not isinstance(value, Real) or not math.isfinite(float(value)):
        raise ValueError(f"{name} must be a finite angle, got {value!r}")
    v = float(value)
    below = v <= low if low_open else v < low
    if below or v > high:
        bracket = "(" if low_open else "["
        raise ValueError(f"{name} must lie in {bracket}{low}, {high}], got {v}")
    return v


def check_seed(value) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral) or value < 0:
        raise ValueError(f"seed must be a non-negative integer, got {value!r}")
    return int(value)


def check_moments(mu, sigma) -> tuple[np.ndarray, np.ndarray]:
    """Validate a (mean vector, covariance matrix) pair.

    The covariance must be square, match ``mu``, be symmetric within 1e-12
    absolute and positive semidefinite down to a smallest eigenvalue of -1e-9.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if mu.ndim != 1 or mu.size == 0:
        raise ValueError("mu must be a non-empty vector")
    n = mu.shape[0]
    if sigma.shape != (n, n):
        raise ValueError(f"sigma must be {n}x{n}, got {sigma.shape}")
    if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
        raise ValueError("mu and sigma must be finite")
    if np.max(np.abs(sigma - sigma.T)) > 1e-12:
        raise ValueError("sigma is not symmetric")
    if np.linalg.eigvalsh(sigma).min() < -1e-9:
        raise ValueError("sigma is not positive semidefinite")
    return mu, sigma
