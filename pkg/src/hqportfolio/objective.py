"""Binary mean-variance fitness, evaluation counting and exhaustive search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_portfolio
from .market_data import ProblemInstance

MAX_BRUTE_FORCE_ASSETS = 24
OPTIMUM_ATOL = 1e-12


def fitness(instance: ProblemInstance, x) -> float:
    """Return ``sum_i mu_i x_i - gamma * sum_ij x_i sigma_ij x_j``.

    The quadratic term runs over all ordered pairs, so each off-diagonal
    covariance is counted twice.
    """
    xf = check_portfolio(x, instance.n).astype(float)
    return float(xf @ instance.mu - instance.gamma * (xf @ instance.sigma @ xf))


class CountingEvaluator:
    """Fitness oracle that counts its calls.

    One evaluator belongs to one run; it is not safe to share across threads.
    """

    def __init__(self, instance: ProblemInstance):
        self.instance = instance
        self.count = 0

    def evaluate(self, x) -> float:
        value = fitness(self.instance, x)
        self.count += 1
        return value

    __call__ = evaluate


def evaluate_counted(evaluator: CountingEvaluator, x) -> float:
    return evaluator.evaluate(x)


def bits_to_str(x) -> str:
    return "".join("1" if b else "0" for b in np.asarray(x).ravel())


def str_to_bits(text: str) -> np.ndarray:
    if not text or any(c not in "01" for c in text):
        raise ValueError(f"not a bitstring: {text!r}")
    return np.array([c == "1" for c in text], dtype=np.int8)


def all_bitstrings(n: int) -> np.ndarray:
    """All ``2**n`` bitstrings as rows, ordered by big-endian integer value."""
    ints = np.arange(2**n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((ints[:, None] >> shifts) & 1).astype(np.int8)


@dataclass(frozen=True)
class BruteForceResult:
    best: np.ndarray
    best_value: float
    evaluations: int


def brute_force(instance: ProblemInstance) -> BruteForceResult:
    """Certified maximizer over all ``2**n`` portfolios.

    Ties go to the lowest bitstring read as a big-endian integer (asset 0 is
    the most significant bit).

    Raises
    ------
    ValueError
        If ``n`` exceeds ``MAX_BRUTE_FORCE_ASSETS``.
    """
    n = instance.n
    if n > MAX_BRUTE_FORCE_ASSETS:
        raise ValueError(f"brute force refused for n={n} > {MAX_BRUTE_FORCE_ASSETS}")
    bits = all_bitstrings(n)
    xf = bits.astype(float)
    values = xf @ instance.mu - instance.gamma * np.einsum("ki,ij,kj->k", xf, instance.sigma, xf)
    # vectorised sums may differ from fitness() in the last ulp; settle near-ties exactly
    candidates = np.flatnonzero(values >= values.max() - OPTIMUM_ATOL)
    best_idx, best_value = None, -np.inf
    for k in candidates:
        v = fitness(instance, bits[k])
        if v > best_value:
            best_idx, best_value = k, v
    return BruteForceResult(bits[best_idx].copy(), best_value, 2**n)
