"""Price ingestion, return/moment estimation and instance sampling.

Price files are plain CSV with a ``date`` column followed by one column per
ticker holding adjusted close prices::

    date,AAA,BBB
    2024-01-02,101.5,33.2
    2024-01-03,102.0,33.9

Instances are persisted as JSON documents with the keys ``label``,
``tickers``, ``mu``, ``sigma`` (row-major list of rows) and ``gamma``.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_moments, check_seed

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 1.0


class DataError(ValueError):
    """Raised when an input file violates its documented schema or invariants."""


@dataclass(frozen=True)
class PriceTable:
    dates: tuple[dt.date, ...]
    tickers: tuple[str, ...]
    prices: np.ndarray
    dropped_rows: int = 0

    def __post_init__(self):
        if self.prices.shape != (len(self.dates), len(self.tickers)):
            raise DataError(
                f"price matrix shape {self.prices.shape} does not match "
                f"{len(self.dates)} dates x {len(self.tickers)} tickers"
            )
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DataError("dates must be strictly increasing")
        if not np.all(np.isfinite(self.prices)) or np.any(self.prices <= 0):
            raise DataError("non-positive price")


@dataclass(frozen=True)
class ReturnTable:
    dates: tuple[dt.date, ...]
    tickers: tuple[str, ...]
    returns: np.ndarray


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """One binary mean-variance selection problem.

    ``mu`` holds mean daily returns, ``sigma`` their covariance and ``gamma``
    the risk-aversion weight on the quadratic penalty.
    """

    tickers: tuple[str, ...]
    mu: np.ndarray
    sigma: np.ndarray
    gamma: float = DEFAULT_GAMMA
    label: str = ""

    def __post_init__(self):
        mu, sigma = check_moments(self.mu, self.sigma)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        if len(self.tickers) != mu.shape[0]:
            raise ValueError(f"{len(self.tickers)} tickers for {mu.shape[0]} assets")
        if len(set(self.tickers)) != len(self.tickers):
            raise ValueError("tickers must be distinct")
        gamma = float(self.gamma)
        if not math.isfinite(gamma) or gamma < 0:
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma!r}")
        object.__setattr__(self, "gamma", gamma)

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (
            self.tickers == other.tickers
            and self.label == other.label
            and self.gamma == other.gamma
            and np.array_equal(self.mu, other.mu)
            and np.array_equal(self.sigma, other.sigma)
        )

    __hash__ = None


def _parse_date(text: str, lineno: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise DataError(f"line {lineno}: invalid ISO-8601 date {text!r}") from None


def load_prices(path, tickers: Sequence[str] | None = None) -> PriceTable:
    """Read a price CSV and align it by dropping incomplete rows.

    Parameters
    ----------
    path : str or Path
        CSV file with header ``date,<ticker1>,<ticker2>,...``.
    tickers : sequence of str, optional
        Restrict to these columns. Only missing cells among the selected
        tickers cause a row to be dropped.

    Returns
    -------
    PriceTable
        ``dropped_rows`` holds the number of rows removed for missing values.

    Raises
    ------
    DataError
        On a malformed header, a non-numeric or non-positive price, or when
        fewer than two dates survive alignment.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if len(header) < 2 or header[0].lower() != "date":
            raise DataError(f"{path}: malformed header, expected 'date,<ticker>,...'")
        all_tickers = header[1:]
        if any(not t for t in all_tickers) or len(set(all_tickers)) != len(all_tickers):
            raise DataError(f"{path}: malformed header, empty or duplicate ticker")

        if tickers is None:
            selected = list(all_tickers)
        else:
            selected = list(tickers)
            unknown = [t for t in selected if t not in all_tickers]
            if unknown:
                raise DataError(f"{path}: unknown tickers {unknown}")
        cols = [all_tickers.index(t) + 1 for t in selected]

        dates, rows, dropped = [], [], 0
        for lineno, raw in enumerate(reader, start=2):
            if not raw or all(not c.strip() for c in raw):
                continue
            if len(raw) != len(header):
                raise DataError(f"{path}: line {lineno} has {len(raw)} fields, expected {len(header)}")
            date = _parse_date(raw[0], lineno)
            cells = [raw[c].strip() for c in cols]
            if any(c == "" for c in cells):
                dropped += 1
                continue
            values = []
            for c in cells:
                try:
                    v = float(c)
                except ValueError:
                    raise DataError(f"{path}: line {lineno}: non-numeric price {c!r}") from None
                if not math.isfinite(v):
                    raise DataError(f"{path}: line {lineno}: non-numeric price {c!r}")
                if v <= 0:
                    raise DataError(f"{path}: line {lineno}: non-positive price {c!r}")
                values.append(v)
            dates.append(date)
            rows.append(values)

    if dropped:
        logger.info("%s: dropped %d row(s) with missing prices", path, dropped)
    if len(dates) < 2:
        raise DataError(f"{path}: fewer than 2 dates after alignment")
    return PriceTable(tuple(dates), tuple(selected), np.array(rows, dtype=float), dropped)


def compute_returns(prices: PriceTable) -> ReturnTable:
    """Simple daily returns ``P[t] / P[t-1] - 1``, one row fewer than ``prices``."""
    p = prices.prices
    if p.shape[0] < 2:
        raise DataError("need at least 2 price rows to compute returns")
    return ReturnTable(prices.dates[1:], prices.tickers, p[1:] / p[:-1] - 1.0)


def estimate_moments(returns: ReturnTable) -> tuple[np.ndarray, np.ndarray]:
    """Column means and sample covariance (``T - 1`` denominator)."""
    r = np.asarray(returns.returns, dtype=float)
    if r.ndim != 2 or r.shape[0] < 2:
        raise DataError("need at least 2 return rows to estimate a covariance")
    mu = r.mean(axis=0)
    centered = r - mu
    sigma = centered.T @ centered / (r.shape[0] - 1)
    # the matrix product is symmetric only up to rounding
    sigma = np.triu(sigma) + np.triu(sigma, 1).T
    return mu, sigma


def universe_from_prices(prices: PriceTable, gamma: float = DEFAULT_GAMMA, label: str = "universe") -> ProblemInstance:
    mu, sigma = estimate_moments(compute_returns(prices))
    return ProblemInstance(prices.tickers, mu, sigma, gamma, label)


def sample_instance(universe: ProblemInstance, k: int, gamma: float = DEFAULT_GAMMA, seed: int = 0,
                    label: str | None = None) -> ProblemInstance:
    """Draw ``k`` distinct assets uniformly without replacement.

    The draw uses ``numpy.random.default_rng(seed)`` (PCG64), so a seed
    reproduces the same subset on every platform. Selected assets keep their
    universe order; ``mu`` and ``sigma`` are the matching sub-vector and
    principal submatrix.
    """
    seed = check_seed(seed)
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if k > universe.n:
        raise ValueError(f"k={k} exceeds universe size {universe.n}")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(universe.n, size=k, replace=False))
    return ProblemInstance(
        tickers=tuple(universe.tickers[i] for i in idx),
        mu=universe.mu[idx].copy(),
        sigma=universe.sigma[np.ix_(idx, idx)].copy(),
        gamma=gamma,
        label=label if label is not None else f"subset_seed{seed}",
    )


def instance_to_dict(instance: ProblemInstance) -> dict:
    return {
        "label": instance.label,
        "tickers": list(instance.tickers),
        "mu": instance.mu.tolist(),
        "sigma": instance.sigma.tolist(),
        "gamma": instance.gamma,
    }


def instance_from_dict(doc: dict) -> ProblemInstance:
    expected = {"label", "tickers", "mu", "sigma", "gamma"}
    if not isinstance(doc, dict) or set(doc) != expected:
        got = sorted(doc) if isinstance(doc, dict) else type(doc).__name__
        raise DataError(f"instance schema mismatch: expected keys {sorted(expected)}, got {got}")
    if not isinstance(doc["label"], str) or not all(isinstance(t, str) for t in doc["tickers"]):
        raise DataError("instance schema mismatch: label and tickers must be strings")
    try:
        return ProblemInstance(
            tickers=tuple(doc["tickers"]),
            mu=np.array(doc["mu"], dtype=float),
            sigma=np.array(doc["sigma"], dtype=float),
            gamma=doc["gamma"],
            label=doc["label"],
        )
    except (TypeError, ValueError) as exc:
        raise DataError(f"invalid instance: {exc}") from None


def save_instance(instance: ProblemInstance, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(instance_to_dict(instance), indent=2) + "\n", encoding="utf-8")
    return path


def load_instance(path) -> ProblemInstance:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from None
    try:
        return instance_from_dict(doc)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


class MomentEstimator(BaseEstimator):
    """Estimate mean returns and their covariance from a price table.

    Parameters
    ----------
    gamma : float, default=1.0
        Risk aversion attached to instances built from the fitted moments.

    Attributes
    ----------
    tickers_ : tuple of str
    mu_ : ndarray of shape (n_assets,)
    sigma_ : ndarray of shape (n_assets, n_assets)
    n_observations_ : int
        Number of return rows used.
    """

    def __init__(self, gamma: float = DEFAULT_GAMMA):
        self.gamma = gamma

    def fit(self, X, y=None):
        if not isinstance(X, PriceTable):
            raise TypeError(f"expected a PriceTable, got {type(X).__name__}")
        returns = compute_returns(X)
        self.mu_, self.sigma_ = estimate_moments(returns)
        self.tickers_ = X.tickers
        self.n_observations_ = returns.returns.shape[0]
        return self

    def transform(self, X):
        """Return the simple daily return matrix of ``X``."""
        check_is_fitted(self)
        return compute_returns(X).returns

    def to_instance(self, label: str = "universe") -> ProblemInstance:
        check_is_fitted(self)
        return ProblemInstance(self.tickers_, self.mu_, self.sigma_, self.gamma, label)

    def sample(self, k: int, seed: int, label: str | None = None) -> ProblemInstance:
        return sample_instance(self.to_instance(), k, self.gamma, seed, label)
