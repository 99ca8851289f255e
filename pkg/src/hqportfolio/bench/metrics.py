"""Diversity, evaluations-to-optimum and cross-run aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..objective import OPTIMUM_ATOL
from ..results import GenerationRecord, RunResult

STATISTICS = ("best", "mean", "worst", "diversity", "best_so_far")


@dataclass(frozen=True, eq=False)
class RunTrace:
    """Column view of one run, as stored in a run CSV."""

    algorithm: str
    instance: str
    pop: int
    seed: int
    generation: np.ndarray
    evaluations: np.ndarray
    best: np.ndarray
    mean: np.ndarray
    worst: np.ndarray
    diversity: np.ndarray
    best_so_far: np.ndarray

    @classmethod
    def from_result(cls, run: RunResult) -> "RunTrace":
        recs = run.records
        return cls(
            run.algorithm, run.instance, run.population_size, run.seed,
            generation=np.array([r.generation for r in recs], dtype=np.int64),
            evaluations=np.array([r.evaluations for r in recs], dtype=np.int64),
            best=np.array([r.best for r in recs]),
            mean=np.array([r.mean for r in recs]),
            worst=np.array([r.worst for r in recs]),
            diversity=np.array([diversity(r) for r in recs]),
            best_so_far=np.array([r.best_so_far for r in recs]),
        )

    @property
    def key(self) -> tuple:
        return (self.instance, self.algorithm, self.pop, self.seed)


def as_trace(run) -> RunTrace:
    return run if isinstance(run, RunTrace) else RunTrace.from_result(run)


def diversity(record) -> float:
    """``max(f) - mean(f)`` over one generation's fitness values.

    Accepts a ``GenerationRecord`` or a plain sequence of fitness values.
    """
    fits = record.fitnesses if isinstance(record, GenerationRecord) else record
    fits = np.asarray(fits, dtype=float)
    if fits.size == 0:
        raise ValueError("diversity of an empty generation")
    return max(float(fits.max() - fits.mean()), 0.0)


def evals_to_optimum(run, f_star: float, atol: float = OPTIMUM_ATOL) -> int | None:
    """First cumulative evaluation count whose best-so-far reaches ``f_star - atol``."""
    trace = as_trace(run)
    hits = np.flatnonzero(trace.best_so_far >= f_star - atol)
    return int(trace.evaluations[hits[0]]) if hits.size else None


@dataclass(frozen=True, eq=False)
class AggregatedSeries:
    statistic: str
    evaluations: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    n_runs: int

    def area(self) -> float:
        """Trapezoidal area of the mean curve over the evaluation axis."""
        x, y = self.evaluations.astype(float), self.mean
        if x.size < 2:
            return 0.0
        return float(np.sum((x[1:] - x[:-1]) * (y[1:] + y[:-1]) / 2.0))


def aggregate(runs, statistic: str) -> AggregatedSeries:
    """Pointwise mean and population standard deviation across runs.

    All runs must share one evaluation grid.
    """
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}; choose from {STATISTICS}")
    traces = [as_trace(r) for r in runs]
    if not traces:
        raise ValueError("no runs to aggregate")
    grid = traces[0].evaluations
    for t in traces[1:]:
        if not np.array_equal(t.evaluations, grid):
            raise ValueError(f"mismatched evaluation grids ({t.key} vs {traces[0].key})")
    values = np.vstack([getattr(t, statistic) for t in traces])
    return AggregatedSeries(statistic, grid.copy(), values.mean(axis=0), values.std(axis=0, ddof=0), len(traces))
