"""Experiment orchestration, metrics and reporting."""

from .metrics import AggregatedSeries, RunTrace, aggregate, diversity, evals_to_optimum

__all__ = ["AggregatedSeries", "RunTrace", "aggregate", "diversity", "evals_to_optimum"]
