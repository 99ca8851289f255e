"""Fixed-schema CSV readers and writers for run, brute-force and report tables."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..market_data import DataError
from .metrics import AggregatedSeries, RunTrace

RUN_COLUMNS = (
    "algorithm", "instance", "pop", "seed", "generation", "evaluations",
    "best", "mean", "worst", "diversity", "best_so_far",
)
BRUTE_COLUMNS = ("instance", "n", "best_bits", "best_value", "evaluations")
AGGREGATE_COLUMNS = ("instance", "algorithm", "pop", "evaluations", "stat_mean", "stat_std")


def fmt(value) -> str:
    """17 significant digits, enough to round-trip any double."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _read_rows(path: Path, columns: tuple[str, ...]) -> list[dict]:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != columns:
            raise DataError(f"{path}: schema mismatch, expected header {','.join(columns)}")
        return list(reader)


def write_run_csv(trace: RunTrace, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(RUN_COLUMNS)
        for k in range(len(trace.generation)):
            w.writerow([
                trace.algorithm, trace.instance, trace.pop, trace.seed,
                fmt(trace.generation[k]), fmt(trace.evaluations[k]),
                fmt(trace.best[k]), fmt(trace.mean[k]), fmt(trace.worst[k]),
                fmt(trace.diversity[k]), fmt(trace.best_so_far[k]),
            ])
    return path


def read_run_csv(path) -> RunTrace:
    rows = _read_rows(path, RUN_COLUMNS)
    if not rows:
        raise DataError(f"{path}: run file has no data rows")
    head = rows[0]
    ident = (head["algorithm"], head["instance"], head["pop"], head["seed"])
    if any((r["algorithm"], r["instance"], r["pop"], r["seed"]) != ident for r in rows):
        raise DataError(f"{path}: mixes several runs")
    try:
        col = lambda name, dtype=float: np.array([dtype(r[name]) for r in rows], dtype=dtype)  # noqa: E731
        return RunTrace(
            head["algorithm"], head["instance"], int(head["pop"]), int(head["seed"]),
            generation=col("generation", int), evaluations=col("evaluations", int),
            best=col("best"), mean=col("mean"), worst=col("worst"),
            diversity=col("diversity"), best_so_far=col("best_so_far"),
        )
    except ValueError as exc:
        raise DataError(f"{path}: bad value ({exc})") from None


def write_brute_csv(rows: list[tuple[str, int, str, float, int]], path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(BRUTE_COLUMNS)
        for label, n, bits, value, evals in rows:
            w.writerow([label, n, bits, fmt(value), evals])
    return path


def read_brute_csv(path) -> dict[str, dict]:
    out = {}
    for r in _read_rows(path, BRUTE_COLUMNS):
        try:
            out[r["instance"]] = {
                "n": int(r["n"]), "best_bits": r["best_bits"],
                "best_value": float(r["best_value"]), "evaluations": int(r["evaluations"]),
            }
        except ValueError as exc:
            raise DataError(f"{path}: bad value ({exc})") from None
    return out


def write_aggregate_csv(series: list[tuple[tuple[str, str, int], AggregatedSeries]], path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(AGGREGATE_COLUMNS)
        for (instance, algorithm, pop), s in series:
            for e, m, sd in zip(s.evaluations, s.mean, s.std):
                w.writerow([instance, algorithm, pop, fmt(e), fmt(m), fmt(sd)])
    return path


def read_aggregate_csv(path) -> list[dict]:
    return _read_rows(path, AGGREGATE_COLUMNS)
