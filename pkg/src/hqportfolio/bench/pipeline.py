"""The four pipeline stages behind the command-line interface."""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable

import numpy as np

from ..classical_ga import GaConfig, run_ga
from ..hqga import ElitismMode, HqgaConfig, run_hqga
from ..market_data import (
    DataError, ProblemInstance, load_instance, load_prices, sample_instance, save_instance,
    universe_from_prices,
)
from ..objective import bits_to_str, brute_force
from ..results import RunResult
from . import io
from .config import AlgorithmSpec, ConfigError, ExperimentConfig
from .metrics import STATISTICS, RunTrace, aggregate, evals_to_optimum

logger = logging.getLogger(__name__)

REPORT_FILES = {
    "best": "convergence_best.csv",
    "mean": "convergence_mean.csv",
    "worst": "convergence_worst.csv",
    "best_so_far": "convergence_best_so_far.csv",
    "diversity": "diversity.csv",
}
ETO_SUMMARY_COLUMNS = ("instance", "algorithm", "pop", "f_star", "runs", "successes",
                       "success_rate", "median_evals", "min_evals", "max_evals")
ETO_RUN_COLUMNS = ("instance", "algorithm", "pop", "seed", "evals_to_optimum")


def prepare(prices_path, k: int, gamma: float, subset_seeds: Iterable[int], out_dir) -> list[Path]:
    """Sample one instance file per subset seed from a price CSV."""
    universe = universe_from_prices(load_prices(prices_path), gamma)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for seed in subset_seeds:
        inst = sample_instance(universe, k, gamma, seed)
        written.append(save_instance(inst, out_dir / f"{inst.label}.json"))
    return written


def load_instances(paths: Iterable[Path]) -> list[ProblemInstance]:
    instances = [load_instance(p) for p in paths]
    labels = [i.label for i in instances]
    if len(set(labels)) != len(labels):
        raise DataError(f"duplicate instance labels {labels}")
    return instances


def instance_files(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"{directory}: instance directory not found")
    files = sorted(directory.glob("*.json"))
    if not files:
        raise DataError(f"{directory}: no instance files")
    return files


def brute(instances_dir, out_csv) -> list[tuple]:
    rows = []
    for inst in sorted(load_instances(instance_files(instances_dir)), key=lambda i: i.label):
        res = brute_force(inst)
        rows.append((inst.label, inst.n, bits_to_str(res.best), res.best_value, res.evaluations))
    Path(out_csv).parent.mkdir(parents=True, exist_ok=True)
    io.write_brute_csv(rows, out_csv)
    return rows


def make_runner(spec: AlgorithmSpec, pop: int, n: int, budget: int, seed: int):
    """Return a callable ``instance -> RunResult`` for one experiment cell."""
    params = dict(spec.params)
    try:
        if spec.type == "hqga":
            elitism = ElitismMode(params.pop("elitism", "deterministic"),
                                  params.pop("reinforcement_angle", ElitismMode().epsilon))
            cfg = HqgaConfig(population_size=pop, genes=n, elitism=elitism,
                             max_evaluations=budget, seed=seed, **params)
            return lambda inst: run_hqga(inst, cfg, algorithm=spec.name)
        cfg = GaConfig(population_size=pop, genes=n, max_evaluations=budget, seed=seed, **params)
        return lambda inst: run_ga(inst, cfg, algorithm=spec.name)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{spec.name}: {exc}") from None


def experiment_instances(config: ExperimentConfig) -> list[ProblemInstance]:
    if config.instances:
        return load_instances(config.instances)
    s = config.sampling
    universe = universe_from_prices(load_prices(s.prices), s.gamma)
    return [sample_instance(universe, s.k, s.gamma, seed) for seed in s.subset_seeds]


def run_file_name(algorithm: str, instance: str, pop: int, seed: int) -> str:
    return f"{algorithm}__{instance}__pop{pop}__seed{seed}.csv"


def run_experiment(config: ExperimentConfig, out_dir, jobs: int = 1) -> list[RunResult]:
    """Run every (algorithm, instance, population, seed) cell and write one CSV each.

    Cells are independent; with ``jobs > 1`` they run on a thread pool. The
    manifest is written in sorted cell order so output bytes do not depend on
    scheduling.
    """
    instances = experiment_instances(config)
    cells = []
    for spec in config.algorithms:
        for inst in instances:
            for pop in config.populations:
                for seed in config.seeds:
                    runner = make_runner(spec, pop, inst.n, config.max_evaluations, seed)
                    cells.append(((spec.name, inst.label, pop, seed), runner, inst))

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def work(cell):
        key, runner, inst = cell
        result = runner(inst)
        io.write_run_csv(RunTrace.from_result(result), out_dir / run_file_name(*key))
        return key, result

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(work, cells))
    else:
        done = [work(c) for c in cells]
    done.sort(key=lambda kv: kv[0])

    with (out_dir / "manifest.csv").open("w", newline="", encoding="utf-8") as fh:
        fh.write("algorithm,instance,pop,seed,file,evaluations,best_value,best_bits\n")
        for (alg, label, pop, seed), r in done:
            fh.write(f"{alg},{label},{pop},{seed},{run_file_name(alg, label, pop, seed)},"
                     f"{r.evaluations},{io.fmt(r.best_value)},{bits_to_str(r.best_bits)}\n")
    return [r for _, r in done]


def read_runs(runs_dir) -> list[RunTrace]:
    runs_dir = Path(runs_dir)
    if not runs_dir.is_dir():
        raise DataError(f"{runs_dir}: run directory not found")
    files = sorted(p for p in runs_dir.glob("*.csv") if p.name != "manifest.csv")
    if not files:
        raise DataError(f"{runs_dir}: no run files")
    return [io.read_run_csv(p) for p in files]


def _median(values: list[int]) -> str:
    return io.fmt(float(np.median(values))) if values else ""


def report(runs_dir, brute_csv, out_dir) -> dict[str, Path]:
    """Aggregate run CSVs into convergence, diversity and evaluations-to-optimum tables."""
    traces = read_runs(runs_dir)
    optima = io.read_brute_csv(brute_csv)
    groups: dict[tuple, list[RunTrace]] = defaultdict(list)
    for t in traces:
        groups[(t.instance, t.algorithm, t.pop)].append(t)
    keys = sorted(groups)
    for key in keys:
        groups[key].sort(key=lambda t: t.seed)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    for stat in STATISTICS:
        try:
            series = [(key, aggregate(groups[key], stat)) for key in keys]
        except ValueError as exc:
            raise DataError(str(exc)) from None
        written[stat] = io.write_aggregate_csv(series, out_dir / REPORT_FILES[stat])

    missing = sorted({k[0] for k in keys} - set(optima))
    if missing:
        raise DataError(f"{brute_csv}: no optimum for instances {missing}")
    summary_path = out_dir / "evals_to_optimum.csv"
    runs_path = out_dir / "evals_to_optimum_runs.csv"
    with summary_path.open("w", newline="", encoding="utf-8") as fs, \
            runs_path.open("w", newline="", encoding="utf-8") as fr:
        fs.write(",".join(ETO_SUMMARY_COLUMNS) + "\n")
        fr.write(",".join(ETO_RUN_COLUMNS) + "\n")
        for key in keys:
            f_star = optima[key[0]]["best_value"]
            hits = []
            for t in groups[key]:
                e = evals_to_optimum(t, f_star)
                fr.write(f"{key[0]},{key[1]},{key[2]},{t.seed},{'' if e is None else e}\n")
                if e is not None:
                    hits.append(e)
            n_runs = len(groups[key])
            fs.write(",".join([
                key[0], key[1], str(key[2]), io.fmt(f_star), str(n_runs), str(len(hits)),
                io.fmt(len(hits) / n_runs), _median(hits),
                str(min(hits)) if hits else "", str(max(hits)) if hits else "",
            ]) + "\n")
    written["evals_to_optimum"] = summary_path
    written["evals_to_optimum_runs"] = runs_path

    meta = {
        "std": "population standard deviation (ddof=0) across seeds",
        "grid": "one point per generation at its cumulative evaluation count",
        "optimum_tolerance": 1e-12,
        "groups": [{"instance": k[0], "algorithm": k[1], "pop": k[2], "runs": len(groups[k])} for k in keys],
    }
    meta_path = out_dir / "report_meta.json"
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    written["meta"] = meta_path
    return written
