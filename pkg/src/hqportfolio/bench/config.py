"""Experiment configuration files (JSON).

Example::

    {
      "sampling": {"prices": "@sample", "k": 9, "gamma": 1.0, "subset_seeds": [1, 2, 3, 4, 5]},
      "algorithms": [
        {"type": "hqga", "params": {"elitism": "deterministic"}},
        {"type": "ga"}
      ],
      "populations": [3, 5, 10],
      "repetitions": 20,
      "max_evaluations": 512
    }

``instances`` (a directory or a list of instance files) may replace
``sampling``. Relative paths resolve against the config file's directory and
``"@sample"`` names the bundled price file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..market_data import DataError

SAMPLE_PRICES = Path(__file__).resolve().parent.parent / "data" / "sample_prices.csv"
SAMPLE_INSTANCES = Path(__file__).resolve().parent.parent / "data" / "instances"
ALGORITHM_TYPES = ("hqga", "ga")

_HQGA_PARAMS = {"mutation_prob", "mutation_angle", "entangle_prob", "elitism", "reinforcement_angle"}
_GA_PARAMS = {"crossover_prob", "mutation_prob", "tournament_size", "elite_count"}


class ConfigError(ValueError):
    """Invalid value or structure in an experiment configuration."""


@dataclass(frozen=True)
class SamplingSpec:
    prices: Path
    k: int = 9
    gamma: float = 1.0
    subset_seeds: tuple[int, ...] = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    type: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    algorithms: tuple[AlgorithmSpec, ...]
    populations: tuple[int, ...] = (3, 5, 10)
    repetitions: int = 20
    max_evaluations: int = 512
    seed_offset: int = 0
    instances: tuple[Path, ...] = ()
    sampling: SamplingSpec | None = None
    output_dir: Path | None = None

    def __post_init__(self):
        if not self.instances and self.sampling is None:
            raise ConfigError("config needs either 'instances' or 'sampling'")
        if self.instances and self.sampling is not None:
            raise ConfigError("config may not give both 'instances' and 'sampling'")
        if not self.algorithms:
            raise ConfigError("config lists no algorithms")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate algorithm names {names}")
        if not self.populations or any(_bad_int(p, 2) for p in self.populations):
            raise ConfigError(f"populations must be integers >= 2, got {list(self.populations)}")
        if _bad_int(self.repetitions, 1):
            raise ConfigError(f"repetitions must be an integer >= 1, got {self.repetitions!r}")
        if _bad_int(self.max_evaluations, max(self.populations)):
            raise ConfigError("max_evaluations must be an integer >= every population size")
        if _bad_int(self.seed_offset, 0):
            raise ConfigError("seed_offset must be a non-negative integer")
        for path in self.instances:
            if not path.is_file():
                raise DataError(f"{path}: instance file not found")
        if self.sampling is not None and not self.sampling.prices.is_file():
            raise DataError(f"{self.sampling.prices}: price file not found")

    @property
    def seeds(self) -> range:
        return range(self.seed_offset, self.seed_offset + self.repetitions)


def _bad_int(value, minimum: int) -> bool:
    return isinstance(value, bool) or not isinstance(value, int) or value < minimum


def _resolve(base: Path, raw: str) -> Path:
    if raw == "@sample":
        return SAMPLE_PRICES
    if raw == "@instances":
        return SAMPLE_INSTANCES
    p = Path(raw)
    return p if p.is_absolute() else (base / p)


def _algorithm(entry) -> AlgorithmSpec:
    if isinstance(entry, str):
        entry = {"type": entry}
    if not isinstance(entry, dict) or "type" not in entry:
        raise ConfigError(f"algorithm entry needs a 'type': {entry!r}")
    kind = entry["type"]
    if kind not in ALGORITHM_TYPES:
        raise ConfigError(f"unknown algorithm type {kind!r}; choose from {ALGORITHM_TYPES}")
    params = dict(entry.get("params", {}))
    allowed = _HQGA_PARAMS if kind == "hqga" else _GA_PARAMS
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"unknown {kind} parameters {sorted(unknown)}")
    extra = set(entry) - {"type", "name", "params"}
    if extra:
        raise ConfigError(f"unknown algorithm keys {sorted(extra)}")
    name = entry.get("name", kind)
    if not isinstance(name, str) or not name or "__" in name or "/" in name:
        raise ConfigError(f"invalid algorithm name {name!r}")
    return AlgorithmSpec(name, kind, params)


def config_from_dict(doc: dict, base: Path = Path(".")) -> ExperimentConfig:
    known = {"instances", "sampling", "algorithms", "populations", "repetitions",
             "max_evaluations", "seed_offset", "output_dir"}
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")

    instances: tuple[Path, ...] = ()
    raw = doc.get("instances")
    if raw is not None:
        if isinstance(raw, str):
            folder = _resolve(base, raw)
            if not folder.is_dir():
                raise DataError(f"{folder}: instance directory not found")
            instances = tuple(sorted(folder.glob("*.json")))
            if not instances:
                raise DataError(f"{folder}: no instance files")
        else:
            instances = tuple(_resolve(base, p) for p in raw)

    sampling = None
    if doc.get("sampling") is not None:
        s = dict(doc["sampling"])
        extra = set(s) - {"prices", "k", "gamma", "subset_seeds"}
        if extra:
            raise ConfigError(f"unknown sampling keys {sorted(extra)}")
        try:
            sampling = SamplingSpec(
                prices=_resolve(base, s.get("prices", "@sample")),
                k=int(s.get("k", 9)),
                gamma=float(s.get("gamma", 1.0)),
                subset_seeds=tuple(int(v) for v in s.get("subset_seeds", (1, 2, 3, 4, 5))),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid sampling block: {exc}") from None

    out = doc.get("output_dir")
    return ExperimentConfig(
        algorithms=tuple(_algorithm(a) for a in doc.get("algorithms", ("hqga", "ga"))),
        populations=tuple(doc.get("populations", (3, 5, 10))),
        repetitions=doc.get("repetitions", 20),
        max_evaluations=doc.get("max_evaluations", 512),
        seed_offset=doc.get("seed_offset", 0),
        instances=instances,
        sampling=sampling,
        output_dir=_resolve(base, out) if out else None,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: config file not found")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return config_from_dict(doc, path.resolve().parent)
