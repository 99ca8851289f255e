"""Per-generation telemetry shared by the quantum and classical optimizers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class GenerationRecord:
    generation: int
    evaluations: int
    fitnesses: np.ndarray
    bitstrings: np.ndarray
    best_so_far: float
    elite_index: int | None = None
    incumbent_bits: np.ndarray | None = None

    @property
    def best(self) -> float:
        return float(self.fitnesses.max())

    @property
    def mean(self) -> float:
        return float(self.fitnesses.mean())

    @property
    def worst(self) -> float:
        return float(self.fitnesses.min())

    @property
    def diversity(self) -> float:
        """Gap between the best and the average fitness of the generation."""
        return max(self.best - self.mean, 0.0)

    def __eq__(self, other):
        if not isinstance(other, GenerationRecord):
            return NotImplemented
        return (
            self.generation == other.generation
            and self.evaluations == other.evaluations
            and self.best_so_far == other.best_so_far
            and self.elite_index == other.elite_index
            and np.array_equal(self.fitnesses, other.fitnesses)
            and np.array_equal(self.bitstrings, other.bitstrings)
            and np.array_equal(self.incumbent_bits, other.incumbent_bits)
        )

    __hash__ = None


@dataclass(eq=False)
class RunResult:
    algorithm: str
    instance: str
    population_size: int
    seed: int
    records: list[GenerationRecord] = field(default_factory=list)
    best_bits: np.ndarray | None = None
    best_value: float = -np.inf
    evaluations: int = 0
    diagnostics: dict = field(default_factory=dict)

    def best_so_far_trace(self) -> np.ndarray:
        return np.array([r.best_so_far for r in self.records])

    def evaluation_axis(self) -> np.ndarray:
        return np.array([r.evaluations for r in self.records], dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, RunResult):
            return NotImplemented
        return (
            (self.algorithm, self.instance, self.population_size, self.seed, self.best_value, self.evaluations)
            == (other.algorithm, other.instance, other.population_size, other.seed, other.best_value, other.evaluations)
            and np.array_equal(self.best_bits, other.best_bits)
            and self.records == other.records
        )

    __hash__ = None
