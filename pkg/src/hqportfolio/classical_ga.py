"""Generational binary GA used as the classical baseline.

Same encoding, fitness oracle and telemetry as the quantum optimizer.
Elites keep their cached fitness, so a generation costs
``population_size - elite_count`` evaluations after the first one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_count, check_probability, check_seed
from .market_data import ProblemInstance
from .objective import CountingEvaluator
from .results import GenerationRecord, RunResult


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 3
    genes: int = 9
    crossover_prob: float = 0.9
    mutation_prob: float | None = 0.01  # per-bit; None means 1/genes
    tournament_size: int = 2
    elite_count: int = 1
    max_evaluations: int = 512
    seed: int = 0

    def __post_init__(self):
        check_count(self.population_size, "population_size", 2)
        check_count(self.genes, "genes", 1)
        check_probability(self.crossover_prob, "crossover_prob")
        if self.mutation_prob is None:
            object.__setattr__(self, "mutation_prob", 1.0 / self.genes)
        check_probability(self.mutation_prob, "mutation_prob")
        check_count(self.tournament_size, "tournament_size", 1)
        if self.tournament_size > self.population_size:
            raise ValueError("tournament_size cannot exceed population_size")
        check_count(self.elite_count, "elite_count", 0)
        if self.elite_count >= self.population_size:
            raise ValueError("elite_count must be smaller than population_size")
        check_count(self.max_evaluations, "max_evaluations", self.population_size)
        check_seed(self.seed)

    @property
    def evaluations_per_generation(self) -> int:
        return self.population_size - self.elite_count


def one_point_crossover(a, b, cut: int):
    """Swap the suffixes of ``a`` and ``b`` starting at position ``cut``."""
    a, b = np.asarray(a), np.asarray(b)
    n = a.shape[0]
    if b.shape[0] != n:
        raise ValueError("parents must have equal length")
    if not 1 <= cut <= n - 1:
        raise ValueError(f"cut must lie in [1, {n - 1}], got {cut}")
    return np.concatenate([a[:cut], b[cut:]]), np.concatenate([b[:cut], a[cut:]])


def bit_flip_mutation(x, p: float, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x, dtype=np.int8)
    flips = rng.random(x.shape[0]) < check_probability(p, "p")
    return x ^ flips.astype(np.int8)


def tournament_select(population, fitnesses, k: int, rng: np.random.Generator) -> np.ndarray:
    """Best of ``k`` distinct uniformly drawn contestants (lowest index on ties)."""
    N = len(fitnesses)
    if not 1 <= k <= N:
        raise ValueError(f"tournament size {k} must lie in [1, {N}]")
    contestants = np.sort(rng.choice(N, size=k, replace=False))
    fits = np.asarray(fitnesses)[contestants]
    return np.asarray(population[contestants[int(np.argmax(fits))]]).copy()


def elite_indices(fitnesses, count: int) -> np.ndarray:
    order = sorted(range(len(fitnesses)), key=lambda i: (-fitnesses[i], i))
    return np.array(order[:count], dtype=int)


def next_generation(population: np.ndarray, fitnesses: np.ndarray, config: GaConfig,
                    rng: np.random.Generator, evaluator: CountingEvaluator, *,
                    elite_count: int | None = None):
    """Produce and evaluate one offspring generation.

    ``elite_count`` overrides the config value and may equal the population
    size, in which case the population is returned unchanged and nothing is
    evaluated.
    """
    N, n = population.shape
    e = config.elite_count if elite_count is None else elite_count
    if not 0 <= e <= N:
        raise ValueError(f"elite_count must lie in [0, {N}]")
    elites = elite_indices(fitnesses, e)
    new_pop = [population[i].copy() for i in elites]
    new_fits = [float(fitnesses[i]) for i in elites]
    children = []
    while len(children) < N - e:
        a = tournament_select(population, fitnesses, config.tournament_size, rng)
        b = tournament_select(population, fitnesses, config.tournament_size, rng)
        if n > 1 and rng.random() < config.crossover_prob:
            a, b = one_point_crossover(a, b, int(rng.integers(1, n)))
        children.append(bit_flip_mutation(a, config.mutation_prob, rng))
        if len(children) < N - e:
            children.append(bit_flip_mutation(b, config.mutation_prob, rng))
    for child in children:
        new_pop.append(child)
        new_fits.append(evaluator.evaluate(child))
    return np.array(new_pop, dtype=np.int8).reshape(N, n), np.array(new_fits)


def run_ga(instance: ProblemInstance, config: GaConfig, *, algorithm: str = "ga") -> RunResult:
    """Run the GA until the next generation would exceed the evaluation budget."""
    if instance.n != config.genes:
        raise ValueError(f"instance has {instance.n} assets but config.genes={config.genes}")
    N, n = config.population_size, config.genes
    rng = np.random.default_rng(config.seed)
    evaluator = CountingEvaluator(instance)
    result = RunResult(algorithm, instance.label, N, config.seed)

    population = rng.integers(0, 2, size=(N, n)).astype(np.int8)
    fitnesses = np.array([evaluator.evaluate(x) for x in population])
    i = int(np.argmax(fitnesses))
    best_bits, best_value = population[i].copy(), float(fitnesses[i])
    result.records.append(
        GenerationRecord(0, evaluator.count, fitnesses, population.copy(), best_value, None, best_bits.copy())
    )

    generation = 0
    while evaluator.count + config.evaluations_per_generation <= config.max_evaluations:
        generation += 1
        population, fitnesses = next_generation(population, fitnesses, config, rng, evaluator)
        i = int(np.argmax(fitnesses))
        if fitnesses[i] > best_value:
            best_bits, best_value = population[i].copy(), float(fitnesses[i])
        result.records.append(
            GenerationRecord(generation, evaluator.count, fitnesses, population.copy(), best_value,
                             None, best_bits.copy())
        )

    result.best_bits = best_bits
    result.best_value = best_value
    result.evaluations = evaluator.count
    return result


class GeneticAlgorithm(BaseEstimator):
    """Classical generational GA with tournament selection and elitism.

    Parameters
    ----------
    population_size : int, default=3
    crossover_prob : float, default=0.9
        One-point crossover probability.
    mutation_prob : float or None, default=0.01
        Per-bit flip probability; ``None`` uses ``1 / n_assets``.
    tournament_size : int, default=2
    elite_count : int, default=1
    max_evaluations : int, default=512
    random_state : int, default=0
    """

    def __init__(self, population_size=3, crossover_prob=0.9, mutation_prob=0.01, tournament_size=2,
                 elite_count=1, max_evaluations=512, random_state=0):
        self.population_size = population_size
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.tournament_size = tournament_size
        self.elite_count = elite_count
        self.max_evaluations = max_evaluations
        self.random_state = random_state

    def _config(self, n: int) -> GaConfig:
        return GaConfig(
            population_size=self.population_size,
            genes=n,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            tournament_size=self.tournament_size,
            elite_count=self.elite_count,
            max_evaluations=self.max_evaluations,
            seed=self.random_state,
        )

    def fit(self, X: ProblemInstance, y=None):
        if not isinstance(X, ProblemInstance):
            raise TypeError(f"expected a ProblemInstance, got {type(X).__name__}")
        self.result_ = run_ga(X, self._config(X.n))
        self.best_bits_ = self.result_.best_bits
        self.best_value_ = self.result_.best_value
        self.n_evaluations_ = self.result_.evaluations
        return self

    @property
    def history_(self) -> list[GenerationRecord]:
        check_is_fitted(self, "result_")
        return self.result_.records
