"""Hybrid quantum genetic algorithm on the cluster-factored simulator.

Each generation builds a fresh circuit over ``N * n`` qubits (individual ``i``,
gene ``g`` lives on qubit ``i * n + g``):

1. quantum elitism prepares the best-so-far individual on the slot of the
   previous generation's best measurement;
2. entangled crossover links each non-best gene, with probability
   ``entangle_prob``, to the matching elite qubit through a CX gate whose
   target sits in ``|0>``, so the target reproduces the elite outcome; the
   remaining (free) genes are re-prepared to their last measured bit;
3. Ry mutation rotates each free qubit by ``+/-mutation_angle`` with
   probability ``mutation_prob``.

One measurement shot then yields ``N`` bitstrings which are evaluated
classically. The run stops before the evaluation budget would be exceeded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_angle, check_count, check_probability, check_seed
from .market_data import ProblemInstance
from .objective import CountingEvaluator
from .qsim import QuantumRegister, new_register
from .results import GenerationRecord, RunResult

ELITISM_KINDS = ("pure", "reinforcement", "deterministic")


@dataclass(frozen=True)
class ElitismMode:
    kind: str = "deterministic"
    epsilon: float = math.pi / 16

    def __post_init__(self):
        kind = str(self.kind).lower()
        if kind not in ELITISM_KINDS:
            raise ValueError(f"elitism must be one of {ELITISM_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "reinforcement":
            check_angle(self.epsilon, "epsilon", 0.0, math.pi / 2)
            if self.epsilon >= math.pi / 2:
                raise ValueError("epsilon must be strictly below pi/2")

    @classmethod
    def pure(cls) -> "ElitismMode":
        return cls("pure")

    @classmethod
    def reinforcement(cls, epsilon: float = math.pi / 16) -> "ElitismMode":
        return cls("reinforcement", epsilon)

    @classmethod
    def deterministic(cls) -> "ElitismMode":
        return cls("deterministic")


@dataclass(frozen=True)
class ChromosomeLayout:
    population_size: int
    genes: int

    def __post_init__(self):
        check_count(self.population_size, "population_size", 2)
        check_count(self.genes, "genes", 1)

    @property
    def num_qubits(self) -> int:
        return self.population_size * self.genes

    def qubit(self, individual: int, gene: int) -> int:
        return individual * self.genes + gene

    def chromosome(self, individual: int) -> range:
        start = individual * self.genes
        return range(start, start + self.genes)


@dataclass(frozen=True)
class HqgaConfig:
    population_size: int = 3
    genes: int = 9
    mutation_prob: float = 0.3
    mutation_angle: float = math.pi / 2
    entangle_prob: float = 0.5
    elitism: ElitismMode = field(default_factory=ElitismMode)
    max_evaluations: int = 512
    seed: int = 0

    def __post_init__(self):
        check_count(self.population_size, "population_size", 2)
        check_count(self.genes, "genes", 1)
        check_probability(self.mutation_prob, "mutation_prob")
        check_probability(self.entangle_prob, "entangle_prob")
        check_angle(self.mutation_angle, "mutation_angle", 0.0, math.pi)
        check_count(self.max_evaluations, "max_evaluations", self.population_size)
        check_seed(self.seed)
        if isinstance(self.elitism, str):
            object.__setattr__(self, "elitism", ElitismMode(self.elitism))
        elif not isinstance(self.elitism, ElitismMode):
            raise ValueError(f"elitism must be an ElitismMode, got {self.elitism!r}")

    @property
    def layout(self) -> ChromosomeLayout:
        return ChromosomeLayout(self.population_size, self.genes)


@dataclass(frozen=True, eq=False)
class BestRecord:
    bits: np.ndarray
    value: float
    prep_angles: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, BestRecord):
            return NotImplemented
        return (
            self.value == other.value
            and np.array_equal(self.bits, other.bits)
            and np.array_equal(self.prep_angles, other.prep_angles)
        )

    __hash__ = None


def _check_register(register: QuantumRegister, layout: ChromosomeLayout) -> None:
    if register.num_qubits != layout.num_qubits:
        raise ValueError(
            f"register has {register.num_qubits} qubits, layout needs {layout.num_qubits}"
        )


def init_population(layout: ChromosomeLayout, register: QuantumRegister) -> QuantumRegister:
    """Put every qubit into uniform superposition."""
    _check_register(register, layout)
    for q in range(layout.num_qubits):
        register.h(q)
    return register


def marginal_angles(register: QuantumRegister, layout: ChromosomeLayout) -> np.ndarray:
    """Ry angles reproducing each qubit's marginal, shape ``(N, n)``."""
    p1 = np.array([register.probability_of(q, 1) for q in range(layout.num_qubits)])
    return (2.0 * np.arcsin(np.sqrt(np.clip(p1, 0.0, 1.0)))).reshape(layout.population_size, layout.genes)


def record_best_prep_angles(register: QuantumRegister, layout: ChromosomeLayout, best_index: int) -> np.ndarray:
    """``2 * arcsin(sqrt(P(1)))`` for each qubit of one chromosome.

    Must be called before measurement, since measuring collapses the marginals.
    """
    _check_register(register, layout)
    if not 0 <= best_index < layout.population_size:
        raise IndexError(f"best_index {best_index} out of range")
    p1 = np.array([register.probability_of(q, 1) for q in layout.chromosome(best_index)])
    return 2.0 * np.arcsin(np.sqrt(np.clip(p1, 0.0, 1.0)))


def measure_and_evaluate(register: QuantumRegister, layout: ChromosomeLayout,
                         evaluator: CountingEvaluator, rng: np.random.Generator):
    """One shot: returns bitstrings of shape ``(N, n)`` and their fitness values."""
    _check_register(register, layout)
    if evaluator.instance.n != layout.genes:
        raise ValueError(f"instance has {evaluator.instance.n} assets, layout has {layout.genes} genes")
    bits = register.measure_all(rng).reshape(layout.population_size, layout.genes)
    fits = np.array([evaluator.evaluate(b) for b in bits])
    return bits, fits


def best_index(fitnesses) -> int:
    """Index of the largest fitness; the lowest index wins ties."""
    return int(np.argmax(np.asarray(fitnesses)))


def select_best(bitstrings, fitnesses, incumbent: BestRecord | None = None,
                angles: np.ndarray | None = None) -> BestRecord:
    """Keep the incumbent unless the generation's best is strictly better.

    ``angles`` are the pre-measurement marginal angles of the whole
    population; the winner's row becomes the new record's ``prep_angles``.
    """
    fits = np.asarray(fitnesses, dtype=float)
    if fits.size == 0:
        raise ValueError("empty generation")
    i = best_index(fits)
    if incumbent is not None and not fits[i] > incumbent.value:
        return incumbent
    bits = np.asarray(bitstrings)[i].astype(np.int8).copy()
    if angles is None:
        prep = np.where(bits == 1, math.pi, 0.0)
    else:
        prep = np.asarray(angles, dtype=float)[i].copy()
    return BestRecord(bits, float(fits[i]), prep)


def reinforced_angles(best: BestRecord, epsilon: float) -> np.ndarray:
    """Rotate each stored angle by ``epsilon`` toward the elite's bit, clamped to ``[0, pi]``."""
    step = np.where(best.bits == 1, epsilon, -epsilon)
    return np.clip(best.prep_angles + step, 0.0, math.pi)


def apply_elitism(register: QuantumRegister, layout: ChromosomeLayout, best: BestRecord,
                  mode: ElitismMode, slot: int) -> QuantumRegister:
    """Prepare the best-so-far individual on chromosome ``slot``.

    The slot qubits must still be in ``|0>``.
    """
    _check_register(register, layout)
    if len(best.bits) != layout.genes or len(best.prep_angles) != layout.genes:
        raise ValueError("best record length does not match the chromosome length")
    qubits = layout.chromosome(slot)
    if mode.kind == "deterministic":
        for q, bit in zip(qubits, best.bits):
            if bit:
                register.x(q)
        return register
    angles = best.prep_angles if mode.kind == "pure" else reinforced_angles(best, mode.epsilon)
    for q, theta in zip(qubits, angles):
        if theta != 0.0:
            register.ry(float(theta), q)
    return register


def entangled_crossover(register: QuantumRegister, layout: ChromosomeLayout, best_index: int,
                        previous_bits: np.ndarray, config: HqgaConfig,
                        rng: np.random.Generator) -> np.ndarray:
    """Entangle non-best genes with the elite chromosome.

    Returns the boolean ``(N, n)`` mask of entangled positions; the elite row
    is always ``False``. Unselected genes are re-prepared to
    ``previous_bits``.
    """
    _check_register(register, layout)
    N, n = layout.population_size, layout.genes
    if not 0 <= best_index < N:
        raise IndexError(f"best_index {best_index} out of range")
    draws = rng.random((N, n))
    mask = draws < config.entangle_prob
    mask[best_index] = False
    for i in range(N):
        if i == best_index:
            continue
        for g in range(n):
            if mask[i, g]:
                register.cx(layout.qubit(best_index, g), layout.qubit(i, g))
            elif previous_bits[i, g]:
                register.x(layout.qubit(i, g))
    return mask


def ry_mutation(register: QuantumRegister, layout: ChromosomeLayout, entangled_mask: np.ndarray,
                best_index: int, config: HqgaConfig, rng: np.random.Generator) -> QuantumRegister:
    """Rotate free non-elite qubits by ``+/-mutation_angle`` with probability ``mutation_prob``."""
    N, n = layout.population_size, layout.genes
    hit = rng.random((N, n)) < config.mutation_prob
    signs = np.where(rng.random((N, n)) < 0.5, -1.0, 1.0)
    hit &= ~entangled_mask
    hit[best_index] = False
    for i, g in zip(*np.nonzero(hit)):
        register.ry(signs[i, g] * config.mutation_angle, layout.qubit(int(i), int(g)))
    return register


def run_hqga(instance: ProblemInstance, config: HqgaConfig, *, algorithm: str = "hqga",
             keep_registers: bool = False) -> RunResult:
    """Run the hybrid loop until the next generation would exceed the budget.

    Parameters
    ----------
    instance : ProblemInstance
    config : HqgaConfig
        ``config.genes`` must equal ``instance.n``.
    keep_registers : bool
        Attach the pre-measurement cluster sizes of every generation to the
        result as ``cluster_sizes`` (for diagnostics and tests).
    """
    if instance.n != config.genes:
        raise ValueError(f"instance has {instance.n} assets but config.genes={config.genes}")
    layout = config.layout
    N = layout.population_size
    rng = np.random.default_rng(config.seed)
    evaluator = CountingEvaluator(instance)
    result = RunResult(algorithm, instance.label, N, config.seed)
    cluster_sizes = []

    register = init_population(layout, new_register(layout.num_qubits))
    angles = marginal_angles(register, layout)
    if keep_registers:
        cluster_sizes.append(max(c.size for c in register.clusters))
    bits, fits = measure_and_evaluate(register, layout, evaluator, rng)
    best = select_best(bits, fits, None, angles)
    slot = best_index(fits)
    result.records.append(GenerationRecord(0, evaluator.count, fits, bits, best.value, None, best.bits.copy()))

    generation = 0
    while evaluator.count + N <= config.max_evaluations:
        generation += 1
        register = new_register(layout.num_qubits)
        apply_elitism(register, layout, best, config.elitism, slot)
        mask = entangled_crossover(register, layout, slot, bits, config, rng)
        ry_mutation(register, layout, mask, slot, config, rng)
        angles = marginal_angles(register, layout)
        if keep_registers:
            cluster_sizes.append(max(c.size for c in register.clusters))

        bits, fits = measure_and_evaluate(register, layout, evaluator, rng)
        updated = select_best(bits, fits, best, angles)
        if updated is best:
            # the elite slot carries the angles actually prepared this generation
            best = replace(best, prep_angles=angles[slot].copy())
        else:
            best = updated
        elite = slot
        slot = best_index(fits)
        result.records.append(
            GenerationRecord(generation, evaluator.count, fits, bits, best.value, elite, best.bits.copy())
        )

    result.best_bits = best.bits.copy()
    result.best_value = best.value
    result.evaluations = evaluator.count
    result.diagnostics["best_record"] = best
    if keep_registers:
        result.diagnostics["cluster_sizes"] = cluster_sizes
    return result


class HQGA(BaseEstimator):
    """Hybrid quantum genetic algorithm for binary portfolio selection.

    Parameters
    ----------
    population_size : int, default=3
        Number of quantum chromosomes ``N``.
    mutation_prob : float, default=0.3
        Probability that a free qubit receives an Ry rotation.
    mutation_angle : float, default=pi/2
        Magnitude of the Ry mutation rotation, in radians.
    entangle_prob : float, default=0.5
        Per-gene probability of entangling a non-best gene with the elite.
    elitism : {"deterministic", "pure", "reinforcement"}, default="deterministic"
    reinforcement_angle : float, default=pi/16
        Rotation toward the elite's bits used by reinforcement elitism.
    max_evaluations : int, default=512
        Fitness evaluation budget.
    random_state : int, default=0

    Attributes
    ----------
    result_ : RunResult
    best_bits_ : ndarray of shape (n_assets,)
    best_value_ : float
    n_evaluations_ : int
    """

    def __init__(self, population_size=3, mutation_prob=0.3, mutation_angle=math.pi / 2,
                 entangle_prob=0.5, elitism="deterministic", reinforcement_angle=math.pi / 16,
                 max_evaluations=512, random_state=0):
        self.population_size = population_size
        self.mutation_prob = mutation_prob
        self.mutation_angle = mutation_angle
        self.entangle_prob = entangle_prob
        self.elitism = elitism
        self.reinforcement_angle = reinforcement_angle
        self.max_evaluations = max_evaluations
        self.random_state = random_state

    def _config(self, n: int) -> HqgaConfig:
        return HqgaConfig(
            population_size=self.population_size,
            genes=n,
            mutation_prob=self.mutation_prob,
            mutation_angle=self.mutation_angle,
            entangle_prob=self.entangle_prob,
            elitism=ElitismMode(self.elitism, self.reinforcement_angle),
            max_evaluations=self.max_evaluations,
            seed=self.random_state,
        )

    def fit(self, X: ProblemInstance, y=None):
        if not isinstance(X, ProblemInstance):
            raise TypeError(f"expected a ProblemInstance, got {type(X).__name__}")
        self.result_ = run_hqga(X, self._config(X.n))
        self.best_bits_ = self.result_.best_bits
        self.best_value_ = self.result_.best_value
        self.n_evaluations_ = self.result_.evaluations
        return self

    @property
    def history_(self) -> list[GenerationRecord]:
        check_is_fitted(self, "result_")
        return self.result_.records
