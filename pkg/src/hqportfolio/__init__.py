"""Hybrid quantum genetic algorithm and classical GA for binary portfolio selection."""

from .classical_ga import GaConfig, GeneticAlgorithm, run_ga
from .hqga import HQGA, ElitismMode, HqgaConfig, run_hqga
from .market_data import (
    DataError, MomentEstimator, PriceTable, ProblemInstance, compute_returns, estimate_moments,
    load_instance, load_prices, sample_instance, save_instance,
)
from .objective import CountingEvaluator, brute_force, fitness
from .qsim import QuantumRegister, new_register
from .results import GenerationRecord, RunResult

__version__ = "0.1.0"

__all__ = [
    "CountingEvaluator", "DataError", "ElitismMode", "GaConfig", "GenerationRecord", "GeneticAlgorithm",
    "HQGA", "HqgaConfig", "MomentEstimator", "PriceTable", "ProblemInstance", "QuantumRegister",
    "RunResult", "brute_force", "compute_returns", "estimate_moments", "fitness", "load_instance",
    "load_prices", "new_register", "run_ga", "run_hqga", "sample_instance", "save_instance",
]
