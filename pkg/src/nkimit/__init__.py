"""Imitative-learning group search on NK fitness landscapes."""

from .analytic import IndependentBaseline, mean_cost_independent, second_largest_eigenvalue
from .harness import SweepCell, SweepSpec, run_sweep
from .landscape import NKLandscape, enumerate_maxima, find_global_maximum, fitness, generate, load, save
from .search import SearchConfig, SearchOutcome, run_search

__all__ = [
    "IndependentBaseline",
    "NKLandscape",
    "SearchConfig",
    "SearchOutcome",
    "SweepCell",
    "SweepSpec",
    "enumerate_maxima",
    "find_global_maximum",
    "fitness",
    "generate",
    "load",
    "mean_cost_independent",
    "run_search",
    "run_sweep",
    "save",
    "second_largest_eigenvalue",
]
