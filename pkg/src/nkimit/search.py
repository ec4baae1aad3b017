"""Imitative-learning group search on an NK landscape.

A group of ``m`` agents each holds a genotype. At every trial the agents
update in index order ``0..m-1``. Before each update the model (fittest
agent, lowest index on ties) is recomputed over the current group. With
probability ``p`` the agent copies one uniformly chosen bit in which it
differs from the model; if it already equals the model, or with probability
``1 - p``, it flips one uniformly chosen bit. The search halts as soon as any
agent moves onto the global maximum. Only genotypes produced by a move
count as hits, so ``t_star >= 1``; ``check_initial=True`` also accepts a hit
in the initial population, reported as ``t_star = 0``.

Random draws are addressed by counter so that both backends agree exactly:
the initial genotype of agent ``a`` is the top ``n`` bits of draw ``a`` of the
init stream, and the update of agent ``a`` at trial ``t`` reads draws
``2*((t-1)*m + a)`` (imitate or not) and ``2*((t-1)*m + a) + 1`` (which bit)
of the move stream.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from ._jit import resolve_backend
from .landscape import NKLandscape, find_global_maximum, fitness, fitness_many, lookup_table
from .rng import draw_u64_array, draw_uniform_array, search_keys

DEFAULT_MAX_TRIALS = 10**6
_CHUNK_ELEMS = 1 << 16


@dataclass(frozen=True)
class SearchConfig:
    m: int
    p: float
    seed: int
    max_trials: int = DEFAULT_MAX_TRIALS
    record_trace: bool = False
    check_initial: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if self.max_trials < 1:
            raise ValueError(f"max_trials must be >= 1, got {self.max_trials}")


@dataclass
class AgentPopulation:
    genotypes: np.ndarray
    fitnesses: np.ndarray

    @property
    def m(self) -> int:
        return len(self.genotypes)


@dataclass(frozen=True)
class SearchOutcome:
    """Result of one search.

    ``cost`` is the rescaled cost ``m * t_star / 2**n``; for a censored run
    (``success`` false) it is evaluated at ``t_star = max_trials``.
    ``trace`` holds the model fitness after each trial when requested.
    """

    success: bool
    t_star: int
    cost: float
    finder: int | None
    m: int
    n: int
    trace: np.ndarray | None = None

    @property
    def censored(self) -> bool:
        return not self.success


def rescaled_cost(m: int, t_star: int, n: int) -> float:
    return m * t_star / 2**n


# --- elementary operations ------------------------------------------------


def init_population(landscape: NKLandscape, m: int, key_init: int) -> AgentPopulation:
    """``m`` genotypes with i.i.d. uniform bits from the init stream ``key_init``."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    raw = draw_u64_array(key_init, np.arange(m, dtype=np.uint64))
    genotypes = (raw >> np.uint64(64 - landscape.n)).astype(np.int64)
    return AgentPopulation(genotypes, _fitness_of(landscape, genotypes))


def elementary_move(g: int, n: int, u: float) -> int:
    """Flip bit ``floor(u * n)`` of ``g``; ``u`` is uniform on ``[0, 1)``."""
    return int(g) ^ (1 << int(u * n))


def imitation_move(target: int, model: int, n: int, u: float) -> int:
    """Copy one differing bit from ``model``, chosen by ``u`` among them.

    Differing positions are ranked from the least significant; ``u`` selects
    rank ``floor(u * count)``. Identical strings fall back to an elementary
    move.
    """
    diff = int(target) ^ int(model)
    if diff == 0:
        return elementary_move(target, n, u)
    positions = [j for j in range(n) if (diff >> j) & 1]
    return int(target) ^ (1 << positions[int(u * len(positions))])


def find_model(pop: AgentPopulation) -> int:
    """Index of the fittest agent; lowest index among ties."""
    return int(np.argmax(pop.fitnesses))


def _fitness_of(landscape: NKLandscape, genotypes) -> np.ndarray:
    table = lookup_table(landscape)
    if table.size:
        return table[np.asarray(genotypes, dtype=np.int64)]
    return fitness_many(landscape, genotypes)


def run_trial(
    pop: AgentPopulation,
    landscape: NKLandscape,
    p: float,
    u_imitate: np.ndarray,
    u_bit: np.ndarray,
) -> tuple[bool, int | None]:
    """Update every agent once, in place; stop at the first global-maximum hit.

    ``u_imitate[a]`` decides between imitation and an elementary move for
    agent ``a``; ``u_bit[a]`` picks the bit. Returns ``(found, finder)``.
    """
    g_max = find_global_maximum(landscape)[0]
    table = lookup_table(landscape)
    n = landscape.n
    genotypes, fitnesses = pop.genotypes, pop.fitnesses
    for a in range(pop.m):
        g = int(genotypes[a])
        if p > 0.0 and u_imitate[a] < p:
            model = find_model(pop)
            g = imitation_move(g, int(genotypes[model]), n, u_bit[a])
        else:
            g = elementary_move(g, n, u_bit[a])
        genotypes[a] = g
        fitnesses[a] = table[g] if table.size else fitness(landscape, g)
        if g == g_max:
            return True, a
    return False, None


# --- full search ----------------------------------------------------------


def run_search(landscape: NKLandscape, cfg: SearchConfig, backend: str | None = None) -> SearchOutcome:
    """Run one imitative search until the global maximum is hit or the cap.

    ``backend`` is ``"numba"`` or ``"numpy"``; ``None`` picks numba unless
    ``NKIMIT_DISABLE_NUMBA`` is set. Both give identical outcomes.
    """
    backend = resolve_backend(backend)
    g_max = find_global_maximum(landscape)[0]
    key_init, key_move = search_keys(cfg.seed)
    if backend == "numba":
        ok, t_star, finder, trace = _kernels.search_kernel(
            lookup_table(landscape),
            landscape.tables,
            landscape.n,
            landscape.k,
            cfg.m,
            float(cfg.p),
            g_max,
            cfg.max_trials,
            np.uint64(key_init),
            np.uint64(key_move),
            cfg.record_trace,
            cfg.check_initial,
        )
        ok, t_star, finder = bool(ok), int(t_star), int(finder)
        trace = np.array(trace) if cfg.record_trace else None
    elif cfg.p == 0.0:
        ok, t_star, finder, trace = _independent_numpy(landscape, cfg, g_max, key_init, key_move)
    else:
        ok, t_star, finder, trace = _imitative_numpy(landscape, cfg, g_max, key_init, key_move)
    return SearchOutcome(
        success=ok,
        t_star=t_star,
        cost=rescaled_cost(cfg.m, t_star, landscape.n),
        finder=finder if ok else None,
        m=cfg.m,
        n=landscape.n,
        trace=trace,
    )


def _imitative_numpy(landscape, cfg, g_max, key_init, key_move):
    pop = init_population(landscape, cfg.m, key_init)
    trace = [] if cfg.record_trace else None
    hits = np.flatnonzero(pop.genotypes == g_max) if cfg.check_initial else ()
    if len(hits):
        return True, 0, int(hits[0]), _trace_array(trace)
    m = cfg.m
    agents = np.arange(m, dtype=np.uint64)
    for t in range(1, cfg.max_trials + 1):
        ctr = np.uint64(2) * (np.uint64((t - 1) * m) + agents)
        u_imitate = draw_uniform_array(key_move, ctr)
        u_bit = draw_uniform_array(key_move, ctr + np.uint64(1))
        found, finder = run_trial(pop, landscape, cfg.p, u_imitate, u_bit)
        if trace is not None:
            trace.append(pop.fitnesses.max())
        if found:
            return True, t, finder, _trace_array(trace)
    return False, cfg.max_trials, -1, _trace_array(trace)


def _independent_numpy(landscape, cfg, g_max, key_init, key_move):
    """p = 0: agents are independent walks, vectorized over blocks of trials."""
    pop = init_population(landscape, cfg.m, key_init)
    g = pop.genotypes
    trace = [] if cfg.record_trace else None
    hits = np.flatnonzero(g == g_max) if cfg.check_initial else ()
    if len(hits):
        return True, 0, int(hits[0]), _trace_array(trace)
    m, n = cfg.m, landscape.n
    block = max(1, _CHUNK_ELEMS // m)
    agents = np.arange(m, dtype=np.uint64)
    t0 = 0
    while t0 < cfg.max_trials:
        rows = min(block, cfg.max_trials - t0)
        trials = np.arange(t0, t0 + rows, dtype=np.uint64)[:, None]
        ctr = np.uint64(2) * (trials * np.uint64(m) + agents[None, :]) + np.uint64(1)
        flips = np.left_shift(1, (draw_uniform_array(key_move, ctr) * n).astype(np.int64))
        walk = g[None, :] ^ np.bitwise_xor.accumulate(flips, axis=0)
        hit = walk == g_max
        if hit.any():
            row, finder = divmod(int(np.argmax(hit.ravel())), m)
            if trace is not None:
                trace.extend(_fitness_of(landscape, walk[:row]).max(axis=1))
                trace.append(find_global_maximum(landscape)[1])
            return True, t0 + row + 1, finder, _trace_array(trace)
        if trace is not None:
            trace.extend(_fitness_of(landscape, walk).max(axis=1))
        g = walk[-1]
        t0 += rows
    return False, cfg.max_trials, -1, _trace_array(trace)


def _trace_array(trace):
    return None if trace is None else np.asarray(trace, dtype=np.float64)


def run_batch(
    landscape: NKLandscape,
    m: int,
    p: float,
    seeds,
    max_trials: int = DEFAULT_MAX_TRIALS,
    backend: str | None = None,
    check_initial: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Run one search per seed; return ``(success, t_star)`` arrays."""
    backend = resolve_backend(backend)
    seeds = [int(s) for s in seeds]
    success = np.zeros(len(seeds), dtype=np.bool_)
    t_star = np.zeros(len(seeds), dtype=np.int64)
    if backend == "numba":
        keys = np.array([search_keys(s) for s in seeds], dtype=np.uint64).reshape(-1, 2)
        _kernels.search_batch(
            lookup_table(landscape),
            landscape.tables,
            landscape.n,
            landscape.k,
            m,
            float(p),
            find_global_maximum(landscape)[0],
            max_trials,
            keys[:, 0].copy(),
            keys[:, 1].copy(),
            check_initial,
            success,
            t_star,
        )
    else:
        for r, seed in enumerate(seeds):
            out = run_search(landscape, SearchConfig(m, p, seed, max_trials, check_initial=check_initial), backend="numpy")
            success[r] = out.success
            t_star[r] = out.t_star
    return success, t_star


# --- trace export ---------------------------------------------------------

TRACE_COLUMNS = ("trial", "model_fitness", "model_relative_fitness")


def trace_rows(outcome: SearchOutcome, landscape: NKLandscape) -> list[tuple[int, float, float]]:
    if outcome.trace is None:
        return []
    f_max = find_global_maximum(landscape)[1]
    return [(t, float(f), float(f) / f_max) for t, f in enumerate(outcome.trace, start=1)]


def export_trace(outcome: SearchOutcome, landscape: NKLandscape, destination: str | Path) -> None:
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for t, f, rel in trace_rows(outcome, landscape):
            writer.writerow((t, f"{f:.17g}", f"{rel:.17g}"))
