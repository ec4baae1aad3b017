"""Replicated searches over (m, p) grids, cell statistics and CSV export.

The seed of replication ``r`` in the cell ``(m, p_values[j])`` is
``derive_key(master_seed, m, j, r)``, so every cell and every replication can
run in any order, on any number of workers, and yield the same numbers.
Statistics are reduced from per-replication arrays held in replication
order, never from arrival order.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .landscape import NKLandscape, find_global_maximum, load, lookup_table
from .rng import derive_key
from .search import DEFAULT_MAX_TRIALS, SearchConfig, SearchOutcome, run_batch, run_search

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "m",
    "p",
    "replications",
    "n_success",
    "n_censored",
    "mean_cost",
    "std_error",
    "mean_t_star",
    "lower_bound_cost",
)
DEFAULT_M_VALUES = (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000)
DEFAULT_P_VALUES = (0.0, 0.1, 0.3, 0.5, 0.8, 0.95, 0.99, 1.0)
DEFAULT_REPLICATIONS = 10**4
_BATCH = 256


@dataclass(frozen=True)
class SweepSpec:
    landscape: str | Path | NKLandscape
    m_values: Sequence[int]
    p_values: Sequence[float]
    replications: int = DEFAULT_REPLICATIONS
    master_seed: int = 0
    max_trials: int = DEFAULT_MAX_TRIALS
    trace: bool = False

    def __post_init__(self):
        if not self.m_values or not self.p_values:
            raise ValueError("m_values and p_values must be non-empty")
        if any(m < 1 for m in self.m_values):
            raise ValueError(f"every m must be >= 1, got {list(self.m_values)}")
        if any(not 0.0 <= p <= 1.0 for p in self.p_values):
            raise ValueError(f"every p must be in [0, 1], got {list(self.p_values)}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if self.max_trials < 1:
            raise ValueError(f"max_trials must be >= 1, got {self.max_trials}")


@dataclass
class SweepCell:
    m: int
    p: float
    replications: int
    n_success: int
    n_censored: int
    mean_cost: float
    std_error: float
    mean_t_star: float
    lower_bound_cost: float
    optimal_m: bool = field(default=False, compare=False)
    optimal_p: bool = field(default=False, compare=False)
    trace: SearchOutcome | None = field(default=None, compare=False, repr=False)

    def row(self) -> tuple:
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


def replication_seed(master_seed: int, m: int, p_index: int, replication: int) -> int:
    return derive_key(master_seed, m, p_index, replication)


def summarize(m: int, p: float, n: int, success: np.ndarray, t_star: np.ndarray, max_trials: int) -> SweepCell:
    """Cell statistics from per-replication records (in replication order).

    ``mean_cost``, ``std_error`` and ``mean_t_star`` use successful runs only;
    with no successes ``mean_cost`` falls back to the censored lower bound and
    the other two are NaN. ``lower_bound_cost`` counts censored runs at the cap.
    """
    scale = m / 2.0**n
    reps = len(success)
    ok = t_star[success].astype(np.float64)
    n_success = len(ok)
    lower = scale * float(np.where(success, t_star, max_trials).mean())
    if n_success:
        mean_t = float(ok.mean())
        mean_cost = scale * mean_t
        std_error = scale * float(ok.std(ddof=1)) / math.sqrt(n_success) if n_success > 1 else math.nan
    else:
        mean_t, mean_cost, std_error = math.nan, lower, math.nan
    return SweepCell(m, float(p), reps, n_success, reps - n_success, mean_cost, std_error, mean_t, lower)


def _resolve_landscape(ref) -> NKLandscape:
    landscape = ref if isinstance(ref, NKLandscape) else load(ref)
    find_global_maximum(landscape)
    return landscape


def run_sweep(
    spec: SweepSpec,
    workers: int = 1,
    backend: str | None = None,
    on_cell: Callable[[SweepCell], None] | None = None,
) -> list[SweepCell]:
    """Run ``spec.replications`` searches for every ``(m, p)`` cell.

    Replications are split in fixed batches and farmed to ``workers`` threads
    (the numba kernels release the GIL). Cells come back sorted by ``(p, m)``;
    ``on_cell`` sees each cell as soon as it completes. With ``spec.trace``
    replication 0 of each cell is replayed with a model-fitness trace.
    """
    landscape = _resolve_landscape(spec.landscape)
    n = landscape.n
    # Fill caches before threads share the landscape.
    lookup_table(landscape)
    grid = [(j, p, m) for j, p in enumerate(spec.p_values) for m in spec.m_values]
    cells: list[SweepCell] = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for j, p, m in grid:
            seeds = [replication_seed(spec.master_seed, m, j, r) for r in range(spec.replications)]
            batches = [seeds[i : i + _BATCH] for i in range(0, len(seeds), _BATCH)]
            results = list(
                pool.map(lambda s: run_batch(landscape, m, p, s, spec.max_trials, backend), batches)
            )
            success = np.concatenate([r[0] for r in results])
            t_star = np.concatenate([r[1] for r in results])
            cell = summarize(m, p, n, success, t_star, spec.max_trials)
            if spec.trace:
                cfg = SearchConfig(m, p, seeds[0], spec.max_trials, record_trace=True)
                cell.trace = run_search(landscape, cfg, backend)
            log.info(
                "cell m=%d p=%g: mean_cost=%.5g censored=%d/%d", m, p, cell.mean_cost, cell.n_censored, cell.replications
            )
            cells.append(cell)
            if on_cell is not None:
                on_cell(cell)
    return sort_cells(cells)


def sort_cells(cells: Sequence[SweepCell]) -> list[SweepCell]:
    return sorted(cells, key=lambda c: (c.p, c.m))


def _cell_cost(cell: SweepCell) -> float:
    # Equal to mean_cost unless runs were censored, where it is the honest bound.
    return cell.lower_bound_cost


def optimal_group_size(cells: Sequence[SweepCell], p: float) -> tuple[int, float]:
    """Group size with the lowest mean cost at imitation probability ``p``.

    Cells are ranked by ``lower_bound_cost`` (the mean cost with censored runs
    charged at the cap); ties go to the smaller ``m``.
    """
    row = sorted((c for c in cells if c.p == p), key=lambda c: c.m)
    if len({c.m for c in row}) < 3:
        raise ValueError(f"need at least 3 distinct m at p={p}, got {len(row)}")
    best = min(row, key=lambda c: (_cell_cost(c), c.m))
    for c in row:
        c.optimal_m = c is best
    return best.m, _cell_cost(best)


def optimal_imitation_probability(cells: Sequence[SweepCell], m: int) -> tuple[float, float]:
    """Imitation probability with the lowest mean cost at group size ``m``."""
    row = sorted((c for c in cells if c.m == m), key=lambda c: c.p)
    if len({c.p for c in row}) < 3:
        raise ValueError(f"need at least 3 distinct p at m={m}, got {len(row)}")
    best = min(row, key=lambda c: (_cell_cost(c), c.p))
    for c in row:
        c.optimal_p = c is best
    return best.p, _cell_cost(best)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def format_csv(cells: Sequence[SweepCell]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for cell in sort_cells(cells):
        lines.append(",".join(_fmt(v) for v in cell.row()))
    return "\n".join(lines) + "\n"


def export_csv(cells: Sequence[SweepCell], destination: str | Path) -> None:
    Path(destination).write_text(format_csv(cells), encoding="utf-8", newline="\n")


def read_csv(source: str | Path) -> list[SweepCell]:
    with open(source, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{source}: unexpected columns {reader.fieldnames}")
        cells = []
        for rec in reader:
            cells.append(
                SweepCell(
                    m=int(rec["m"]),
                    p=float(rec["p"]),
                    replications=int(rec["replications"]),
                    n_success=int(rec["n_success"]),
                    n_censored=int(rec["n_censored"]),
                    mean_cost=float(rec["mean_cost"]),
                    std_error=float(rec["std_error"]),
                    mean_t_star=float(rec["mean_t_star"]),
                    lower_bound_cost=float(rec["lower_bound_cost"]),
                )
            )
    return cells
