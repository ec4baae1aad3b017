"""NK fitness landscapes: generation, evaluation, exhaustive analysis and I/O.

Genotypes are plain ints in ``[0, 2**n)`` with bit ``i`` holding component
``x_i``. Component ``i`` reads the substate ``(x_i, x_{i+1}, ..., x_{i+k})``
with indices taken modulo ``n``; the table row index is

    x_i * 2**0 + x_{i+1} * 2**1 + ... + x_{i+k} * 2**k

("lsb-first-substate"). Changing this breaks every saved landscape.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .rng import MASK64, derive_key, draw_uniform_array

MAX_N = 30
# Full fitness lookup tables are cached up to this size (2**24 doubles = 128 MiB).
LOOKUP_MAX_N = 24
FORMAT_VERSION = 1
ENCODING = "lsb-first-substate"
RNG_NAME = "splitmix64-counter"
_CHUNK = 1 << 22


class LandscapeFormatError(ValueError):
    """A landscape file is malformed."""


class NKLandscape:
    """Immutable NK landscape.

    Parameters
    ----------
    n : int
        String length ``N``.
    k : int
        Epistasis ``K``; each component reads itself and its ``k`` right
        neighbours.
    tables : array_like, shape (n, 2**(k+1))
        Component fitness contributions in ``[0, 1)``.
    seed : int or None
        Seed that generated ``tables``; ``None`` for hand-built landscapes.
    """

    def __init__(self, n: int, k: int, tables, seed: int | None = None):
        _check_nk(n, k)
        tables = np.array(tables, dtype=np.float64)
        width = 1 << (k + 1)
        if tables.shape != (n, width):
            raise ValueError(f"tables must have shape ({n}, {width}), got {tables.shape}")
        if not np.all((tables >= 0.0) & (tables < 1.0)):
            raise ValueError("table entries must lie in [0, 1)")
        tables.setflags(write=False)
        self.n = int(n)
        self.k = int(k)
        self.tables = tables
        self.seed = None if seed is None else int(seed)
        self._global_max: tuple[int, float] | None = None
        self._fitness_all: np.ndarray | None = None

    def __repr__(self) -> str:
        return f"NKLandscape(n={self.n}, k={self.k}, seed={self.seed})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, NKLandscape):
            return NotImplemented
        return (
            self.n == other.n
            and self.k == other.k
            and self.seed == other.seed
            and np.array_equal(self.tables, other.tables)
        )

    __hash__ = None

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def global_max(self) -> int:
        return find_global_maximum(self)[0]

    @property
    def global_max_fitness(self) -> float:
        return find_global_maximum(self)[1]

    @property
    def analyzed(self) -> bool:
        return self._global_max is not None


def _check_nk(n: int, k: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"n must be an integer, got {n!r}")
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise ValueError(f"k must be an integer, got {k!r}")
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in [1, {MAX_N}], got {n}")
    if not 0 <= k <= n - 1:
        raise ValueError(f"k must be in [0, n-1] = [0, {n - 1}], got {k}")


def generate(n: int, k: int, seed: int) -> NKLandscape:
    """Draw a landscape with i.i.d. uniform ``[0, 1)`` tables.

    Entry ``(i, s)`` is uniform draw number ``i * 2**(k+1) + s`` of the
    stream keyed by ``derive_key(seed, n, k)``.
    """
    _check_nk(n, k)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    width = 1 << (k + 1)
    key = derive_key(seed, n, k)
    tables = draw_uniform_array(key, np.arange(n * width, dtype=np.uint64)).reshape(n, width)
    return NKLandscape(n, k, tables, seed=seed)


# --- genotypes -----------------------------------------------------------


def to_bits(g: int, n: int) -> tuple[int, ...]:
    return tuple((g >> i) & 1 for i in range(n))


def from_bits(bits: Iterable[int]) -> int:
    g = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bit {i} is {b!r}, expected 0 or 1")
        g |= int(b) << i
    return g


def hamming(a: int, b: int) -> int:
    return (int(a) ^ int(b)).bit_count()


def _as_genotype(landscape: NKLandscape, g) -> int:
    n = landscape.n
    if isinstance(g, (int, np.integer)) and not isinstance(g, bool):
        g = int(g)
        if not 0 <= g < (1 << n):
            raise ValueError(f"genotype {g} out of range for n={n}")
        return g
    bits = list(g)
    if len(bits) != n:
        raise ValueError(f"genotype has length {len(bits)}, landscape has n={n}")
    return from_bits(bits)


# --- evaluation ----------------------------------------------------------


def substate_index(g: int, n: int, k: int, i: int) -> int:
    idx = 0
    for b in range(k + 1):
        idx |= ((g >> ((i + b) % n)) & 1) << b
    return idx


def fitness(landscape: NKLandscape, g) -> float:
    """Mean of the ``n`` component contributions of genotype ``g``.

    ``g`` may be an int or a sequence of ``n`` bits.
    """
    g = _as_genotype(landscape, g)
    n, k, tables = landscape.n, landscape.k, landscape.tables
    total = 0.0
    for i in range(n):
        total += tables[i, substate_index(g, n, k, i)]
    return total / n


def fitness_many(landscape: NKLandscape, genotypes) -> np.ndarray:
    """Vectorized fitness; same summation order as :func:`fitness`."""
    g = np.asarray(genotypes, dtype=np.int64)
    n, k, tables = landscape.n, landscape.k, landscape.tables
    total = np.zeros(g.shape, dtype=np.float64)
    for i in range(n):
        idx = np.zeros(g.shape, dtype=np.int64)
        for b in range(k + 1):
            idx |= ((g >> ((i + b) % n)) & 1) << b
        total += tables[i, idx]
    return total / n


def all_fitness(landscape: NKLandscape) -> np.ndarray:
    """Fitness of every genotype, indexed by integer genotype.

    Cached on the landscape when ``n <= LOOKUP_MAX_N``.
    """
    if landscape._fitness_all is not None:
        return landscape._fitness_all
    size = landscape.size
    out = np.empty(size, dtype=np.float64)
    for start in range(0, size, _CHUNK):
        stop = min(start + _CHUNK, size)
        out[start:stop] = fitness_many(landscape, np.arange(start, stop, dtype=np.int64))
    out.setflags(write=False)
    if landscape.n <= LOOKUP_MAX_N:
        landscape._fitness_all = out
    return out


def lookup_table(landscape: NKLandscape) -> np.ndarray:
    """Full fitness table if it fits the cache budget, else an empty array."""
    if landscape.n <= LOOKUP_MAX_N:
        return all_fitness(landscape)
    return np.empty(0, dtype=np.float64)


# --- exhaustive analysis -------------------------------------------------


def find_global_maximum(landscape: NKLandscape) -> tuple[int, float]:
    """Return ``(genotype, fitness)`` of the global maximum, caching it.

    For ``k == 0`` each component independently takes its better state
    (state 1 on a tie); otherwise all ``2**n`` genotypes are scanned and the
    lowest-index argmax wins.
    """
    if landscape._global_max is not None:
        return landscape._global_max
    if landscape.k == 0:
        t = landscape.tables
        g = from_bits(0 if t[i, 0] > t[i, 1] else 1 for i in range(landscape.n))
    else:
        g = int(np.argmax(all_fitness(landscape)))
    landscape._global_max = (g, fitness(landscape, g))
    return landscape._global_max


def brute_force_maximum(landscape: NKLandscape) -> tuple[int, float]:
    """Exhaustive argmax, never cached; the check for the ``k == 0`` shortcut."""
    f = all_fitness(landscape)
    g = int(np.argmax(f))
    return g, float(f[g])


class MaximumEntry(NamedTuple):
    genotype: int
    fitness: float
    relative_fitness: float
    distance: int


@dataclass(frozen=True)
class MaximaReport:
    entries: list[MaximumEntry] = field(default_factory=list)

    @property
    def count_total(self) -> int:
        return len(self.entries)

    @property
    def count_local(self) -> int:
        return len(self.entries) - 1


def maxima_mask(landscape: NKLandscape) -> np.ndarray:
    """Boolean mask of genotypes strictly fitter than all ``n`` neighbours."""
    f = all_fitness(landscape)
    idx = np.arange(landscape.size, dtype=np.int64)
    mask = np.ones(landscape.size, dtype=bool)
    for j in range(landscape.n):
        mask &= f > f[idx ^ (1 << j)]
    return mask


def enumerate_maxima(landscape: NKLandscape) -> MaximaReport:
    """All maxima sorted by ascending fitness, with ``Phi/Phi_g`` and distance."""
    g_max, f_max = find_global_maximum(landscape)
    f = all_fitness(landscape)
    found = np.flatnonzero(maxima_mask(landscape))
    found = found[np.argsort(f[found], kind="stable")]
    entries = [
        MaximumEntry(int(g), float(f[g]), float(f[g]) / f_max, hamming(g, g_max))
        for g in found
    ]
    return MaximaReport(entries)


def fitness_profile_trajectory(landscape: NKLandscape) -> list[tuple[int, float]]:
    """Relative fitness along the path that reverses components 0, 1, ..., n-1.

    Starts at the global maximum; the point at distance ``d`` has exactly the
    first ``d`` components flipped.
    """
    g, f_max = find_global_maximum(landscape)
    points = [(0, 1.0)]
    for i in range(landscape.n):
        g ^= 1 << i
        points.append((i + 1, fitness(landscape, g) / f_max))
    return points


# --- serialization -------------------------------------------------------


def dumps(landscape: NKLandscape) -> str:
    """Serialize to the landscape JSON text (one table row per line)."""
    head = {
        "format_version": FORMAT_VERSION,
        "n": landscape.n,
        "k": landscape.k,
        "seed": landscape.seed,
        "encoding": ENCODING,
        "rng": RNG_NAME,
    }
    lines = ["{"]
    for key, value in head.items():
        lines.append(f"  {json.dumps(key)}: {json.dumps(value)},")
    rows = [json.dumps([float(x) for x in row]) for row in landscape.tables]
    lines.append('  "tables": [')
    lines.append(",\n".join(f"    {row}" for row in rows))
    if landscape.analyzed:
        g, f = landscape._global_max
        lines.append("  ],")
        lines.append(f'  "global_max": {g},')
        lines.append(f'  "global_max_fitness": {json.dumps(f)}')
    else:
        lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save(landscape: NKLandscape, destination: str | Path) -> None:
    Path(destination).write_text(dumps(landscape), encoding="utf-8", newline="\n")


def _field_int(doc: dict, name: str, *, optional: bool = False) -> int | None:
    if name not in doc:
        if optional:
            return None
        raise LandscapeFormatError(f"field {name!r}: missing")
    value = doc[name]
    if value is None and optional:
        return None
    if not isinstance(value, int) or isinstance(value, bool):
        raise LandscapeFormatError(f"field {name!r}: expected integer, got {value!r}")
    return value


def loads(text: str, *, source: str = "<string>") -> NKLandscape:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LandscapeFormatError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return _from_document(doc)
    except LandscapeFormatError as exc:
        raise LandscapeFormatError(f"{source}: {exc}") from None


def _from_document(doc) -> NKLandscape:
    if not isinstance(doc, dict):
        raise LandscapeFormatError("top level: expected a JSON object")
    version = _field_int(doc, "format_version")
    if version != FORMAT_VERSION:
        raise LandscapeFormatError(f"field 'format_version': unsupported version {version}")
    encoding = doc.get("encoding")
    if encoding != ENCODING:
        raise LandscapeFormatError(f"field 'encoding': expected {ENCODING!r}, got {encoding!r}")
    n = _field_int(doc, "n")
    k = _field_int(doc, "k")
    seed = _field_int(doc, "seed", optional=True)
    try:
        _check_nk(n, k)
    except ValueError as exc:
        raise LandscapeFormatError(f"fields 'n'/'k': {exc}") from None
    if seed is not None and not 0 <= seed <= MASK64:
        raise LandscapeFormatError(f"field 'seed': {seed} is not a 64-bit unsigned integer")

    tables = doc.get("tables")
    width = 1 << (k + 1)
    if not isinstance(tables, list):
        raise LandscapeFormatError("field 'tables': expected a list of rows")
    if len(tables) != n:
        raise LandscapeFormatError(f"field 'tables': expected {n} rows, got {len(tables)}")
    for i, row in enumerate(tables):
        if not isinstance(row, list) or len(row) != width:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise LandscapeFormatError(f"field 'tables[{i}]': expected {width} entries, got {got}")
        for s, value in enumerate(row):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise LandscapeFormatError(f"field 'tables[{i}][{s}]': expected a number, got {value!r}")
            if not (math.isfinite(value) and 0.0 <= value < 1.0):
                raise LandscapeFormatError(f"field 'tables[{i}][{s}]': value {value!r} outside [0, 1)")
    landscape = NKLandscape(n, k, tables, seed=seed)

    g_max = _field_int(doc, "global_max", optional=True)
    if g_max is not None:
        if not 0 <= g_max < landscape.size:
            raise LandscapeFormatError(f"field 'global_max': {g_max} out of range for n={n}")
        stored = doc.get("global_max_fitness")
        actual = fitness(landscape, g_max)
        if stored is not None and stored != actual:
            raise LandscapeFormatError(
                f"field 'global_max_fitness': {stored!r} does not match fitness of global_max ({actual!r})"
            )
        landscape._global_max = (g_max, actual)
    return landscape


def load(source: str | Path) -> NKLandscape:
    path = Path(source)
    return loads(path.read_text(encoding="utf-8"), source=str(path))


def describe(landscape: NKLandscape) -> Sequence[str]:
    """Table-style lines for a maxima report (index, Phi/Phi_g, d)."""
    report = enumerate_maxima(landscape)
    lines = [
        f"# n={landscape.n} k={landscape.k} seed={landscape.seed}",
        f"# {report.count_total} maxima, {report.count_local} local",
        "maximum,genotype,fitness,relative_fitness,d",
    ]
    for idx, e in enumerate(report.entries, start=1):
        lines.append(f"{idx},{e.genotype},{e.fitness:.17g},{e.relative_fitness:.4f},{e.distance}")
    return lines
