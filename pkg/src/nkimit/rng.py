"""Counter-based SplitMix64 random streams.

Every random quantity in the package is a pure function of a 64-bit key and
a 64-bit counter::

    draw(key, i) = mix64(key + (i + 1) * GAMMA)    (mod 2**64)

which is exactly the ``i``-th output of a SplitMix64 generator whose state
starts at ``key``. Uniform doubles keep the top 53 bits. Because any draw can
be addressed directly, the numba kernels, the vectorized numpy fallback and
the scalar reference code all consume identical streams.

Key derivation: ``derive_key(seed, a, b, ...)`` folds each integer part into
the running key with ``key = mix64(key + (part + 1) * GAMMA)``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
DOUBLE_UNIT = 1.0 / (1 << 53)

# Stream labels folded into search seeds.
STREAM_INIT = 0
STREAM_MOVES = 1


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def draw_u64(key: int, counter: int) -> int:
    return mix64(key + (counter + 1) * GAMMA)


def draw_uniform(key: int, counter: int) -> float:
    return (draw_u64(key, counter) >> 11) * DOUBLE_UNIT


def derive_key(seed: int, *parts: int) -> int:
    """Fold integer ``parts`` into ``seed``; order matters."""
    key = seed & MASK64
    for part in parts:
        key = draw_u64(key, part & MASK64)
    return key


def search_keys(seed: int) -> tuple[int, int]:
    """Keys for initial-population and move streams of one search run."""
    return derive_key(seed, STREAM_INIT), derive_key(seed, STREAM_MOVES)


def _as_u64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint64)


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized SplitMix64 finalizer; uint64 arrays wrap silently."""
    z = _as_u64(z)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def draw_u64_array(key: int, counters) -> np.ndarray:
    c = _as_u64(counters) + np.uint64(1)
    return mix64_array(np.uint64(key & MASK64) + c * np.uint64(GAMMA))


def draw_uniform_array(key: int, counters) -> np.ndarray:
    return (draw_u64_array(key, counters) >> np.uint64(11)).astype(np.float64) * DOUBLE_UNIT
