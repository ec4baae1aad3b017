"""Backend selection for the hot search kernels.

Set ``NKIMIT_DISABLE_NUMBA=1`` (or run without numba installed) to route every
search through the pure-numpy fallback. Both backends consume the same random
streams and produce identical outcomes.
"""

from __future__ import annotations

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAS_NUMBA = numba is not None
NUMBA_DISABLED = os.environ.get("NKIMIT_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

JIT_OPTIONS = {"nogil": True, "cache": True}

BACKENDS = ("numba", "numpy")


def default_backend() -> str:
    return "numba" if HAS_NUMBA and not NUMBA_DISABLED else "numpy"


def resolve_backend(backend: str | None) -> str:
    if backend is None:
        return default_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


def njit(func):
    if not HAS_NUMBA:
        return func
    return numba.njit(**JIT_OPTIONS)(func)
