"""numba kernels for the imitative search.

Random draws follow the layout in :mod:`nkimit.search`: agent ``a`` at trial
``t`` reads counters ``2*((t-1)*m + a)`` (imitate-or-not) and ``+1`` (which
bit). Keep this in sync with the numpy fallback there.
"""

from __future__ import annotations

import numpy as np

from ._jit import njit
from .rng import DOUBLE_UNIT, GAMMA, _M1, _M2

_U1 = np.uint64(1)
_U2 = np.uint64(2)
_U11 = np.uint64(11)
_U27 = np.uint64(27)
_U30 = np.uint64(30)
_U31 = np.uint64(31)
_GAMMA = np.uint64(GAMMA)
_MUL1 = np.uint64(_M1)
_MUL2 = np.uint64(_M2)


@njit
def mix64(z):
    z = (z ^ (z >> _U30)) * _MUL1
    z = (z ^ (z >> _U27)) * _MUL2
    return z ^ (z >> _U31)


@njit
def draw_u64(key, counter):
    return mix64(key + (counter + _U1) * _GAMMA)


@njit
def draw_uniform(key, counter):
    return np.float64(draw_u64(key, counter) >> _U11) * DOUBLE_UNIT


@njit
def genotype_fitness(g, fit_all, tables, n, k):
    if fit_all.shape[0] > 0:
        return fit_all[g]
    total = 0.0
    for i in range(n):
        idx = 0
        for b in range(k + 1):
            j = i + b
            if j >= n:
                j -= n
            idx |= ((g >> j) & 1) << b
        total += tables[i, idx]
    return total / n


@njit
def flip_random_bit(g, n, v):
    return g ^ (np.int64(1) << np.int64(v * n))


@njit
def imitate(g, model, n, v):
    diff = g ^ model
    if diff == 0:
        return flip_random_bit(g, n, v)
    count = 0
    for j in range(n):
        count += (diff >> j) & 1
    r = np.int64(v * count)
    for j in range(n):
        if (diff >> j) & 1:
            if r == 0:
                return g ^ (np.int64(1) << j)
            r -= 1
    return g  # unreachable


@njit
def _argmax_lowest(fits):
    best = 0
    for a in range(1, fits.shape[0]):
        if fits[a] > fits[best]:
            best = a
    return best


@njit
def search_kernel(fit_all, tables, n, k, m, p, gmax, max_trials, key_init, key_move, record, check_initial):
    """One search run. Returns (success, t_star, finder, trace)."""
    genos = np.empty(m, dtype=np.int64)
    fits = np.empty(m, dtype=np.float64)
    shift = np.uint64(64 - n)
    for a in range(m):
        genos[a] = np.int64(draw_u64(key_init, np.uint64(a)) >> shift)
        fits[a] = genotype_fitness(genos[a], fit_all, tables, n, k)
    trace = np.empty(max_trials if record else 0, dtype=np.float64)
    if check_initial:
        for a in range(m):
            if genos[a] == gmax:
                return True, 0, a, trace[:0]

    best = _argmax_lowest(fits)
    um = np.uint64(m)
    for t in range(1, max_trials + 1):
        base = _U2 * (np.uint64(t - 1) * um)
        for a in range(m):
            ctr = base + _U2 * np.uint64(a)
            g = genos[a]
            if p > 0.0 and draw_uniform(key_move, ctr) < p:
                g = imitate(g, genos[best], n, draw_uniform(key_move, ctr + _U1))
            else:
                g = flip_random_bit(g, n, draw_uniform(key_move, ctr + _U1))
            f = genotype_fitness(g, fit_all, tables, n, k)
            old = fits[a]
            genos[a] = g
            fits[a] = f
            if a == best:
                if f < old:
                    best = _argmax_lowest(fits)
            elif f > fits[best] or (f == fits[best] and a < best):
                best = a
            if g == gmax:
                if record:
                    trace[t - 1] = fits[best]
                return True, t, a, trace[:t]
        if record:
            trace[t - 1] = fits[best]
    return False, max_trials, -1, trace


@njit
def search_batch(fit_all, tables, n, k, m, p, gmax, max_trials, keys_init, keys_move, check_initial, success, t_star):
    for r in range(keys_init.shape[0]):
        ok, ts, _, _ = search_kernel(
            fit_all, tables, n, k, m, p, gmax, max_trials, keys_init[r], keys_move[r], False, check_initial
        )
        success[r] = ok
        t_star[r] = ts
