"""Exact cost of independent (p = 0) search.

A lone blind searcher's distance to the target is a birth-death chain on the
number ``j`` of correct digits: from ``j`` it moves to ``j + 1`` with
probability ``1 - j/n`` and to ``j - 1`` with probability ``j/n``; ``j = n``
absorbs. The hitting time is asymptotically geometric with success
probability ``1 - lambda_n``, where ``lambda_n`` is the largest eigenvalue of
the transient block, and the halting time of ``m`` independent searchers is
geometric with success probability ``1 - lambda_n**m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_N = 64
# Beyond this n the gap 1 - lambda falls under double resolution near 1,
# so the bisection switches to multiprecision.
DOUBLE_MAX_N = 30


def build_transition_matrix(n: int) -> np.ndarray:
    """Column-stochastic ``(n+1, n+1)`` matrix; entry ``(i, j)`` is P(j -> i)."""
    _check_n(n)
    t = np.zeros((n + 1, n + 1))
    t[1, 0] = 1.0
    for j in range(1, n):
        t[j + 1, j] = 1.0 - j / n
        t[j - 1, j] = j / n
    t[n, n] = 1.0
    return t


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in [1, {MAX_N}], got {n}")


def symmetric_transient_offdiagonal(n: int) -> list[float]:
    """Off-diagonal of the symmetrized transient block (its diagonal is zero).

    The transient block ``Q`` (states ``0..n-1``) has ``Q[j+1, j] = 1 - j/n``
    and ``Q[j, j+1] = (j+1)/n``; scaling by a positive diagonal makes it
    symmetric with off-diagonal ``sqrt(Q[j+1, j] * Q[j, j+1])``.
    """
    return [math.sqrt((1.0 - j / n) * ((j + 1) / n)) for j in range(n - 1)]


def _sturm_count(offdiag_sq, x, tiny):
    """Number of eigenvalues below ``x`` of the zero-diagonal tridiagonal matrix."""
    count = 0
    q = -x
    if q < 0:
        count += 1
    for b2 in offdiag_sq:
        if q == 0:
            q = tiny
        q = -x - b2 / q
        if q < 0:
            count += 1
    return count


def _largest_eigenvalue_bisect(offdiag_sq, hi, one, half, tol, tiny, max_iter):
    size = len(offdiag_sq) + 1
    lo = 0 * one
    for _ in range(max_iter):
        mid = (lo + hi) * half
        if mid <= lo or mid >= hi or hi - lo <= tol:
            break
        if _sturm_count(offdiag_sq, mid, tiny) >= size:
            hi = mid
        else:
            lo = mid
    return lo, hi


def spectral_gap(n: int) -> float:
    """``1 - lambda_n`` for the n-digit chain.

    Double-precision Sturm bisection for ``n <= 30``; 60-digit bisection via
    mpmath above that, where ``lambda_n`` itself rounds to 1.
    """
    _check_n(n)
    if n == 1:
        return 1.0
    if n <= DOUBLE_MAX_N:
        return 1.0 - second_largest_eigenvalue(n)
    import mpmath

    with mpmath.workdps(60):
        one = mpmath.mpf(1)
        n_mp = mpmath.mpf(n)
        sq = [(one - j / n_mp) * ((j + 1) / n_mp) for j in range(n - 1)]
        lo, hi = _largest_eigenvalue_bisect(
            sq, one, one, mpmath.mpf("0.5"), mpmath.mpf(10) ** -55, mpmath.mpf(10) ** -200, 400
        )
        return float(one - (lo + hi) / 2)


def second_largest_eigenvalue(n: int) -> float:
    """``lambda_n``: largest eigenvalue of the transient block of the chain.

    The transient spectrum is symmetric about zero (the chain alternates
    parity), so power iteration on it does not converge; a Sturm-sequence
    bisection on the symmetrized tridiagonal form is used instead. Every
    eigenvalue is a convex combination bound away from 1 in absolute value,
    so ``[0, 1]`` brackets the answer.
    """
    _check_n(n)
    if n == 1:
        # Only transient state is 0, which leaves with probability 1.
        return 0.0
    if n > DOUBLE_MAX_N:
        return 1.0 - spectral_gap(n)
    sq = [b * b for b in symmetric_transient_offdiagonal(n)]
    lo, hi = _largest_eigenvalue_bisect(sq, 1.0, 1.0, 0.5, 0.0, 1e-300, 2000)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class IndependentBaseline:
    """Closed-form predictions for ``m`` independent blind searchers."""

    n: int
    lambda_n: float
    per_trial_success: float

    @classmethod
    def for_length(cls, n: int) -> "IndependentBaseline":
        gap = spectral_gap(n)
        return cls(n=n, lambda_n=second_largest_eigenvalue(n), per_trial_success=gap)

    def group_success(self, m: int) -> float:
        """``1 - lambda_n**m``, computed without cancellation."""
        if m < 1:
            raise ValueError(f"m must be >= 1, got {m}")
        return -math.expm1(m * math.log1p(-self.per_trial_success)) if self.per_trial_success < 1 else 1.0

    def mean_trials(self, m: int = 1) -> float:
        return 1.0 / self.group_success(m)


def hitting_time_pmf(baseline: IndependentBaseline, t: int) -> float:
    """Geometric law ``lambda**(t-1) * (1 - lambda)`` for the hitting trial ``t``.

    This is the large-``t`` law of the absorbing chain; for ``n`` of practical
    interest it is an excellent approximation at all ``t``.
    """
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    q = baseline.per_trial_success
    return math.exp((t - 1) * math.log1p(-q)) * q if q < 1 else float(t == 1)


def hitting_time_cdf(baseline: IndependentBaseline, t: int) -> float:
    """Probability of a hit at or before trial ``t`` under the geometric law."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    q = baseline.per_trial_success
    return -math.expm1(t * math.log1p(-q)) if q < 1 else float(t >= 1)


def mean_cost_independent(baseline: IndependentBaseline, m: int) -> float:
    """Mean rescaled cost ``m / (2**n * (1 - lambda**m))``."""
    return m / (2.0**baseline.n * baseline.group_success(m))


def small_group_cost(baseline: IndependentBaseline) -> float:
    """Asymptote ``1 / (2**n (1 - lambda))`` for ``m << 1/(1 - lambda)``."""
    return 1.0 / (2.0**baseline.n * baseline.per_trial_success)


def large_group_cost(baseline: IndependentBaseline, m: int) -> float:
    """Asymptote ``m / 2**n`` for ``m >> 1/(1 - lambda)``."""
    return m / 2.0**baseline.n
