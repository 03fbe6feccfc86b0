"""Bracketed scalar root finding.

Every real root used in this package has a guaranteed sign-change bracket,
so the solvers here are bisection-first (unconditionally convergent) with
an optional Newton polish that is never allowed to leave the bracket.
Endpoints are never evaluated: brackets may conceptually start at a pole,
so only midpoints are probed.
"""

from __future__ import annotations

from typing import Callable, Optional


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    lo_positive: bool,
    iterations: int = 60,
) -> tuple[float, float]:
    """Shrink a sign-change bracket [lo, hi] by bisection.

    `lo_positive` states the sign of f on the lo side; the endpoints
    themselves are never evaluated (either may sit on a pole of f).
    Returns the final bracket.
    """
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if (f(mid) > 0.0) == lo_positive:
            lo = mid
        else:
            hi = mid
    return lo, hi


def bisect_newton(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    lo: float,
    hi: float,
    lo_positive: bool,
    bisect_iterations: int = 60,
    newton_iterations: int = 4,
) -> float:
    """Bisection followed by a bracket-confined Newton polish.

    The bisection phase certifies the root to ~(hi-lo)*2**-60; the Newton
    steps only sharpen the last digits and are rejected whenever they leave
    the certified bracket.
    """
    lo, hi = bisect(f, lo, hi, lo_positive, bisect_iterations)
    x = 0.5 * (lo + hi)
    for _ in range(newton_iterations):
        fx = f(x)
        if fx == 0.0:
            return x
        dfx = fprime(x)
        if dfx == 0.0:
            break
        step = fx / dfx
        cand = x - step
        if not (lo < cand < hi):
            break
        x = cand
    return x


def bisect_monotone(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    increasing: bool,
    iterations: int = 80,
    residual_tol: Optional[float] = None,
) -> float:
    """Solve f(x) = target for monotone f on a bracket containing the root."""
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        val = f(mid)
        if residual_tol is not None and abs(val - target) < residual_tol:
            return mid
        if (val < target) == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
