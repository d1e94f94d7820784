"""Adaptive Simpson quadrature shared by the integral-valued scalar functions."""

from __future__ import annotations

from typing import Callable, Sequence


class QuadratureError(Exception):
    """Raised when an integrand cannot be evaluated over the requested interval."""


def _simpson(fa: float, fm: float, fb: float, width: float) -> float:
    return width * (fa + 4.0 * fm + fb) / 6.0


def _rec(f, a, m, b, fa, fm, fb, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + _rec(
        f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1
    )


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 40,
    breakpoints: Sequence[float] = (),
) -> float:
    """Integrate ``f`` over ``[a, b]`` by recursive Simpson bisection.

    ``breakpoints`` lists abscissae where the integrand may be non-smooth;
    the interval is pre-split there so each recursive piece sees a smooth
    (or at worst one-sided) integrand.  The sign of the result follows the
    orientation of the interval.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth, breakpoints)
    cuts = sorted({x for x in breakpoints if a < x < b})
    edges = [a, *cuts, b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = f(lo), f(mid), f(hi)
        whole = _simpson(flo, fmid, fhi, hi - lo)
        share = tol * max((hi - lo) / (b - a), 1e-3)
        total += _rec(f, lo, mid, hi, flo, fmid, fhi, whole, share, max_depth)
    return total


# 5-point Gauss-Legendre rule on [-1, 1], used for short smooth segments.
_GL5_NODES = (
    -0.9061798459386640,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.9061798459386640,
)
_GL5_WEIGHTS = (
    0.2369268850561891,
    0.4786286704993665,
    0.5688888888888889,
    0.4786286704993665,
    0.2369268850561891,
)


def gauss5(f: Callable[[float], float], a: float, b: float) -> float:
    """Fixed 5-point Gauss-Legendre quadrature over ``[a, b]``."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    return h * sum(w * f(c + h * x) for x, w in zip(_GL5_NODES, _GL5_WEIGHTS))
