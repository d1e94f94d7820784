"""Exact hyperbolic-plane primitives in the upper half-plane model.

Distance, geodesics, the exponential map, and parallel transport all have
closed forms in this model (vertical lines and semicircles centered on the
real axis), so the geometry kernel contains no ODE solving.  The Cayley map
to the unit disk is provided for rendering only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Tangents with |dx| below this are treated as vertical-geodesic directions.
VERTICAL_EPS = 1e-14


def _is_vertical(dx: float, dy: float) -> bool:
    # The absolute threshold is the contract; the relative guard catches
    # integrator noise like (1e-12, 1.0) whose "circle" would have a center
    # too far away to resolve in doubles (drift from flattening such a
    # geodesic stays below 1e-10 over any |t| <= 6).
    return abs(dx) < VERTICAL_EPS or abs(dx) <= 1e-12 * abs(dy)


@dataclass(frozen=True)
class HPoint:
    """A point of the upper half-plane; y > 0."""

    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0.0:
            raise ValueError(f"half-plane point needs y > 0, got y={self.y}")


@dataclass(frozen=True)
class HTangent:
    """A tangent vector at ``base`` with coordinate components (dx, dy)."""

    base: HPoint
    dx: float
    dy: float

    def norm(self) -> float:
        return math.hypot(self.dx, self.dy) / self.base.y

    def normalized(self) -> "HTangent":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero tangent")
        return HTangent(self.base, self.dx / n, self.dy / n)


def inner(v: HTangent, w: HTangent) -> float:
    """Riemannian inner product; both vectors must share a base point."""
    y = v.base.y
    return (v.dx * w.dx + v.dy * w.dy) / (y * y)


def rotate90(v: HTangent) -> HTangent:
    """Rotate a tangent by +pi/2 (counterclockwise); conformal, so this is
    the coordinate rotation."""
    return HTangent(v.base, -v.dy, v.dx)


def rotate(v: HTangent, angle: float) -> HTangent:
    c, s = math.cos(angle), math.sin(angle)
    return HTangent(v.base, c * v.dx - s * v.dy, s * v.dx + c * v.dy)


@dataclass(frozen=True)
class HGeodesic:
    """Arc-length geodesic through ``base`` with unit ``direction``."""

    base: HPoint
    direction: HTangent

    def __post_init__(self):
        n = self.direction.norm()
        if abs(n - 1.0) > 1e-6:
            raise ValueError(f"geodesic direction must be unit, norm={n}")

    def point(self, t: float) -> HPoint:
        return geodesic_state(self, t)[0]


def dist(p: HPoint, q: HPoint) -> float:
    """Hyperbolic distance: cosh d = 1 + ((dx)^2 + (dy)^2) / (2 y_p y_q)."""
    dx = p.x - q.x
    dy = p.y - q.y
    c = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y)
    return math.acosh(max(1.0, c))


def _circle_params(p: HPoint, v: HTangent) -> tuple[float, float, float, float]:
    """Center, radius, start parameter, orientation of the semicircle geodesic.

    The circle is parametrized as s -> (c - r tanh s, r sech s); increasing
    arc length along the given direction corresponds to s0 + sigma * t.
    """
    c = p.x + p.y * v.dy / v.dx
    r = math.hypot(p.x - c, p.y)
    # sinh s0 = (c - x)/y is exact where tanh s0 = (c - x)/r saturates
    s0 = math.asinh((c - p.x) / p.y)
    sigma = -1.0 if v.dx > 0.0 else 1.0
    return c, r, s0, sigma


def geodesic_state(g: HGeodesic, t: float) -> tuple[HPoint, HTangent]:
    """Point and unit tangent at arc-length parameter ``t`` along ``g``."""
    p = g.base
    v = g.direction
    if _is_vertical(v.dx, v.dy):
        sign = 1.0 if v.dy > 0.0 else -1.0
        y = p.y * math.exp(sign * t)
        q = HPoint(p.x, y)
        return q, HTangent(q, 0.0, sign * y)
    c, r, s0, sigma = _circle_params(p, v)
    s = s0 + sigma * t
    sech = 1.0 / math.cosh(s)
    tanh = math.tanh(s)
    q = HPoint(c - r * tanh, r * sech)
    # d/ds of the parametrization, rescaled by sigma for the arclength sense
    qt = HTangent(q, sigma * (-r * sech * sech), sigma * (-r * sech * tanh))
    return q, qt


def exp_map(p: HPoint, v: HTangent, t: float) -> HPoint:
    """Point at arc length ``t`` along the geodesic from ``p`` in direction ``v``;
    ``v`` must be unit (within 1e-6, re-normalized internally)."""
    if v.base != p:
        v = HTangent(p, v.dx, v.dy)
    if abs(v.norm() - 1.0) > 1e-6:
        raise ValueError(f"exp_map needs a unit tangent, norm={v.norm()}")
    return geodesic_state(HGeodesic(p, v.normalized()), t)[0]


def log_map(p: HPoint, q: HPoint) -> tuple[HTangent, float]:
    """Unit direction at ``p`` toward ``q`` and the distance to ``q``.

    Undefined for p == q (raises ValueError).
    """
    d = dist(p, q)
    if d == 0.0:
        raise ValueError("log_map requires distinct points")
    if abs(p.x - q.x) < VERTICAL_EPS * max(1.0, p.y, q.y):
        sign = 1.0 if q.y > p.y else -1.0
        return HTangent(p, 0.0, sign * p.y), d
    c = (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / (2.0 * (q.x - p.x))
    r = math.hypot(p.x - c, p.y)
    # s increases as x decreases along the circle
    sp = math.asinh((c - p.x) / p.y)
    sq = math.asinh((c - q.x) / q.y)
    sigma = 1.0 if sq > sp else -1.0
    sech = 1.0 / math.cosh(sp)
    tanh = math.tanh(sp)
    v = HTangent(p, sigma * (-r * sech * sech), sigma * (-r * sech * tanh))
    return v.normalized(), d


def parallel_transport(g: HGeodesic, w: HTangent, t: float) -> HTangent:
    """Parallel transport of ``w`` along ``g`` to parameter ``t``.

    Transport preserves the norm and the angle with the geodesic tangent,
    which pins it down completely in two dimensions.
    """
    t0 = g.direction
    n0 = rotate90(t0)
    a = inner(w, t0)
    b = inner(w, n0)
    q, tq = geodesic_state(g, t)
    nq = rotate90(tq)
    return HTangent(q, a * tq.dx + b * nq.dx, a * tq.dy + b * nq.dy)


def to_disk(p: HPoint) -> tuple[float, float]:
    """Cayley image w = (z - i) / (z + i) of z = x + iy in the unit disk."""
    x, y = p.x, p.y
    den = x * x + (y + 1.0) ** 2
    re = (x * x + y * y - 1.0) / den
    im = -2.0 * x / den
    return re, im


def geodesic_curve_params(g: HGeodesic) -> tuple[str, float, float]:
    """Closed-form description: ("vertical", x0, 0) or ("arc", center, radius)."""
    v = g.direction
    if _is_vertical(v.dx, v.dy):
        return "vertical", g.base.x, 0.0
    c, r, _, _ = _circle_params(g.base, v)
    return "arc", c, r
