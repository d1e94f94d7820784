"""The warped 3-metric family built from a pair of scalar functions.

In chart coordinates (x, u, v) the metric is

    g = (cosh u - h(x) sinh u)^2 dx^2 + (du - f(x) v dx)^2 + (dv + f(x) u dx)^2.

The module evaluates the metric tensor, the adapted orthonormal frame
(e1, e2, T) with its scalars a and beta, the 2x2 splitting tensor, and the
rotation to conformal coordinates in which the same metric reads
p(x,u)^2 dx^2 + dy^2 + dz^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import expr
from .expr import ScalarFunction, integral_of

DEGENERATE_EPS = 1e-13


class DegenerateMetricError(Exception):
    """cosh u - h sinh u vanished; the chart degenerates (needs |h| > 1)."""


class CantorNonsmoothSet:
    """The middle-thirds set in [0, 1] as a named non-smooth locus."""

    name = "cantor"

    def distance(self, x: float) -> float:
        return expr.cantor_distance(x)

    def sample_points(self) -> tuple[float, ...]:
        """Representative points used by limit checks: complement-interval
        endpoints to depth 3 plus two non-endpoint set members."""
        pts = {0.0, 1.0, 0.25, 0.75}
        # endpoints of removed intervals at depths 1..3
        level = [(0.0, 1.0)]
        for _ in range(3):
            nxt = []
            for lo, hi in level:
                third = (hi - lo) / 3.0
                pts.add(lo + third)
                pts.add(hi - third)
                nxt.append((lo, lo + third))
                nxt.append((hi - third, hi))
            level = nxt
        return tuple(sorted(pts))

    def __repr__(self) -> str:
        return "cantor"


NonsmoothSet = Union[Sequence[float], CantorNonsmoothSet, None]


@dataclass(frozen=True)
class ChartPoint:
    x: float
    u: float
    v: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.u, self.v], dtype=float)


class MetricSpec:
    """The scalar pair (f, h) plus domain metadata defining one metric.

    ``nonsmooth`` lists x-values (or names a set) where the chart loses
    smoothness; curvature sampling near those points is skipped by callers.
    The quadrature cache for the rotation angle A(x) = integral of f is
    created eagerly at construction.
    """

    def __init__(
        self,
        f: ScalarFunction,
        h: ScalarFunction,
        domain: tuple[float, float] = (-math.inf, math.inf),
        nonsmooth: NonsmoothSet = None,
    ):
        self.f = f
        self.h = h
        self.domain = (float(domain[0]), float(domain[1]))
        if self.domain[0] >= self.domain[1]:
            raise ValueError("empty x-domain")
        if nonsmooth is None:
            nonsmooth = ()
        self.nonsmooth = nonsmooth
        self._angle = integral_of(f)

    def contains_x(self, x: float) -> bool:
        return self.domain[0] < x < self.domain[1]

    def nonsmooth_distance(self, x: float) -> float:
        """Distance from x to the declared non-smooth locus (inf if none)."""
        if isinstance(self.nonsmooth, CantorNonsmoothSet):
            return self.nonsmooth.distance(x)
        pts = tuple(self.nonsmooth)
        if not pts:
            return math.inf
        return min(abs(x - p) for p in pts)

    def nonsmooth_points(self) -> tuple[float, ...]:
        """A finite list of non-smooth x-values for limit checks."""
        if isinstance(self.nonsmooth, CantorNonsmoothSet):
            return self.nonsmooth.sample_points()
        return tuple(self.nonsmooth)

    def rotation_angle(self, x: float) -> float:
        """A(x) = integral of f from 0 to x."""
        return self._angle.value(x)

    def __repr__(self) -> str:
        return f"MetricSpec(f={self.f!r}, h={self.h!r})"


@dataclass(frozen=True)
class Frame:
    """The adapted orthonormal frame at a chart point.

    e1 = d/du, T = d/dv, and e2 completes them; ``a`` is the splitting
    scale f/(cosh u - h sinh u) and ``beta`` the shape scalar
    (h cosh u - sinh u)/(cosh u - h sinh u).
    """

    e1: np.ndarray
    e2: np.ndarray
    T: np.ndarray
    a: float
    beta: float


def _stretch(spec: MetricSpec, x: float, u: float) -> tuple[float, float, float]:
    """(f(x), h(x), cosh u - h sinh u), raising on a degenerate factor."""
    fx = spec.f.value(x)
    hx = spec.h.value(x)
    w = math.cosh(u) - hx * math.sinh(u)
    if abs(w) < DEGENERATE_EPS:
        raise DegenerateMetricError(
            f"cosh u - h sinh u = {w} at x={x}, u={u} (|h|>1 chart breakdown)"
        )
    return fx, hx, w


def metric_at(spec: MetricSpec, p: ChartPoint) -> np.ndarray:
    """Metric components in the (x, u, v) coordinate basis at ``p``."""
    if not spec.contains_x(p.x):
        raise expr.DomainError(f"x={p.x} outside domain {spec.domain}")
    fx, _, w = _stretch(spec, p.x, p.u)
    g = np.eye(3)
    g[0, 0] = w * w + fx * fx * (p.u * p.u + p.v * p.v)
    g[0, 1] = g[1, 0] = -fx * p.v
    g[0, 2] = g[2, 0] = fx * p.u
    return g


def frame_at(spec: MetricSpec, p: ChartPoint) -> Frame:
    """Adapted orthonormal frame, with a and beta, at ``p``."""
    if not spec.contains_x(p.x):
        raise expr.DomainError(f"x={p.x} outside domain {spec.domain}")
    fx, hx, w = _stretch(spec, p.x, p.u)
    e1 = np.array([0.0, 1.0, 0.0])
    T = np.array([0.0, 0.0, 1.0])
    e2 = np.array([1.0, p.v * fx, -p.u * fx]) / w
    a = fx / w
    beta = (hx * math.cosh(p.u) - math.sinh(p.u)) / w
    return Frame(e1=e1, e2=e2, T=T, a=a, beta=beta)


def splitting_tensor(spec: MetricSpec, p: ChartPoint) -> np.ndarray:
    """The 2x2 matrix of X -> -grad_X T in the ordered basis (e1, e2).

    Strictly upper triangular by construction, so trace and determinant
    vanish identically.
    """
    fr = frame_at(spec, p)
    return np.array([[0.0, fr.a], [0.0, 0.0]])


def sekigawa_change(
    spec: MetricSpec, p: ChartPoint
) -> tuple[tuple[float, float, float], float]:
    """Rotate (u, v) by the accumulated angle A(x) = integral of f.

    Returns the conformal coordinates (x, y, z) and the factor
    p = cosh u - h(x) sinh u, in which the metric is p^2 dx^2 + dy^2 + dz^2.
    """
    _, _, w = _stretch(spec, p.x, p.u)
    ang = spec.rotation_angle(p.x)
    c, s = math.cos(ang), math.sin(ang)
    y = p.u * c - p.v * s
    z = p.u * s + p.v * c
    return (p.x, y, z), w


def product_spec() -> MetricSpec:
    """The split case f = 0, h = 0 (a metric product)."""
    return MetricSpec(expr.function_from_source("0"), expr.function_from_source("0"))
