"""Turning-angle curves in the hyperbolic plane and their orthogonal leaves.

A curve is integrated from its turning angle H: the ODE state is the
position together with a parallel frame Y, and the curve tangent at time t
is Y rotated by H(t).  The geodesics orthogonal to the curve are its
leaves; they foliate the plane exactly when H is 1-Lipschitz, and develop
focal crossings at distance artanh(1/|h|) when the curvature h = H'
exceeds 1 in size.

Sign conventions: the leaf direction X is the curve tangent rotated by
+pi/2, and the orthogonal Jacobi factor is cosh u - h sinh u, so focal
points for |h| > 1 sit on the side of X matching the sign of h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import hyperbolic as hp
from .expr import OrderUnsupportedError, ScalarFunction
from .hyperbolic import HGeodesic, HPoint, HTangent


class OutOfSpanError(Exception):
    """A parameter outside the sampled range of a curve was requested."""


class NonFoliatingError(Exception):
    """The curve's turning angle is not 1-Lipschitz; leaves may cross."""


@dataclass
class TurningCurve:
    """A sampled unit-speed curve with its parallel reference frame.

    ``points``, ``tangents`` and ``frames`` are (n, 2) arrays of half-plane
    coordinates and coordinate components; ``ts`` is the increasing
    parameter grid with spacing ``step``.
    """

    turning: ScalarFunction
    ts: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    frames: np.ndarray
    step: float

    @property
    def span(self) -> tuple[float, float]:
        return float(self.ts[0]), float(self.ts[-1])

    def _bracket(self, t: float) -> int:
        lo, hi = self.span
        if not lo <= t <= hi:
            raise OutOfSpanError(f"t={t} outside sampled span [{lo}, {hi}]")
        i = int(np.searchsorted(self.ts, t, side="right")) - 1
        return min(max(i, 0), len(self.ts) - 2)

    def state_at(self, t: float) -> tuple[HPoint, HTangent, HTangent]:
        """Point, unit tangent, and unit parallel frame at parameter ``t``.

        Positions interpolate by cubic Hermite (the sampled tangents are
        the exact coordinate velocities); tangent and frame vectors are
        re-normalized after interpolation.
        """
        i = self._bracket(t)
        h = float(self.ts[i + 1] - self.ts[i])
        th = (t - float(self.ts[i])) / h
        if th == 0.0:
            return self._sample(i)
        if th == 1.0:
            return self._sample(i + 1)
        p0, p1 = self.points[i], self.points[i + 1]
        m0, m1 = self.tangents[i], self.tangents[i + 1]
        t2, t3 = th * th, th * th * th
        pos = (
            (2 * t3 - 3 * t2 + 1) * p0
            + (t3 - 2 * t2 + th) * h * m0
            + (-2 * t3 + 3 * t2) * p1
            + (t3 - t2) * h * m1
        )
        vel = (
            (6 * t2 - 6 * th) / h * p0
            + (3 * t2 - 4 * th + 1) * m0
            + (-6 * t2 + 6 * th) / h * p1
            + (3 * t2 - 2 * th) * m1
        )
        point = HPoint(float(pos[0]), float(pos[1]))
        tangent = HTangent(point, float(vel[0]), float(vel[1])).normalized()
        fr = (1 - th) * self.frames[i] + th * self.frames[i + 1]
        frame = HTangent(point, float(fr[0]), float(fr[1])).normalized()
        return point, tangent, frame

    def _sample(self, i: int) -> tuple[HPoint, HTangent, HTangent]:
        point = HPoint(float(self.points[i, 0]), float(self.points[i, 1]))
        tangent = HTangent(point, float(self.tangents[i, 0]), float(self.tangents[i, 1]))
        frame = HTangent(point, float(self.frames[i, 0]), float(self.frames[i, 1]))
        return point, tangent, frame

    def point_at(self, t: float) -> HPoint:
        return self.state_at(t)[0]

    def to_csv(self) -> str:
        """Samples as CSV rows ``t,x,y,tx,ty``."""
        lines = ["t,x,y,tx,ty"]
        for i in range(len(self.ts)):
            row = (
                self.ts[i],
                self.points[i, 0],
                self.points[i, 1],
                self.tangents[i, 0],
                self.tangents[i, 1],
            )
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _rhs(theta: float, x: float, y: float, yx: float, yy: float):
    c = math.cos(theta)
    s = math.sin(theta)
    tx = c * yx - s * yy
    ty = s * yx + c * yy
    return tx, ty, (tx * yy + ty * yx) / y, (ty * yy - tx * yx) / y


def _march(
    H: ScalarFunction, x: float, y: float, yx: float, yy: float, n: int, h: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Classical RK4 over n steps of size h starting at parameter 0."""
    theta = [H.value(0.5 * h * i) for i in range(2 * n + 1)]
    pts = np.empty((n + 1, 2))
    tans = np.empty((n + 1, 2))
    frs = np.empty((n + 1, 2))

    def record(i, x, y, yx, yy):
        th = theta[2 * i]
        c, s = math.cos(th), math.sin(th)
        pts[i] = (x, y)
        tans[i] = (c * yx - s * yy, s * yx + c * yy)
        frs[i] = (yx, yy)

    record(0, x, y, yx, yy)
    for i in range(n):
        th0 = theta[2 * i]
        thm = theta[2 * i + 1]
        th1 = theta[2 * i + 2]
        k1 = _rhs(th0, x, y, yx, yy)
        k2 = _rhs(thm, x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], yx + 0.5 * h * k1[2], yy + 0.5 * h * k1[3])
        k3 = _rhs(thm, x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], yx + 0.5 * h * k2[2], yy + 0.5 * h * k2[3])
        k4 = _rhs(th1, x + h * k3[0], y + h * k3[1], yx + h * k3[2], yy + h * k3[3])
        x += h * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0
        y += h * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0
        yx += h * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]) / 6.0
        yy += h * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]) / 6.0
        record(i + 1, x, y, yx, yy)
    return pts, tans, frs


def integrate_turning_curve(
    H: ScalarFunction,
    p0: HPoint,
    v0: HTangent,
    t_span: tuple[float, float],
    step: float = 1e-4,
) -> TurningCurve:
    """Integrate the curve with turning angle ``H`` from ``p0``, ``v0``.

    The parallel frame starts as v0 at t = 0 and the tangent at time t is
    the frame rotated by H(t); the span must contain 0 and is snapped to
    whole steps.  Fixed-step RK4 keeps the method honest for turning
    angles that are merely Lipschitz.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    t0, t1 = t_span
    if t0 > 0.0 or t1 < 0.0 or t0 == t1:
        raise ValueError("t_span must contain 0")
    if abs(v0.norm() - 1.0) > 1e-9:
        raise ValueError("v0 must be a unit tangent")
    if v0.base != p0:
        v0 = HTangent(p0, v0.dx, v0.dy)
    n_fwd = int(round(t1 / step))
    n_bwd = int(round(-t0 / step))
    fw = _march(H, p0.x, p0.y, v0.dx, v0.dy, n_fwd, step)
    bw = _march(H, p0.x, p0.y, v0.dx, v0.dy, n_bwd, -step)
    pts = np.vstack([bw[0][:0:-1], fw[0]])
    tans = np.vstack([bw[1][:0:-1], fw[1]])
    frs = np.vstack([bw[2][:0:-1], fw[2]])
    ts = np.arange(-n_bwd, n_fwd + 1) * step
    return TurningCurve(turning=H, ts=ts, points=pts, tangents=tans, frames=frs, step=step)


@dataclass(frozen=True)
class Leaf:
    """The orthogonal geodesic leaf rooted at curve parameter ``s``."""

    s: float
    geodesic: HGeodesic


def leaf(curve: TurningCurve, s: float) -> Leaf:
    """Orthogonal geodesic at gamma(s); its direction is the curve tangent
    rotated by +pi/2."""
    point, tangent, _ = curve.state_at(s)
    x = hp.rotate90(tangent)
    return Leaf(s=s, geodesic=HGeodesic(point, x))


def focal_distance(h_val: float) -> Optional[float]:
    """Distance at which the orthogonal Jacobi factor cosh u - h sinh u
    vanishes; None when |h| <= 1 (no focal point, leaves foliate)."""
    if not math.isfinite(h_val):
        raise ValueError("h must be finite")
    if abs(h_val) <= 1.0:
        return None
    return math.atanh(1.0 / abs(h_val))


def _lipschitz_guard(curve: TurningCurve, samples: int = 101) -> None:
    lo, hi = curve.span
    for t in np.linspace(lo, hi, samples):
        try:
            j = curve.turning.jet(float(t), 1)
        except OrderUnsupportedError:
            continue
        if abs(j.values[1]) > 1.0 + 1e-9:
            raise NonFoliatingError(
                f"|H'({t})| = {abs(j.values[1])} > 1: leaves need not foliate"
            )


def _cosh_dist(p: HPoint, q: HPoint) -> float:
    dx = p.x - q.x
    dy = p.y - q.y
    return 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y)


def nearest_leaf(curve: TurningCurve, p: HPoint) -> tuple[float, float]:
    """Foot parameter s and signed leaf distance u with exp(u X) = p.

    The foot minimizes t -> cosh dist(p, gamma(t)), which is strictly
    convex for 1-Lipschitz turning angles, so the minimizer is unique;
    u is positive on the +X side of the curve.
    """
    _lipschitz_guard(curve)
    n = len(curve.ts)
    stride = max(1, n // 512)
    idx = list(range(0, n, stride))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    vals = [
        _cosh_dist(p, HPoint(curve.points[i, 0], curve.points[i, 1])) for i in idx
    ]
    k = min(range(len(idx)), key=vals.__getitem__)
    if k == 0 or k == len(idx) - 1:
        raise OutOfSpanError("nearest point lies at the boundary of the sampled span")
    a = float(curve.ts[idx[k - 1]])
    b = float(curve.ts[idx[k + 1]])

    def phi(t: float) -> float:
        return _cosh_dist(p, curve.point_at(t))

    # Golden section only down to a scale where phi still resolves in
    # doubles; the derivative bisection below does the fine refinement.
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - gr * (b - a)
    x2 = a + gr * (b - a)
    f1, f2 = phi(x1), phi(x2)
    while b - a > 1e-6:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - gr * (b - a)
            f1 = phi(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + gr * (b - a)
            f2 = phi(x2)

    def dphi(t: float) -> float:
        q, tangent, _ = curve.state_at(t)
        d = hp.dist(p, q)
        if d < 1e-12:
            return 0.0
        direction, _ = hp.log_map(q, p)
        return -math.sinh(d) * hp.inner(direction, tangent)

    lo, hi = a, b
    dlo, dhi = dphi(lo), dphi(hi)
    s = 0.5 * (lo + hi)
    if dlo < 0.0 < dhi:
        for _ in range(200):
            s = 0.5 * (lo + hi)
            ds = dphi(s)
            if abs(ds) < 1e-10:
                break
            if ds < 0.0:
                lo = s
            else:
                hi = s
    foot, tangent, _ = curve.state_at(s)
    d = hp.dist(foot, p)
    if d < 1e-12:
        return s, 0.0
    direction, _ = hp.log_map(foot, p)
    x = hp.rotate90(tangent)
    u = d if hp.inner(direction, x) >= 0.0 else -d
    return s, u


# ---------------------------------------------------------------------------
# Leaf geometry helpers


def geodesics_intersect(g1: HGeodesic, g2: HGeodesic) -> Optional[HPoint]:
    """Intersection point of two complete geodesics, or None if disjoint."""
    k1, a1, r1 = hp.geodesic_curve_params(g1)
    k2, a2, r2 = hp.geodesic_curve_params(g2)
    if k1 == "vertical" and k2 == "vertical":
        return None
    if k1 == "vertical" or k2 == "vertical":
        if k1 == "vertical":
            x0, c, r = a1, a2, r2
        else:
            x0, c, r = a2, a1, r1
        y2 = r * r - (x0 - c) ** 2
        if y2 <= 0.0:
            return None
        return HPoint(x0, math.sqrt(y2))
    if a1 == a2:
        return None
    xs = (r1 * r1 - r2 * r2 + a2 * a2 - a1 * a1) / (2.0 * (a2 - a1))
    y2 = r1 * r1 - (xs - a1) ** 2
    if y2 <= 0.0:
        return None
    return HPoint(xs, math.sqrt(y2))


def intersecting_leaf_pairs(
    leaves: list[Leaf], span: float
) -> list[tuple[int, int]]:
    """Pairs of leaves whose geodesics cross within distance ``span`` of
    both feet.  An empty list certifies pairwise disjointness on the window."""
    bad = []
    for i in range(len(leaves)):
        for j in range(i + 1, len(leaves)):
            ip = geodesics_intersect(leaves[i].geodesic, leaves[j].geodesic)
            if ip is None:
                continue
            if (
                hp.dist(leaves[i].geodesic.base, ip) <= span
                and hp.dist(leaves[j].geodesic.base, ip) <= span
            ):
                bad.append((i, j))
    return bad


def leaf_samples(lf: Leaf, span: float, count: int = 201) -> np.ndarray:
    """(count, 2) half-plane samples of the leaf over u in [-span, span]."""
    out = np.empty((count, 2))
    for i, u in enumerate(np.linspace(-span, span, count)):
        q = hp.geodesic_state(lf.geodesic, float(u))[0]
        out[i] = (q.x, q.y)
    return out


def min_sample_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Minimum hyperbolic distance between two sample clouds (n, 2)."""
    dx = a[:, None, 0] - b[None, :, 0]
    dy = a[:, None, 1] - b[None, :, 1]
    c = 1.0 + (dx * dx + dy * dy) / (2.0 * a[:, None, 1] * b[None, :, 1])
    return float(np.arccosh(np.maximum(1.0, c)).min())
