"""Finite-difference curvature of a metric field on the (x, u, v) chart.

Christoffel symbols come from Richardson-extrapolated central differences
of the metric, the curvature tensor from central differences of the
Christoffel symbols, and Ricci eigenvalues from a Cholesky-reduced 3x3
symmetric eigenproblem.  This engine never sees the closed-form frame
formulas, which makes it an independent cross-check for them.

Index conventions: ``riemann`` returns the fully lowered tensor R with
R[i, j, i, j] = sec(d_i, d_j) * (g_ii g_jj - g_ij^2), so the product metric
has R[x, u, x, u] = -cosh^2(u).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .metric import ChartPoint, MetricSpec, metric_at


class SingularMetricError(Exception):
    """The metric matrix was not invertible (or not positive definite)."""


class MetricField:
    """An evaluable map from chart points to symmetric 3x3 metric matrices."""

    def __init__(
        self,
        fn: Callable[[ChartPoint], np.ndarray],
        valid_radius: Optional[Callable[[ChartPoint], float]] = None,
        label: str = "custom",
    ):
        self._fn = fn
        self._radius = valid_radius
        self.label = label

    def at(self, p: ChartPoint) -> np.ndarray:
        return self._fn(p)

    def valid_radius(self, p: ChartPoint) -> float:
        """Radius of the chart neighborhood on which the field is smooth."""
        if self._radius is None:
            return math.inf
        return self._radius(p)


def field_from_spec(spec: MetricSpec) -> MetricField:
    def radius(p: ChartPoint) -> float:
        return spec.nonsmooth_distance(p.x)

    return MetricField(lambda p: metric_at(spec, p), radius, label="spec")


def identity_field() -> MetricField:
    return MetricField(lambda p: np.eye(3), label="identity")


def _offset(p: ChartPoint, i: int, delta: float) -> ChartPoint:
    coords = [p.x, p.u, p.v]
    coords[i] += delta
    return ChartPoint(*coords)


def _metric_derivatives(field: MetricField, p: ChartPoint, step: float) -> np.ndarray:
    """dg[i] = central-difference estimate of the i-th partial of g."""
    dg = np.empty((3, 3, 3))
    for i in range(3):
        gp = field.at(_offset(p, i, step))
        gm = field.at(_offset(p, i, -step))
        dg[i] = (gp - gm) / (2.0 * step)
    return dg


def _christoffel_single(field: MetricField, p: ChartPoint, step: float) -> np.ndarray:
    g = field.at(p)
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError(f"metric not invertible at {p}") from exc
    dg = _metric_derivatives(field, p, step)
    gamma = np.empty((3, 3, 3))
    for k in range(3):
        for i in range(3):
            for j in range(3):
                s = 0.0
                for l in range(3):
                    s += ginv[k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j])
                gamma[k, i, j] = 0.5 * s
    return gamma


def christoffel(field: MetricField, p: ChartPoint, fd_step: float = 1e-3) -> np.ndarray:
    """Gamma[k, i, j], Richardson-extrapolated from steps h and h/2."""
    if fd_step <= 0.0:
        raise ValueError("fd_step must be positive")
    gh = _christoffel_single(field, p, fd_step)
    gh2 = _christoffel_single(field, p, 0.5 * fd_step)
    return (4.0 * gh2 - gh) / 3.0


def _riemann_single(field: MetricField, p: ChartPoint, fd_step: float, gamma_step: float) -> np.ndarray:
    """Lowered curvature tensor with Gamma-derivative step ``fd_step``."""
    g = field.at(p)
    gamma = christoffel(field, p, gamma_step)
    dgamma = np.empty((3, 3, 3, 3))
    for i in range(3):
        gp = christoffel(field, _offset(p, i, fd_step), gamma_step)
        gm = christoffel(field, _offset(p, i, -fd_step), gamma_step)
        dgamma[i] = (gp - gm) / (2.0 * fd_step)
    # curvature operator: R(d_i, d_j) d_k = rup[l, i, j, k] d_l
    rup = np.empty((3, 3, 3, 3))
    for l in range(3):
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    s = dgamma[i][l, j, k] - dgamma[j][l, i, k]
                    for m in range(3):
                        s += gamma[l, i, m] * gamma[m, j, k] - gamma[l, j, m] * gamma[m, i, k]
                    rup[l, i, j, k] = s
    lowered = np.einsum("lijk,lm->ijkm", rup, g)
    # reorder so that R[i, j, i, j] carries the sectional sign directly
    return np.swapaxes(lowered, 2, 3)


def riemann(field: MetricField, p: ChartPoint, fd_step: float = 1e-3) -> np.ndarray:
    """Fully lowered curvature tensor, Richardson-extrapolated in the outer step."""
    r1 = _riemann_single(field, p, fd_step, fd_step)
    r2 = _riemann_single(field, p, 0.5 * fd_step, 0.5 * fd_step)
    return (4.0 * r2 - r1) / 3.0


def _riemann_with_residual(
    field: MetricField, p: ChartPoint, fd_step: float
) -> tuple[np.ndarray, float]:
    r1 = _riemann_single(field, p, fd_step, fd_step)
    r2 = _riemann_single(field, p, 0.5 * fd_step, 0.5 * fd_step)
    rich = (4.0 * r2 - r1) / 3.0
    residual = float(np.max(np.abs(r2 - r1)) / 3.0)
    return rich, residual


def ricci_from_riemann(g: np.ndarray, riem: np.ndarray) -> np.ndarray:
    """Contract the lowered tensor against g^{-1} to the Ricci form."""
    ginv = np.linalg.inv(g)
    # with the storage convention here, Ric_{jk} = g^{il} R_{i j l k}
    ric = np.einsum("il,ijlk->jk", ginv, riem)
    return 0.5 * (ric + ric.T)


def generalized_eigh(ric: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of Ric v = lambda g v via Cholesky reduction of g.

    Returns eigenvalues ascending and the matrix of g-orthonormal
    eigenvectors as columns.
    """
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError("metric not positive definite") from exc
    m1 = np.linalg.solve(L, ric)
    b = np.linalg.solve(L, m1.T).T
    b = 0.5 * (b + b.T)
    w, q = np.linalg.eigh(b)
    vecs = np.linalg.solve(L.T, q)
    return w, vecs


def ricci_eigenvalues(
    field: MetricField, p: ChartPoint, fd_step: float = 1e-3
) -> tuple[np.ndarray, np.ndarray]:
    """Sorted Ricci eigenvalues and the kernel direction at ``p``.

    The kernel is the eigenvector of the eigenvalue nearest zero,
    normalized to unit coordinate length.
    """
    g = field.at(p)
    riem = riemann(field, p, fd_step)
    ric = ricci_from_riemann(g, riem)
    w, vecs = generalized_eigh(ric, g)
    k = int(np.argmin(np.abs(w)))
    kernel = vecs[:, k]
    kernel = kernel / np.linalg.norm(kernel)
    if kernel[np.argmax(np.abs(kernel))] < 0.0:
        kernel = -kernel
    return w, kernel


@dataclass
class CurvatureReport:
    """Everything the tensor engine knows about one point."""

    point: ChartPoint
    christoffel: np.ndarray
    riemann_lowered: np.ndarray
    ricci: np.ndarray
    eigenvalues: tuple[float, float, float]
    kernel: tuple[float, float, float]
    scalar: float
    tolerance: float

    def to_json_dict(self) -> dict:
        return {
            "point": [self.point.x, self.point.u, self.point.v],
            "gamma": self.christoffel.tolist(),
            "riemann": self.riemann_lowered.tolist(),
            "ricci": self.ricci.tolist(),
            "eigenvalues": list(self.eigenvalues),
            "kernel": list(self.kernel),
            "scalar": self.scalar,
            "tolerance": self.tolerance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def curvature_report(
    field: MetricField, p: ChartPoint, fd_step: float = 1e-3
) -> CurvatureReport:
    g = field.at(p)
    gamma = christoffel(field, p, fd_step)
    riem, residual = _riemann_with_residual(field, p, fd_step)
    ric = ricci_from_riemann(g, riem)
    w, vecs = generalized_eigh(ric, g)
    k = int(np.argmin(np.abs(w)))
    kernel = vecs[:, k]
    kernel = kernel / np.linalg.norm(kernel)
    if kernel[np.argmax(np.abs(kernel))] < 0.0:
        kernel = -kernel
    return CurvatureReport(
        point=p,
        christoffel=gamma,
        riemann_lowered=riem,
        ricci=ric,
        eigenvalues=(float(w[0]), float(w[1]), float(w[2])),
        kernel=(float(kernel[0]), float(kernel[1]), float(kernel[2])),
        scalar=float(np.sum(w)),
        tolerance=residual,
    )
