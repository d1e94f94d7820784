"""Numeric verification of the structural identities of the metric family.

The frame checks cross two independent engines: covariant derivatives are
assembled from the curvature module's finite-difference Christoffel
symbols and applied to the closed-form frame fields, while the scalar
identities (the beta profile, the Jacobi equation for 1/a) are checked
with exact jet arithmetic.  Decay of mixed derivative products toward the
declared non-smooth set is sampled on a geometric ladder.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import curvature, expr
from ._quad import adaptive_simpson, gauss5
from .expr import BinOp, Call, DomainError, Num, OrderUnsupportedError, Var
from .metric import ChartPoint, MetricSpec, frame_at, metric_at, splitting_tensor

_F_ACTIVE_EPS = 1e-12


class NonMonotonePathError(Exception):
    """An integration path backtracked in x."""


@dataclass
class CheckResult:
    status: str  # "pass" | "fail" | "skipped"
    max_residual: float
    points: int
    tolerance: float

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "max_residual": self.max_residual,
            "points": self.points,
            "tolerance": self.tolerance,
        }


@dataclass
class CheckReport:
    checks: dict[str, CheckResult] = field(default_factory=dict)

    def add(self, name: str, residuals: list[float], tolerance: float) -> None:
        if not residuals:
            self.checks[name] = CheckResult("skipped", 0.0, 0, tolerance)
            return
        worst = max(residuals)
        status = "pass" if worst <= tolerance else "fail"
        self.checks[name] = CheckResult(status, worst, len(residuals), tolerance)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks.values())

    def to_json_dict(self) -> dict:
        return {name: c.to_json_dict() for name, c in self.checks.items()}


# ---------------------------------------------------------------------------
# Frame identities


def _frame_component_fn(spec: MetricSpec):
    def components(p: ChartPoint) -> np.ndarray:
        fr = frame_at(spec, p)
        return np.stack([fr.e1, fr.e2, fr.T])

    return components


def _offset(p: ChartPoint, i: int, d: float) -> ChartPoint:
    c = [p.x, p.u, p.v]
    c[i] += d
    return ChartPoint(*c)


def _frame_partials(spec: MetricSpec, p: ChartPoint, h: float) -> np.ndarray:
    """d[i, f, k]: i-th coordinate partial of frame field f, component k."""
    comp = _frame_component_fn(spec)

    def central(step: float) -> np.ndarray:
        out = np.empty((3, 3, 3))
        for i in range(3):
            out[i] = (comp(_offset(p, i, step)) - comp(_offset(p, i, -step))) / (2 * step)
        return out

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def _w_series_ast(hx: float):
    """cosh(u) - h sinh(u) as an AST in the jet variable."""
    return BinOp("-", Call("cosh", Var()), BinOp("*", Num(hx), Call("sinh", Var())))


def _beta_ast(hx: float):
    num = BinOp("-", BinOp("*", Num(hx), Call("cosh", Var())), Call("sinh", Var()))
    return BinOp("/", num, _w_series_ast(hx))


def check_frame_odes(
    spec: MetricSpec,
    points: list[ChartPoint],
    tol: float = 1e-6,
    fd_step: float = 1e-3,
) -> CheckReport:
    """Run the named frame identities at each point.

    Sub-checks: the eight covariant-derivative relations of the adapted
    frame (via finite-difference Christoffel symbols), vanishing of the
    rotation scalar alpha, the u-derivative laws for a and beta, the
    Jacobi equation for 1/a, nilpotency of the splitting tensor, and the
    bound |beta| <= 1.  Checks needing f(x) != 0 are skipped where f
    vanishes.  The beta profile is held to 1e-12 and the Jacobi equation
    to a relative 1e-9 regardless of ``tol``.
    """
    fld = curvature.field_from_spec(spec)
    cov_res: list[float] = []
    alpha_res: list[float] = []
    a_u_res: list[float] = []
    beta_profile_res: list[float] = []
    jacobi_res: list[float] = []
    nilpotent_res: list[float] = []
    beta_bound_res: list[float] = []
    beta_deriv_res: list[float] = []

    for p in points:
        g = metric_at(spec, p)
        fr = frame_at(spec, p)
        gamma = curvature.christoffel(fld, p, fd_step)
        partials = _frame_partials(spec, p, fd_step)
        frame_vecs = {"e1": fr.e1, "e2": fr.e2, "T": fr.T}
        frame_rows = {"e1": 0, "e2": 1, "T": 2}

        def nabla(xname: str, yname: str) -> np.ndarray:
            x = frame_vecs[xname]
            row = frame_rows[yname]
            y = frame_vecs[yname]
            out = np.einsum("i,ik->k", x, partials[:, row, :])
            out += np.einsum("kij,i,j->k", gamma, x, y)
            return out

        def gnorm(v: np.ndarray) -> float:
            return float(math.sqrt(max(0.0, v @ g @ v)))

        relations = (
            nabla("T", "e1"),
            nabla("T", "e2"),
            nabla("T", "T"),
            nabla("e1", "T"),
            nabla("e2", "T") + fr.a * fr.e1,
            nabla("e1", "e1"),
            nabla("e2", "e2") - fr.beta * fr.e1,
            nabla("e2", "e1") - fr.a * fr.T + fr.beta * fr.e2,
        )
        cov_res.append(max(gnorm(r) for r in relations))

        alpha1 = float(nabla("e1", "e1") @ g @ fr.e2)
        alpha2 = -float(nabla("e1", "e2") @ g @ fr.e1)
        alpha_res.append(max(abs(alpha1), abs(alpha2)))

        fx = spec.f.value(p.x)
        hx = spec.h.value(p.x)
        beta_ast = _beta_ast(hx)
        beta_jet = expr.ExprFunction(beta_ast).jet(p.u, 1)
        beta_deriv_res.append(abs(beta_jet.values[1] - fr.beta**2 + 1.0))

        if abs(fx) > _F_ACTIVE_EPS:
            a_ast = BinOp("/", Num(fx), _w_series_ast(hx))
            a_jet = expr.ExprFunction(a_ast).jet(p.u, 1)
            a_u_res.append(abs(a_jet.values[1] - fr.a * fr.beta))

            beta0 = hx
            tu = math.tanh(p.u)
            mobius = -(tu - beta0) / (1.0 - beta0 * tu)
            beta_profile_res.append(abs(fr.beta - mobius))

            inv_a_ast = BinOp("/", _w_series_ast(hx), Num(fx))
            ia = expr.ExprFunction(inv_a_ast).jet(p.u, 2)
            jacobi_res.append(abs(ia.values[2] - ia.values[0]) / abs(ia.values[0]))

        c = splitting_tensor(spec, p)
        trace = float(c[0, 0] + c[1, 1])
        det = float(c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0])
        a_v1 = frame_at(spec, ChartPoint(p.x, p.u, p.v + 1.0)).a
        a_v2 = frame_at(spec, ChartPoint(p.x, p.u, p.v - 1.0)).a
        nilpotent_res.append(max(abs(trace), abs(det), abs(a_v1 - fr.a), abs(a_v2 - fr.a)))

        if abs(hx) <= 1.0:
            beta_bound_res.append(max(0.0, abs(fr.beta) - 1.0))

    report = CheckReport()
    report.add("covariant_frame_relations", cov_res, tol)
    report.add("alpha_vanishes", alpha_res, tol)
    report.add("a_u_derivative", a_u_res, tol)
    report.add("beta_profile", beta_profile_res, 1e-12)
    report.add("inverse_a_jacobi", jacobi_res, 1e-9)
    report.add("splitting_nilpotent", nilpotent_res, 0.0)
    report.add("beta_bounded", beta_bound_res, tol)
    report.add("beta_derivative_identity", beta_deriv_res, 1e-9)
    return report


# ---------------------------------------------------------------------------
# Derivative-product decay toward the non-smooth set


def _monotone_suffix_max(vals: list[float]) -> float:
    """Largest value of the maximal non-increasing suffix of ``vals``."""
    i = len(vals) - 1
    while i > 0 and vals[i - 1] >= vals[i] * (1.0 - 1e-12):
        i -= 1
    return max(vals[i:])


def check_fh_decay(
    spec: MetricSpec,
    orders: tuple[int, int, int] = (3, 2, 2),
    tol: float = 1e-8,
) -> CheckReport:
    """Sample x -> x* geometrically and require every derivative product
    |f^(k) h^(l1) ... h^(lm)| to become monotonically small.

    ``orders`` is (k_max, m_max, l_max).  Ladder points falling on the
    non-smooth set itself (where jets do not exist) are dropped; a side
    with no usable samples is skipped.
    """
    k_max, m_max, l_max = orders
    stars = spec.nonsmooth_points()
    report = CheckReport()
    residuals: list[float] = []
    ladders = 0
    if not stars:
        report.add("fh_decay", [0.0], tol)
        return report
    combos = [()]
    for m in range(1, m_max + 1):
        combos.extend(itertools.combinations_with_replacement(range(l_max + 1), m))
    for x_star in stars:
        for side in (+1.0, -1.0):
            seqs: dict[tuple, list[float]] = {
                (k, c): [] for k in range(k_max + 1) for c in combos
            }
            usable = 0
            for n in range(3, 21):
                x = x_star + side * 2.0**-n
                if not spec.contains_x(x):
                    continue
                try:
                    fj = spec.f.jet(x, k_max)
                    hj = spec.h.jet(x, l_max)
                except (OrderUnsupportedError, DomainError):
                    continue
                usable += 1
                for k in range(k_max + 1):
                    for c in combos:
                        prod = abs(fj.values[k])
                        for l in c:
                            prod *= abs(hj.values[l])
                        seqs[(k, c)].append(prod)
            if usable == 0:
                continue
            ladders += 1
            for vals in seqs.values():
                residuals.append(_monotone_suffix_max(vals))
    if ladders == 0:
        report.checks["fh_decay"] = CheckResult("skipped", 0.0, 0, tol)
    else:
        report.add("fh_decay", residuals, tol)
    return report


# ---------------------------------------------------------------------------
# Completeness / irreducibility classification


@dataclass
class ClassifyReport:
    complete: bool
    sup_abs_h: float
    locally_irreducible: bool
    split_intervals: list[tuple[float, float]]
    grid_step: float

    def to_json_dict(self) -> dict:
        return {
            "complete": self.complete,
            "sup_abs_h": self.sup_abs_h,
            "locally_irreducible": self.locally_irreducible,
            "split_intervals": [list(iv) for iv in self.split_intervals],
            "grid_step": self.grid_step,
        }


def classify(
    spec: MetricSpec, grid_step: float = 0.01, half_width: float = 5.0
) -> ClassifyReport:
    """Grid classification: completeness needs the full real line and
    sup|h| <= 1; split intervals are maximal runs of length >= 2*grid_step
    where |f| < 1e-12 at every grid point."""
    if grid_step <= 0.0:
        raise ValueError("grid_step must be positive")
    lo = spec.domain[0] if math.isfinite(spec.domain[0]) else -half_width
    hi = spec.domain[1] if math.isfinite(spec.domain[1]) else half_width
    # keep interior to the open domain
    if math.isfinite(spec.domain[0]):
        lo += grid_step * 0.5
    if math.isfinite(spec.domain[1]):
        hi -= grid_step * 0.5
    n = max(2, int(round((hi - lo) / grid_step)) + 1)
    xs = np.linspace(lo, hi, n)
    habs = [abs(spec.h.value(float(x))) for x in xs]
    sup_h = max(habs)
    fzero = [abs(spec.f.value(float(x))) < _F_ACTIVE_EPS for x in xs]
    intervals: list[tuple[float, float]] = []
    start = None
    for i, z in enumerate(fzero):
        if z and start is None:
            start = i
        if (not z or i == n - 1) and start is not None:
            end = i if z else i - 1
            if xs[end] - xs[start] >= 2.0 * grid_step - 1e-15:
                intervals.append((float(xs[start]), float(xs[end])))
            start = None
    unbounded = math.isinf(spec.domain[0]) and math.isinf(spec.domain[1])
    complete = unbounded and sup_h <= 1.0 + 1e-12
    return ClassifyReport(
        complete=complete,
        sup_abs_h=float(sup_h),
        locally_irreducible=not intervals,
        split_intervals=intervals,
        grid_step=grid_step,
    )


# ---------------------------------------------------------------------------
# The leaf-separation invariant


def _density(spec: MetricSpec, p: ChartPoint, vel: np.ndarray) -> float:
    g = metric_at(spec, p)
    fr = frame_at(spec, p)
    return abs(fr.a * float(vel @ g @ fr.e2))


def a_invariant(
    spec: MetricSpec,
    x0: float,
    x1: float,
    path: list[ChartPoint] | None = None,
) -> float:
    """Integral of |a <gamma', e2>| between the leaves at x0 and x1.

    With no path given, integrates along the axis (x, 0, 0), which reduces
    to the integral of |f|; an explicit path must be strictly monotone in
    x (no back-tracking) and yields the same value by construction.
    """
    if x1 < x0:
        raise ValueError("x0 must not exceed x1")
    if path is None:
        return adaptive_simpson(
            lambda x: _density(spec, ChartPoint(x, 0.0, 0.0), np.array([1.0, 0.0, 0.0])),
            x0,
            x1,
            tol=1e-10,
            breakpoints=spec.nonsmooth_points(),
        )
    xs = [p.x for p in path]
    if abs(xs[0] - x0) > 1e-9 or abs(xs[-1] - x1) > 1e-9:
        raise NonMonotonePathError("path endpoints do not match x0, x1")
    if any(b <= a for a, b in zip(xs[:-1], xs[1:])):
        raise NonMonotonePathError("path x-coordinates must be strictly increasing")
    total = 0.0
    for p, q in zip(path[:-1], path[1:]):
        vel = q.as_array() - p.as_array()

        def integrand(t: float, p=p, vel=vel) -> float:
            pt = ChartPoint(p.x + t * vel[0], p.u + t * vel[1], p.v + t * vel[2])
            return _density(spec, pt, vel)

        total += gauss5(integrand, 0.0, 1.0)
    return total
