"""Finite-difference tensor engine: symbols, curvature, Ricci eigenvalues."""

import math

import numpy as np
import pytest

from curvhom import curvature, expr
from curvhom.curvature import (
    MetricField,
    SingularMetricError,
    christoffel,
    curvature_report,
    field_from_spec,
    identity_field,
    ricci_eigenvalues,
    riemann,
)
from curvhom.metric import ChartPoint, MetricSpec


def _spec(f_src: str, h_src: str, **kw) -> MetricSpec:
    return MetricSpec(
        expr.function_from_source(f_src), expr.function_from_source(h_src), **kw
    )


def product_christoffel(u: float) -> np.ndarray:
    """Hand-derived symbols of diag(cosh^2 u, 1, 1)."""
    gamma = np.zeros((3, 3, 3))
    gamma[0, 0, 1] = gamma[0, 1, 0] = math.tanh(u)
    gamma[1, 0, 0] = -math.cosh(u) * math.sinh(u)
    return gamma


def test_christoffel_identity_field():
    g = christoffel(identity_field(), ChartPoint(0.3, -1.0, 2.0))
    assert np.max(np.abs(g)) == 0.0


def test_christoffel_product_closed_form():
    field = field_from_spec(_spec("0", "0"))
    p = ChartPoint(0.0, 1.0, 0.0)
    g = christoffel(field, p)
    assert np.max(np.abs(g - product_christoffel(1.0))) < 1e-9


def test_christoffel_symmetry():
    rng = np.random.default_rng(3)
    field = field_from_spec(_spec("sin(x)", "0.5*tanh(x)"))
    for _ in range(10):
        p = ChartPoint(*rng.uniform(-1.5, 1.5, size=3))
        g = christoffel(field, p)
        assert np.max(np.abs(g - np.swapaxes(g, 1, 2))) < 1e-9


def test_christoffel_rejects_bad_step():
    with pytest.raises(ValueError):
        christoffel(identity_field(), ChartPoint(0, 0, 0), 0.0)


def test_riemann_identity_flat():
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = ChartPoint(*rng.uniform(-3, 3, size=3))
        r = riemann(identity_field(), p)
        assert np.max(np.abs(r)) < 1e-9


def test_riemann_product_values():
    field = field_from_spec(_spec("0", "0"))
    r0 = riemann(field, ChartPoint(0.0, 0.0, 0.0))
    assert r0[0, 1, 0, 1] == pytest.approx(-1.0, abs=1e-7)
    # all components touching the v index vanish
    assert np.max(np.abs(r0[2])) < 1e-8
    assert np.max(np.abs(r0[:, 2])) < 1e-8
    assert np.max(np.abs(r0[:, :, 2])) < 1e-8
    assert np.max(np.abs(r0[:, :, :, 2])) < 1e-8

    r1 = riemann(field, ChartPoint(0.0, 1.0, 0.0))
    assert r1[0, 1, 0, 1] == pytest.approx(-math.cosh(1.0) ** 2, rel=1e-7)


def test_riemann_symmetries_and_bianchi():
    field = field_from_spec(_spec("sin(x)", "0.5*tanh(x)"))
    rng = np.random.default_rng(7)
    for _ in range(5):
        p = ChartPoint(*rng.uniform(-1.5, 1.5, size=3))
        rep = curvature_report(field, p)
        r = rep.riemann_lowered
        tol = max(10.0 * rep.tolerance, 1e-9)
        assert np.max(np.abs(r + np.swapaxes(r, 0, 1))) < tol
        assert np.max(np.abs(r + np.swapaxes(r, 2, 3))) < tol
        assert np.max(np.abs(r - np.transpose(r, (2, 3, 0, 1)))) < tol
        bianchi = (
            r + np.transpose(r, (0, 2, 3, 1)) + np.transpose(r, (0, 3, 1, 2))
        )
        assert np.max(np.abs(bianchi)) < tol


def test_ricci_eigenvalues_product():
    field = field_from_spec(_spec("0", "0"))
    rng = np.random.default_rng(11)
    for _ in range(5):
        p = ChartPoint(*rng.uniform(-1.5, 1.5, size=3))
        w, kernel = ricci_eigenvalues(field, p)
        assert np.allclose(w, [-1.0, -1.0, 0.0], atol=1e-4)
        angle = math.acos(min(1.0, abs(kernel[2]) / np.linalg.norm(kernel)))
        assert angle < 1e-4


def test_ricci_eigenvalues_generic_spec():
    field = field_from_spec(_spec("sin(x)", "0.5*tanh(x)"))
    p = ChartPoint(0.3, 0.2, -0.1)
    w, kernel = ricci_eigenvalues(field, p, 1e-3)
    assert np.allclose(w, [-1.0, -1.0, 0.0], atol=1e-4)
    # oracle: same computation at two steps must agree (Richardson stability)
    w2, _ = ricci_eigenvalues(field, p, 5e-4)
    assert np.allclose(w, w2, atol=1e-6)


def test_ricci_identity_flat():
    w, _ = ricci_eigenvalues(identity_field(), ChartPoint(1.0, 2.0, 3.0))
    assert np.allclose(w, [0.0, 0.0, 0.0], atol=1e-10)


def test_scalar_minus_two():
    for f_src, h_src in (("0", "0"), ("1", "0"), ("sin(x)", "0.5*tanh(x)")):
        field = field_from_spec(_spec(f_src, h_src))
        rep = curvature_report(field, ChartPoint(0.45, -0.8, 1.2))
        assert rep.scalar == pytest.approx(-2.0, abs=1e-3)


def test_kernel_contraction_small():
    # contracting the curvature tensor against the kernel leaves ~nothing
    field = field_from_spec(_spec("sin(x)", "0.5*tanh(x)"))
    p = ChartPoint(0.4, 0.3, -0.2)
    rep = curvature_report(field, p)
    k = np.array(rep.kernel)
    contracted = np.einsum("ijkl,j->ikl", rep.riemann_lowered, k)
    assert np.max(np.abs(contracted)) < 1e-4


def test_fd_convergence_rate():
    # halving the step must cut eigenvalue deviation by at least 4
    field = field_from_spec(_spec("sin(x)", "0.5*tanh(x)"))
    p = ChartPoint(0.35, 0.6, -0.4)
    target = np.array([-1.0, -1.0, 0.0])

    def deviation(step):
        w, _ = ricci_eigenvalues(field, p, step)
        return float(np.max(np.abs(w - target)))

    d1 = deviation(0.16)
    d2 = deviation(0.08)
    assert d2 < d1 / 4.0


def test_valid_radius_and_singular():
    spec = _spec("1", "0", nonsmooth=(0.25,))
    field = field_from_spec(spec)
    assert field.valid_radius(ChartPoint(0.35, 0, 0)) == pytest.approx(0.1)
    assert identity_field().valid_radius(ChartPoint(0, 0, 0)) == math.inf
    degenerate = MetricField(lambda p: np.zeros((3, 3)))
    with pytest.raises(SingularMetricError):
        christoffel(degenerate, ChartPoint(0, 0, 0))


def test_report_json_round_trip():
    import json

    field = field_from_spec(_spec("1", "0"))
    rep = curvature_report(field, ChartPoint(0.2, 0.4, -0.6))
    data = json.loads(rep.to_json())
    assert set(data) == {
        "point",
        "gamma",
        "riemann",
        "ricci",
        "eigenvalues",
        "kernel",
        "scalar",
        "tolerance",
    }
    assert data["point"] == [0.2, 0.4, -0.6]
    assert len(data["eigenvalues"]) == 3
    assert data["scalar"] == pytest.approx(sum(data["eigenvalues"]))
