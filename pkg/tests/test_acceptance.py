"""Acceptance suite: one test per criterion, one pass/fail line each.

Tolerances are pinned here and nowhere else; every expected number is
either a closed-form value checked in the module tests or comes from an
independent oracle coded in this repository's test files.
"""

import json
import math
import time

import numpy as np
import pytest

from curvhom import cli, curvature, expr, foliation as fo, hyperbolic as hp, lyndon, verify
from curvhom.gallery import GALLERY
from curvhom.metric import ChartPoint, MetricSpec
from curvhom.verify import check_fh_decay, check_frame_odes, classify

P0 = hp.HPoint(0.0, 1.0)


def _report(num: int, name: str) -> None:
    print(f"criterion {num:02d} {name}: PASS")


def _spec(f_src: str, h_src: str) -> MetricSpec:
    return MetricSpec(
        expr.function_from_source(f_src), expr.function_from_source(h_src)
    )


_UV = ((0.0, 0.0), (1.0, -0.5), (-1.7, 0.8), (0.5, 1.3))


def _grid(xs):
    return [ChartPoint(x, u, v) for x in xs for (u, v) in _UV]


def _signature_specs():
    return [
        ("product", _spec("0", "0"), _grid((-1.5, -0.6, 0.2, 0.9, 1.8))),
        ("f_one", _spec("1", "0"), _grid((-1.5, -0.6, 0.2, 0.9, 1.8))),
        ("sine", _spec("sin(x)", "0.5*tanh(x)"), _grid((-1.5, -0.6, 0.2, 0.9, 1.8))),
        (
            "cantor",
            GALLERY["cantor"].spec(),
            _grid((0.5, 1 / 6, 5 / 6, 1 / 18, 17 / 18)),
        ),
    ]


@pytest.fixture(scope="module")
def signature_sweep():
    """The criterion-1 point sweep, shared with the scalar check of
    criterion 4: rows of (spec name, point, eigenvalues, angle, scalar)."""
    start = time.monotonic()
    rows = []
    for name, spec, points in _signature_specs():
        field = curvature.field_from_spec(spec)
        assert len(points) >= 20
        for p in points:
            rep = curvature.curvature_report(field, p, 1e-3)
            g = field.at(p)
            angle = cli._kernel_angle(g, np.array(rep.kernel))
            rows.append((name, p, rep.eigenvalues, angle, rep.scalar))
    return time.monotonic() - start, rows


def test_criterion_01_ricci_signature(signature_sweep):
    elapsed, rows = signature_sweep
    for name, p, w, angle, _ in rows:
        assert abs(p.u) <= 2.0
        assert abs(w[0] + 1.0) <= 1e-4, (name, p, w)
        assert abs(w[1] + 1.0) <= 1e-4, (name, p, w)
        assert abs(w[2]) <= 1e-4, (name, p, w)
        assert angle <= 1e-4, (name, p, angle)
    assert elapsed < 10.0, f"signature sweep took {elapsed:.1f}s"
    _report(1, f"ricci signature ({elapsed:.1f}s for {len(rows)} points)")


def test_criterion_02_flat_oracle():
    rng = np.random.default_rng(2)
    field = curvature.identity_field()
    for _ in range(10):
        p = ChartPoint(*rng.uniform(-3, 3, size=3))
        r = curvature.riemann(field, p, 1e-3)
        assert np.max(np.abs(r)) < 1e-9
    _report(2, "flat oracle")


def test_criterion_03_frame_ode_suite():
    points = _grid((-1.4, -0.5, 0.3, 1.0, 1.7))
    for name, spec in (
        ("f_one", _spec("1", "0")),
        ("sine", _spec("sin(x)", "0.5*tanh(x)")),
    ):
        report = check_frame_odes(spec, points, tol=1e-6)
        for cname, chk in report.checks.items():
            assert chk.status == "pass", (name, cname, chk)
        assert report.checks["covariant_frame_relations"].max_residual < 1e-6
        assert report.checks["beta_profile"].max_residual <= 1e-12
        assert report.checks["inverse_a_jacobi"].max_residual <= 1e-9
        # nilpotency is exact: trace and determinant are integer zero
        assert report.checks["splitting_nilpotent"].max_residual == 0.0
    _report(3, "frame ODE suite")


def test_criterion_04_scalar_curvature_and_beta_identity(signature_sweep):
    _, rows = signature_sweep
    for name, p, _, _, scalar in rows:
        assert abs(scalar + 2.0) <= 1e-3, (name, p, scalar)
    # e1(beta) - beta^2 = -1 to 1e-9 across specs and points
    points = _grid((-1.3, -0.4, 0.6, 1.5))
    for spec in (_spec("1", "0"), _spec("sin(x)", "0.5*tanh(x)"), _spec("0", "0.8*sin(x)")):
        rep = check_frame_odes(spec, points, tol=1e-6)
        chk = rep.checks["beta_derivative_identity"]
        assert chk.status == "pass" and chk.max_residual <= 1e-9
    _report(4, "scalar curvature -2 and beta derivative identity")


def test_criterion_05_foliation_criterion():
    eps = fo.focal_distance(-2.0)
    assert eps == pytest.approx(math.atanh(0.5), abs=1e-6)

    # supercritical curvature: two nearby leaves meet within eps + 0.1
    right = hp.HTangent(P0, 1.0, 0.0)
    c_bad = fo.integrate_turning_curve(
        expr.function_from_source("-2*x"), P0, right, (-0.3, 0.3), 1e-4
    )
    window = eps + 0.1
    leaves = [fo.leaf(c_bad, 0.0), fo.leaf(c_bad, 0.05)]
    assert fo.intersecting_leaf_pairs(leaves, span=window) == [(0, 1)]
    a = fo.leaf_samples(leaves[0], window, count=2001)
    b = fo.leaf_samples(leaves[1], window, count=2001)
    assert fo.min_sample_distance(a, b) < 1e-4

    # every |h| <= 1 gallery curve: 41 leaves pairwise disjoint on the window
    for name, entry in GALLERY.items():
        spec = entry.spec()
        H = expr.integral_of(spec.h)
        curve = fo.integrate_turning_curve(H, P0, right, entry.t_range, 1e-4)
        lo, hi = curve.span
        leaves = [fo.leaf(curve, float(s)) for s in np.linspace(lo, hi, 41)]
        crossings = fo.intersecting_leaf_pairs(leaves, span=5.0)
        assert crossings == [], (name, crossings[:3])
    _report(5, "foliation criterion (focal crossing and 5 disjoint galleries)")


def test_criterion_06_turning_integrator():
    up = hp.HTangent(P0, 0.0, 1.0)
    c = fo.integrate_turning_curve(
        expr.function_from_source("0"), P0, up, (0.0, 1.0), 1e-4
    )
    end = c.point_at(1.0)
    err = math.hypot(end.x - 0.0, end.y - math.e)
    assert err < 1e-8

    right = hp.HTangent(P0, 1.0, 0.0)
    c2 = fo.integrate_turning_curve(
        expr.function_from_source("x"), P0, right, (0.0, 1.0), 1e-4
    )
    assert float(np.max(np.abs(c2.points[:, 1] - 1.0))) < 1e-6
    _report(6, "turning-angle integrator")


def cantor_H_series(t: float, depth: int = 45) -> float:
    """Independent self-similar series evaluation (see test_expr)."""
    if t <= 0.0:
        return 0.0
    t = min(t, 1.0)
    acc, pos, x = 0.0, 0.0, t
    for n in range(1, depth + 1):
        x *= 3.0
        d = min(int(x), 2)
        x -= d
        w = 3.0**-n
        sign = -1.0 if n % 2 else 1.0
        if d >= 1:
            acc += sign * -1.0 * w / 5.0
        if d == 2:
            acc += sign * w
        if d == 1:
            return acc + (t - pos - w) * sign
        pos += d * w
    return acc


def test_criterion_07_cantor_example():
    H = expr.builtin("cantor_H")
    assert abs(H.value(1.0) - (-0.2)) <= 1e-3
    assert abs(cantor_H_series(1.0) - (-0.2)) < 1e-12
    assert abs(H.value(1.0) - cantor_H_series(1.0)) <= 1e-3

    rng = np.random.default_rng(77)
    ss = rng.uniform(-0.3, 1.3, size=10_000)
    ts = rng.uniform(-0.3, 1.3, size=10_000)
    for s, t in zip(ss, ts):
        assert abs(H.value(s) - H.value(t)) <= abs(s - t) * (1 + 1e-12) + 1e-15

    rep = check_fh_decay(GALLERY["cantor"].spec(), (3, 2, 2), 1e-8)
    assert rep.checks["fh_decay"].status == "pass"
    _report(7, "cantor example (quadrature, Lipschitz, decay)")


def test_criterion_08_a_invariant():
    spec = _spec("sin(x)", "0")
    assert verify.a_invariant(spec, 0.0, math.pi) == pytest.approx(2.0, abs=1e-8)
    path = [
        ChartPoint(x, 0.3 * math.sin(x), 0.1 * x)
        for x in np.linspace(0.0, math.pi, 201)
    ]
    assert verify.a_invariant(spec, 0.0, math.pi, path) == pytest.approx(2.0, abs=1e-6)

    spec2 = _spec("sin(x)", "0.5*tanh(x)")
    a = verify.a_invariant(spec2, -0.4, 0.9)
    b = verify.a_invariant(spec2, 0.9, 2.2)
    c = verify.a_invariant(spec2, -0.4, 2.2)
    assert abs(a + b - c) <= 1e-9
    _report(8, "leaf separation invariant")


def test_criterion_09_lyndon_axioms():
    start = time.monotonic()
    violations = lyndon.check_axioms(5, lyndon.OverlapConvention.RIGHT)
    elapsed = time.monotonic() - start
    assert violations == []
    assert elapsed < 60.0, f"axiom sweep took {elapsed:.1f}s"
    assert lyndon.non_archimedean(4) == []
    _report(9, f"length-function axioms ({elapsed:.1f}s)")


def test_criterion_10_completeness_classifier():
    rep = classify(_spec("0", "0"), 0.01)
    assert rep.complete and not rep.locally_irreducible

    rep2 = classify(_spec("sin(x)", "0.5*tanh(x)"), 0.01)
    assert rep2.complete and rep2.locally_irreducible

    rep3 = classify(_spec("1", "1.5"), 0.01)
    assert not rep3.complete
    _report(10, "completeness classifier")


def test_criterion_11_determinism(tmp_path, capsys):
    cfg = tmp_path / "spec.toml"
    cfg.write_text(
        '[metric]\nf = "sin(x)"\nh = "0.5*tanh(x)"\n\n'
        "[check]\npoints = [[0.3, 0.2, -0.1], [1.0, -0.9, 0.4]]\n"
    )
    assert cli.run(["check", str(cfg)]) == 0
    first = capsys.readouterr().out
    assert cli.run(["check", str(cfg)]) == 0
    second = capsys.readouterr().out
    assert first.encode("utf-8") == second.encode("utf-8")
    json.loads(first)  # well-formed
    _report(11, "byte-identical reports")
