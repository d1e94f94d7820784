"""Identity suite: frame relations, decay, classification, leaf invariant."""

import math

import numpy as np
import pytest

from curvhom import expr, verify
from curvhom.metric import CantorNonsmoothSet, ChartPoint, MetricSpec
from curvhom.verify import (
    NonMonotonePathError,
    a_invariant,
    check_fh_decay,
    check_frame_odes,
    classify,
)


def _spec(f_src: str, h_src: str, **kw) -> MetricSpec:
    return MetricSpec(
        expr.function_from_source(f_src), expr.function_from_source(h_src), **kw
    )


_POINTS = [
    ChartPoint(0.0, 1.0, 0.0),
    ChartPoint(0.5, -1.2, 0.3),
    ChartPoint(1.1, 0.4, -0.8),
    ChartPoint(-0.7, 1.8, 1.1),
    ChartPoint(-1.4, -0.6, -1.3),
]


def test_frame_odes_split_case():
    report = check_frame_odes(_spec("0", "0"), _POINTS, tol=1e-6)
    status = {n: c.status for n, c in report.checks.items()}
    assert status["covariant_frame_relations"] == "pass"
    assert status["alpha_vanishes"] == "pass"
    assert status["splitting_nilpotent"] == "pass"
    assert status["beta_bounded"] == "pass"
    # a == 0 disables the checks that divide by it
    assert status["a_u_derivative"] == "skipped"
    assert status["beta_profile"] == "skipped"
    assert status["inverse_a_jacobi"] == "skipped"
    assert report.passed


@pytest.mark.parametrize("f_src,h_src", [("1", "0"), ("sin(x)", "0.5*tanh(x)")])
def test_frame_odes_active_specs(f_src, h_src):
    report = check_frame_odes(_spec(f_src, h_src), _POINTS, tol=1e-6)
    for name, chk in report.checks.items():
        assert chk.status == "pass", (name, chk)
    assert report.checks["covariant_frame_relations"].max_residual < 1e-6
    assert report.checks["beta_profile"].max_residual <= 1e-12
    assert report.checks["inverse_a_jacobi"].max_residual <= 1e-9
    assert report.checks["splitting_nilpotent"].max_residual == 0.0
    assert report.checks["beta_derivative_identity"].max_residual <= 1e-9


def test_beta_profile_example_values():
    # with h = 0 the beta profile is -tanh(u)
    from curvhom.metric import frame_at

    spec = _spec("1", "0")
    for u in (-2.0, -1.0, 1.0, 2.0):
        fr = frame_at(spec, ChartPoint(0.0, u, 0.0))
        assert abs(fr.beta + math.tanh(u)) <= 1e-12


def test_frame_residuals_scale_with_step():
    spec = _spec("sin(x)", "0.5*tanh(x)")
    pts = _POINTS[:3]
    r_coarse = check_frame_odes(spec, pts, tol=1.0, fd_step=4e-2)
    r_fine = check_frame_odes(spec, pts, tol=1.0, fd_step=2e-2)
    c = r_coarse.checks["covariant_frame_relations"].max_residual
    f = r_fine.checks["covariant_frame_relations"].max_residual
    assert f < c / 4.0  # Richardson makes it better than O(step^2)


def test_decay_flat_exp_with_step():
    spec = MetricSpec(
        expr.builtin("flat_exp"), expr.builtin("step_pm1"), nonsmooth=(0.0,)
    )
    rep = check_fh_decay(spec, (3, 2, 2), 1e-8)
    assert rep.checks["fh_decay"].status == "pass"


def test_decay_fails_for_constant_f():
    spec = MetricSpec(
        expr.function_from_source("1"), expr.builtin("step_pm1"), nonsmooth=(0.0,)
    )
    rep = check_fh_decay(spec, (3, 2, 2), 1e-8)
    assert rep.checks["fh_decay"].status == "fail"


def test_decay_zero_f_passes_vacuously():
    spec = MetricSpec(
        expr.function_from_source("0"), expr.builtin("step_pm1"), nonsmooth=(0.0,)
    )
    rep = check_fh_decay(spec, (3, 2, 2), 1e-8)
    assert rep.checks["fh_decay"].status == "pass"
    assert rep.checks["fh_decay"].max_residual == 0.0


def test_decay_cantor_gallery():
    spec = MetricSpec(
        expr.CantorFlat(), expr.builtin("cantor_h"), nonsmooth=CantorNonsmoothSet()
    )
    rep = check_fh_decay(spec, (3, 2, 2), 1e-8)
    assert rep.checks["fh_decay"].status == "pass"


def test_classify_product():
    rep = classify(_spec("0", "0"), 0.01)
    assert rep.complete
    assert not rep.locally_irreducible
    assert len(rep.split_intervals) == 1
    lo, hi = rep.split_intervals[0]
    assert lo <= -4.9 and hi >= 4.9


def test_classify_sine():
    rep = classify(_spec("sin(x)", "0.5*tanh(x)"), 0.01)
    assert rep.complete
    assert rep.locally_irreducible
    assert rep.sup_abs_h <= 0.5
    # oracle: sign changes of sin keep its zeros isolated on the grid
    xs = np.arange(-5, 5, 0.01)
    signs = np.sign(np.sin(xs))
    assert np.count_nonzero(signs[:-1] * signs[1:] < 0) >= 2


def test_classify_incomplete():
    rep = classify(_spec("1", "1.5"), 0.01)
    assert not rep.complete
    assert rep.sup_abs_h == pytest.approx(1.5)
    rep2 = classify(_spec("1", "0", domain=(0.0, 2.0)), 0.01)
    assert not rep2.complete  # bounded x-interval


def test_a_invariant_sine():
    spec = _spec("sin(x)", "0")
    val = a_invariant(spec, 0.0, math.pi)
    assert val == pytest.approx(2.0, abs=1e-8)
    # oracle: dense composite Simpson of |sin|
    xs = np.linspace(0, math.pi, 20001)
    w = np.ones(len(xs))
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    ref = (xs[1] - xs[0]) / 3.0 * float(np.dot(w, np.abs(np.sin(xs))))
    assert val == pytest.approx(ref, abs=1e-8)


def test_a_invariant_zero_f():
    assert a_invariant(_spec("0", "0.3*sin(x)"), -3.0, 5.0) == 0.0


def test_a_invariant_path_independence():
    spec = _spec("sin(x)", "0")
    path = [
        ChartPoint(x, 0.3 * math.sin(x), 0.1 * x)
        for x in np.linspace(0.0, math.pi, 201)
    ]
    val = a_invariant(spec, 0.0, math.pi, path)
    assert val == pytest.approx(2.0, abs=1e-6)


def test_a_invariant_additive():
    spec = _spec("sin(x)", "0.5*tanh(x)")
    a = a_invariant(spec, -0.5, 1.0)
    b = a_invariant(spec, 1.0, 2.7)
    c = a_invariant(spec, -0.5, 2.7)
    assert a + b == pytest.approx(c, abs=1e-9)


def test_a_invariant_rejects_backtracking():
    spec = _spec("sin(x)", "0")
    bad = [ChartPoint(0.0, 0, 0), ChartPoint(0.5, 0, 0), ChartPoint(0.4, 0, 0), ChartPoint(1.0, 0, 0)]
    with pytest.raises(NonMonotonePathError):
        a_invariant(spec, 0.0, 1.0, bad)
    with pytest.raises(NonMonotonePathError):
        a_invariant(spec, 0.0, 1.0, [ChartPoint(0.2, 0, 0), ChartPoint(1.0, 0, 0)])
    with pytest.raises(ValueError):
        a_invariant(spec, 1.0, 0.0)


def test_reports_are_deterministic():
    spec = _spec("sin(x)", "0.5*tanh(x)")
    r1 = check_frame_odes(spec, _POINTS, tol=1e-6).to_json_dict()
    r2 = check_frame_odes(spec, _POINTS, tol=1e-6).to_json_dict()
    assert r1 == r2
    c1 = classify(spec, 0.01).to_json_dict()
    c2 = classify(spec, 0.01).to_json_dict()
    assert c1 == c2
