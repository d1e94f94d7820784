"""Command-line entry point.

Subcommands: ``check`` (curvature, frame, decay, and classification suites
with a JSON report), ``curve`` (turning-curve CSV), ``foliate`` (SVG of a
curve and its orthogonal leaves in the disk model), ``ainv`` (the leaf
separation invariant), ``lyndon`` (length-function axioms), and
``gallery`` (named built-in examples dispatched to check/curve/foliate).

Exit codes: 0 success, 1 a check failed, 2 configuration or parse errors.
Reports are byte-deterministic: JSON keys are sorted and floats printed
with 17 significant digits.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

try:
    import tomllib  # Python 3.11+
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

import numpy as np

from . import curvature, expr, foliation, hyperbolic, lyndon, verify
from .curvature import SingularMetricError
from .gallery import GALLERY
from .metric import CantorNonsmoothSet, ChartPoint, DegenerateMetricError, MetricSpec


class ConfigError(Exception):
    """Bad or missing configuration."""


# ---------------------------------------------------------------------------
# Deterministic JSON


def dumps_json(obj) -> str:
    """JSON with sorted keys and floats at 17 significant digits."""
    out: list[str] = []
    _write_json(obj, out)
    return "".join(out)


def _write_json(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            out.append("null")
        else:
            out.append(format(obj, ".17g"))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            _write_json(str(key), out)
            out.append(":")
            _write_json(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write_json(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class CheckSettings:
    points: Optional[list[ChartPoint]]
    fd_step: float = 1e-3
    tol: float = 1e-4
    decay_orders: tuple[int, int, int] = (3, 2, 2)
    decay_tol: float = 1e-8
    classify_grid: float = 0.01
    classify_halfwidth: float = 5.0


@dataclass
class CurveSettings:
    t_range: tuple[float, float] = (-4.0, 4.0)
    step: float = 1e-4


@dataclass
class RenderSettings:
    leaf_count: int = 41
    leaf_span: float = 5.0
    size_px: int = 800


@dataclass
class Config:
    spec: MetricSpec
    f_text: str
    h_text: str
    check: CheckSettings
    curve: CurveSettings
    render: RenderSettings


_DEFAULT_XS = (-1.3, -0.4, 0.6, 1.5)
_DEFAULT_UVS = ((0.9, -0.5), (-1.6, 1.1))


def default_points(spec: MetricSpec) -> list[ChartPoint]:
    pts = [
        ChartPoint(x, u, v)
        for x in _DEFAULT_XS
        for (u, v) in _DEFAULT_UVS
        if spec.contains_x(x)
    ]
    return pts


def _parse_nonsmooth(raw):
    if raw is None:
        return None
    if isinstance(raw, str):
        if raw == "cantor":
            return CantorNonsmoothSet()
        raise ConfigError(f"unknown named non-smooth set {raw!r}")
    return tuple(float(v) for v in raw)


def config_from_dict(data: dict) -> Config:
    try:
        msec = data["metric"]
        f_text = msec["f"]
        h_text = msec["h"]
    except KeyError as exc:
        raise ConfigError(f"missing config key {exc}") from None
    domain = tuple(msec.get("domain", (-math.inf, math.inf)))
    if len(domain) != 2:
        raise ConfigError("metric.domain must be a 2-element interval")
    spec = MetricSpec(
        expr.scalar_from_text(f_text),
        expr.scalar_from_text(h_text),
        domain=domain,  # type: ignore[arg-type]
        nonsmooth=_parse_nonsmooth(msec.get("nonsmooth")),
    )
    csec = data.get("check", {})
    points = None
    if "points" in csec:
        points = [ChartPoint(*map(float, row)) for row in csec["points"]]
    check = CheckSettings(
        points=points,
        fd_step=float(csec.get("fd_step", 1e-3)),
        tol=float(csec.get("tol", 1e-4)),
        decay_orders=tuple(int(v) for v in csec.get("decay_orders", (3, 2, 2))),  # type: ignore[arg-type]
        decay_tol=float(csec.get("decay_tol", 1e-8)),
        classify_grid=float(csec.get("classify_grid", 0.01)),
        classify_halfwidth=float(csec.get("classify_halfwidth", 5.0)),
    )
    usec = data.get("curve", {})
    curve = CurveSettings(
        t_range=tuple(float(v) for v in usec.get("t_range", (-4.0, 4.0))),  # type: ignore[arg-type]
        step=float(usec.get("step", 1e-4)),
    )
    rsec = data.get("render", {})
    render = RenderSettings(
        leaf_count=int(rsec.get("leaf_count", 41)),
        leaf_span=float(rsec.get("leaf_span", 5.0)),
        size_px=int(rsec.get("size_px", 800)),
    )
    return Config(spec=spec, f_text=f_text, h_text=h_text, check=check, curve=curve, render=render)


def load_config(path: str) -> Config:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return config_from_dict(data)


def config_for_gallery(name: str) -> Config:
    try:
        entry = GALLERY[name]
    except KeyError:
        raise ConfigError(
            f"unknown gallery entry {name!r}; choices: {', '.join(sorted(GALLERY))}"
        ) from None
    spec = entry.spec()
    return Config(
        spec=spec,
        f_text=repr(spec.f),
        h_text=repr(spec.h),
        check=CheckSettings(points=list(entry.check_points)),
        curve=CurveSettings(t_range=entry.t_range),
        render=RenderSettings(),
    )


# ---------------------------------------------------------------------------
# check


def _kernel_angle(g: np.ndarray, kernel: np.ndarray) -> float:
    """g-angle between the kernel direction and the v-axis."""
    ev = np.array([0.0, 0.0, 1.0])
    num = abs(float(kernel @ g @ ev))
    den = math.sqrt(float(kernel @ g @ kernel)) * math.sqrt(float(ev @ g @ ev))
    return math.acos(max(-1.0, min(1.0, num / den)))


def run_check(cfg: Config) -> tuple[dict, bool]:
    spec = cfg.spec
    settings = cfg.check
    points = settings.points if settings.points is not None else default_points(spec)
    field = curvature.field_from_spec(spec)
    point_rows = []
    usable_points = []
    all_ok = True
    for p in points:
        if spec.nonsmooth_distance(p.x) < 10.0 * settings.fd_step:
            point_rows.append(
                {
                    "point": [p.x, p.u, p.v],
                    "status": "skipped",
                    "reason": "near-nonsmooth",
                }
            )
            continue
        usable_points.append(p)
        rep = curvature.curvature_report(field, p, settings.fd_step)
        g = field.at(p)
        angle = _kernel_angle(g, np.array(rep.kernel))
        eig_dev = max(
            abs(rep.eigenvalues[0] + 1.0),
            abs(rep.eigenvalues[1] + 1.0),
            abs(rep.eigenvalues[2]),
        )
        ok = eig_dev <= settings.tol and angle <= settings.tol
        all_ok &= ok
        point_rows.append(
            {
                "point": [p.x, p.u, p.v],
                "status": "pass" if ok else "fail",
                "eigenvalues": list(rep.eigenvalues),
                "kernel": list(rep.kernel),
                "kernel_angle": angle,
                "scalar": rep.scalar,
                "tolerance": rep.tolerance,
            }
        )
    frame_report = verify.check_frame_odes(
        spec, usable_points, tol=max(settings.tol, 1e-6), fd_step=settings.fd_step
    )
    decay_report = verify.check_fh_decay(spec, settings.decay_orders, settings.decay_tol)
    classify_report = verify.classify(
        spec, settings.classify_grid, settings.classify_halfwidth
    )
    all_ok &= frame_report.passed and decay_report.passed and classify_report.complete
    report = {
        "spec": {
            "f": cfg.f_text,
            "h": cfg.h_text,
            "nonsmooth": _nonsmooth_json(spec),
        },
        "points": point_rows,
        "frame_checks": frame_report.to_json_dict(),
        "decay": decay_report.to_json_dict(),
        "classify": classify_report.to_json_dict(),
        "pass": bool(all_ok),
    }
    return report, all_ok


def _nonsmooth_json(spec: MetricSpec):
    if isinstance(spec.nonsmooth, CantorNonsmoothSet):
        return "cantor"
    return list(spec.nonsmooth)


# ---------------------------------------------------------------------------
# curve / foliate


def _integrate(cfg: Config) -> foliation.TurningCurve:
    h_integral = expr.integral_of(cfg.spec.h)
    p0 = hyperbolic.HPoint(0.0, 1.0)
    v0 = hyperbolic.HTangent(p0, 1.0, 0.0)
    return foliation.integrate_turning_curve(
        h_integral, p0, v0, cfg.curve.t_range, cfg.curve.step
    )


def render_svg(
    curve: foliation.TurningCurve,
    leaves: Sequence[foliation.Leaf],
    render: RenderSettings,
) -> str:
    """Disk-model figure: boundary circle, one curve polyline, one polyline
    per leaf."""
    if len(curve.ts) < 2:
        raise ValueError("cannot render an empty curve")

    def disk_pts(points_xy) -> str:
        coords = []
        for x, y in points_xy:
            dx, dy = hyperbolic.to_disk(hyperbolic.HPoint(float(x), float(y)))
            coords.append(f"{dx:.6f},{-dy:.6f}")
        return " ".join(coords)

    stride = max(1, len(curve.ts) // 2000)
    curve_xy = curve.points[::stride]
    if not np.array_equal(curve_xy[-1], curve.points[-1]):
        curve_xy = np.vstack([curve_xy, curve.points[-1]])
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{render.size_px}" '
        f'height="{render.size_px}" viewBox="-1.05 -1.05 2.1 2.1">',
        '<circle cx="0" cy="0" r="1" fill="none" stroke="#222222" stroke-width="0.008"/>',
    ]
    for lf in leaves:
        samples = foliation.leaf_samples(lf, render.leaf_span, count=201)
        parts.append(
            f'<polyline fill="none" stroke="#4575b4" stroke-width="0.005" '
            f'points="{disk_pts(samples)}"/>'
        )
    parts.append(
        f'<polyline fill="none" stroke="#c1272d" stroke-width="0.012" '
        f'points="{disk_pts(curve_xy)}"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def make_leaves(
    curve: foliation.TurningCurve, count: int
) -> list[foliation.Leaf]:
    lo, hi = curve.span
    return [foliation.leaf(curve, float(s)) for s in np.linspace(lo, hi, count)]


# ---------------------------------------------------------------------------
# Entry point


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curvhom")
    sub = ap.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="run the verification suites")
    p_check.add_argument("config")

    p_curve = sub.add_parser("curve", help="integrate the turning curve, write CSV")
    p_curve.add_argument("config")
    p_curve.add_argument("--output", default=None)

    p_fol = sub.add_parser("foliate", help="render the foliation SVG")
    p_fol.add_argument("config")
    p_fol.add_argument("--output", default=None)

    p_ainv = sub.add_parser("ainv", help="leaf separation invariant")
    p_ainv.add_argument("config")
    p_ainv.add_argument("--from", dest="x0", type=float, required=True)
    p_ainv.add_argument("--to", dest="x1", type=float, required=True)

    p_ly = sub.add_parser("lyndon", help="length-function axiom check")
    p_ly.add_argument("--max-len", type=int, default=4)
    p_ly.add_argument(
        "--convention", choices=("right", "left"), default="right"
    )

    p_gal = sub.add_parser("gallery", help="run a built-in example")
    p_gal.add_argument("name", nargs="?", default=None)
    p_gal.add_argument("--list", action="store_true")
    mode = p_gal.add_mutually_exclusive_group()
    mode.add_argument("--check", action="store_true")
    mode.add_argument("--foliate", action="store_true")
    mode.add_argument("--curve", action="store_true")
    p_gal.add_argument("--output", default=None)
    return ap


def _dispatch(args) -> int:
    if args.command == "check":
        cfg = load_config(args.config)
        report, ok = run_check(cfg)
        sys.stdout.write(dumps_json(report) + "\n")
        return 0 if ok else 1

    if args.command == "curve":
        cfg = load_config(args.config)
        _emit(_integrate(cfg).to_csv(), args.output)
        return 0

    if args.command == "foliate":
        cfg = load_config(args.config)
        curve = _integrate(cfg)
        leaves = make_leaves(curve, cfg.render.leaf_count)
        _emit(render_svg(curve, leaves, cfg.render), args.output)
        return 0

    if args.command == "ainv":
        cfg = load_config(args.config)
        value = verify.a_invariant(cfg.spec, args.x0, args.x1)
        sys.stdout.write(format(value, ".17g") + "\n")
        return 0

    if args.command == "lyndon":
        conv = (
            lyndon.OverlapConvention.RIGHT
            if args.convention == "right"
            else lyndon.OverlapConvention.LEFT
        )
        violations = lyndon.check_axioms(args.max_len, conv)
        non_arch = lyndon.non_archimedean(args.max_len)
        sys.stdout.write(f"{len(violations)} violations\n")
        if violations:
            sys.stdout.write(lyndon.violations_to_json_lines(violations) + "\n")
        sys.stdout.write(
            f"{len(non_arch)} non-archimedean words"
            + ("" if not non_arch else ": " + " ".join(map(str, non_arch)))
            + "\n"
        )
        return 0 if not violations else 1

    if args.command == "gallery":
        if args.list or args.name is None:
            for name in sorted(GALLERY):
                sys.stdout.write(f"{name}: {GALLERY[name].description}\n")
            return 0
        cfg = config_for_gallery(args.name)
        if args.foliate:
            curve = _integrate(cfg)
            leaves = make_leaves(curve, cfg.render.leaf_count)
            _emit(render_svg(curve, leaves, cfg.render), args.output)
            return 0
        if args.curve:
            _emit(_integrate(cfg).to_csv(), args.output)
            return 0
        report, ok = run_check(cfg)
        sys.stdout.write(dumps_json(report) + "\n")
        return 0 if ok else 1

    raise ConfigError(f"unknown command {args.command!r}")


def run(argv: Sequence[str]) -> int:
    """Parse arguments and execute; returns the process exit code."""
    ap = _build_parser()
    try:
        args = ap.parse_args(list(argv))
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _dispatch(args)
    except (
        ConfigError,
        expr.ExprError,
        tomllib.TOMLDecodeError,
        OSError,
        ValueError,
        KeyError,
        lyndon.ResourceGuardError,
        DegenerateMetricError,
        SingularMetricError,
        foliation.OutOfSpanError,
        foliation.NonFoliatingError,
        verify.NonMonotonePathError,
    ) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
