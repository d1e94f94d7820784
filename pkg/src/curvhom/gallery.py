"""Built-in example metrics: the instances every suite and figure reuses.

Each entry couples a scalar pair (f, h) with sensible default chart points
for curvature checks (kept clear of the declared non-smooth set) and a
parameter window for curve and foliation rendering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import expr
from .metric import CantorNonsmoothSet, ChartPoint, MetricSpec

_UV_PAIRS = ((0.9, -0.5), (-1.6, 1.1))


def _points(xs: tuple[float, ...]) -> tuple[ChartPoint, ...]:
    return tuple(ChartPoint(x, u, v) for x in xs for (u, v) in _UV_PAIRS)


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    description: str
    make_spec: Callable[[], MetricSpec]
    check_points: tuple[ChartPoint, ...]
    t_range: tuple[float, float] = (-4.0, 4.0)

    def spec(self) -> MetricSpec:
        return self.make_spec()


def _product() -> MetricSpec:
    return MetricSpec(
        expr.function_from_source("0"), expr.function_from_source("0")
    )


def _horocycle() -> MetricSpec:
    return MetricSpec(
        expr.function_from_source("1"), expr.function_from_source("1")
    )


def _piecewise_pm1() -> MetricSpec:
    return MetricSpec(
        expr.builtin("flat_exp"),
        expr.builtin("step_pm1"),
        nonsmooth=(0.0,),
    )


def _cantor() -> MetricSpec:
    return MetricSpec(
        expr.CantorFlat(),
        expr.builtin("cantor_h"),
        nonsmooth=CantorNonsmoothSet(),
    )


def _sine() -> MetricSpec:
    return MetricSpec(
        expr.function_from_source("sin(x)"),
        expr.function_from_source("0.5*tanh(x)"),
    )


GALLERY: dict[str, GalleryEntry] = {
    e.name: e
    for e in (
        GalleryEntry(
            name="product",
            description="f = 0, h = 0: the split product metric",
            make_spec=_product,
            check_points=_points((-1.3, -0.4, 0.6, 1.5)),
        ),
        GalleryEntry(
            name="horocycle",
            description="f = 1, h = 1: constant unit geodesic curvature",
            make_spec=_horocycle,
            check_points=_points((-1.3, -0.4, 0.6, 1.5)),
        ),
        GalleryEntry(
            name="piecewise_pm1",
            description="h jumps from +1 to -1 at x = 0; f flat there",
            make_spec=_piecewise_pm1,
            check_points=_points((-1.1, -0.35, 0.45, 1.2)),
        ),
        GalleryEntry(
            name="cantor",
            description="h non-smooth on the middle-thirds set; f flat on it",
            make_spec=_cantor,
            check_points=_points((0.5, 1.0 / 6.0, 5.0 / 6.0, 1.0 / 18.0)),
            t_range=(-3.0, 3.0),
        ),
        GalleryEntry(
            name="sine",
            description="f = sin x, h = 0.5 tanh x: smooth, locally irreducible",
            make_spec=_sine,
            check_points=_points((-1.3, -0.4, 0.6, 1.5)),
        ),
    )
}
