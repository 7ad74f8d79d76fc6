from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from core.errors import DomainError
from geometry.jets import ScalarField
from geometry.metrics import MetricSpec, horizon_radius
from odelab.geodesics import (
    GeodesicSample,
    cartesian_form,
    chart_seeds,
    fibonacci_directions,
    integrate_geodesics,
)

DEFAULT_HORIZON = 12.0
VANISHING = 1e-300
START_RADIUS = 0.5

Label = Tuple[str, Optional[float], Optional[float], Tuple[str, ...]]


@dataclass(frozen=True)
class GrowthClassifierConfig:
    """Slope bands for log|V(gamma(t))| against t on the tail of [0, T]."""

    growth_band: Tuple[float, float] = (0.8, 1.2)
    decay_threshold: float = -0.1
    tail_fraction: float = 0.5

    def __post_init__(self) -> None:
        low, high = self.growth_band
        if not low < high:
            raise DomainError("growth band must be an increasing pair")
        if self.decay_threshold >= low:
            raise DomainError("decay threshold must lie below the growth band")
        if not 0.0 < self.tail_fraction <= 1.0:
            raise DomainError("tail fraction must be in (0, 1]")


@dataclass(frozen=True)
class SeedLabel:
    seed: int
    direction: Tuple[float, ...]
    label: str
    slope: Optional[float]
    rate: Optional[float]
    notes: Tuple[str, ...] = ()

    def as_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "direction": list(self.direction),
            "label": self.label,
            "slope": self.slope,
            "rate": self.rate,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class GrowthReport:
    potential: str
    horizon: float
    labels: Tuple[SeedLabel, ...]
    sample: GeodesicSample
    values: np.ndarray = field(repr=False)

    def count(self, prefix: str) -> int:
        return sum(1 for item in self.labels if item.label.startswith(prefix))

    @property
    def any_linear_growth(self) -> bool:
        return self.count("linear-growth") > 0

    @property
    def all_decay(self) -> bool:
        return self.count("decay") == len(self.labels)

    def rows(self) -> List[Tuple[int, float, float, float]]:
        radius = self.sample.radius()
        out: List[Tuple[int, float, float, float]] = []
        for seed in range(self.sample.seeds):
            for k, t in enumerate(self.sample.t):
                out.append((seed, float(t), float(radius[seed, k]), float(self.values[seed, k])))
        return out

    def as_dict(self) -> Dict[str, Any]:
        return {
            "potential": self.potential,
            "horizon": self.horizon,
            "counts": {
                "linear-growth": self.count("linear-growth"),
                "decay": self.count("decay"),
                "indeterminate": self.count("indeterminate"),
            },
            "labels": [item.as_dict() for item in self.labels],
            "geodesics": self.sample.as_dict(),
        }


def _label(t: np.ndarray, values: np.ndarray, config: GrowthClassifierConfig) -> Label:
    tail = t >= (1.0 - config.tail_fraction) * t[-1]
    magnitude = np.abs(values[tail])
    if np.all(magnitude <= VANISHING):
        return "decay(∞)", None, math.inf, ("vanishes along the ray",)
    if np.any(magnitude <= VANISHING):
        return "indeterminate", None, None, ("vanishes on part of the tail",)
    slope = float(np.polyfit(t[tail], np.log(magnitude), 1)[0])
    low, high = config.growth_band
    if low <= slope <= high:
        return "linear-growth", slope, None, ()
    if slope <= config.decay_threshold:
        rate = -slope
        notes = ("fitted rate exceeds 1 on a finite horizon",) if rate > 1.0 else ()
        return f"decay({rate:.3g})", slope, rate, notes
    return "indeterminate", slope, None, ()


def classify_growth(
    g: MetricSpec,
    V: ScalarField,
    *,
    starts: Optional[np.ndarray] = None,
    directions: Optional[np.ndarray] = None,
    count: int = 64,
    horizon: float = DEFAULT_HORIZON,
    config: Optional[GrowthClassifierConfig] = None,
    seed: int = 0,
) -> GrowthReport:
    """Label each seed geodesic by the growth of |V| along it.

    V is evaluated in the coordinates the geodesics run in: Cartesian for rotationally
    symmetric families, the metric's own chart otherwise. Default seeds leave offset * u
    along each Cartesian direction u and are mapped into the chart when needed; explicit
    starts and directions are read in the geodesic coordinates.
    """
    rules = config or GrowthClassifierConfig()
    target = cartesian_form(g)
    n = g.dimension
    if directions is None:
        directions = fibonacci_directions(count, n, seed)
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    velocities = directions
    if starts is None:
        inner = horizon_radius(g)
        offset = START_RADIUS if inner == 0.0 else 2.0 * inner
        starts = offset * directions / np.linalg.norm(directions, axis=1)[:, None]
        if target.coordinates != "cartesian":
            starts, velocities = chart_seeds(starts, directions)
    sample = integrate_geodesics(target, starts, velocities, horizon)
    flat = sample.positions.reshape(-1, n)
    values = V.jet(flat, 0).value.reshape(sample.seeds, -1)
    labels = []
    for index in range(sample.seeds):
        label, slope, rate, notes = _label(sample.t, values[index], rules)
        labels.append(
            SeedLabel(
                seed=index,
                direction=tuple(float(x) for x in directions[index]),
                label=label,
                slope=slope,
                rate=None if rate is None or not math.isfinite(rate) else rate,
                notes=notes,
            )
        )
    return GrowthReport(
        potential=getattr(V, "label", "V"),
        horizon=horizon,
        labels=tuple(labels),
        sample=sample,
        values=values,
    )


def axis_direction(n: int, axis: int, sign: float = 1.0) -> np.ndarray:
    if not 1 <= axis <= n:
        raise DomainError(f"axis {axis} outside 1..{n}")
    out = np.zeros(n)
    out[axis - 1] = math.copysign(1.0, sign)
    return out


def seeds_with_axis(count: int, n: int, axis: int, seed: int = 0) -> np.ndarray:
    """The fan plus the +axis direction as the last seed."""
    return np.vstack([fibonacci_directions(count, n, seed), axis_direction(n, axis)[None, :]])
