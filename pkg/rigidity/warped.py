from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Literal, Sequence, Tuple

import numpy as np

from geometry.metrics import CoshWarpProfile, SeparableDiagonalMetric, SpaceFormFactor
from geometry.potentials import HyperbolicSine, SeparableScalarField
from operators.linearized import hessian_rigidity_residual
from tensors.calculus import norm_squared
from tensors.curvature import curvature_at, sectional_curvature

BaseFactor = Literal["sphere", "hyperbolic"]
REPORT_TIMES = (-8.0, -5.0, -2.0, 2.0, 5.0, 8.0)


@dataclass(frozen=True)
class WarpedProductFixture:
    """g = dt^2 + cosh(t)^2 h with h a unit space form, and f = sinh t."""

    base: BaseFactor
    metric: SeparableDiagonalMetric
    potential: SeparableScalarField

    @property
    def dimension(self) -> int:
        return self.metric.dimension

    @property
    def base_curvature(self) -> float:
        return 1.0 if self.base == "sphere" else -1.0

    def sample_points(self, times: Sequence[float]) -> np.ndarray:
        n = self.dimension
        angles = [0.9] + [1.1] * (n - 3) + [0.7]
        return np.array([[float(t)] + angles for t in times])

    def expected_tangential(self, t: np.ndarray) -> np.ndarray:
        """K(X, Y) for X, Y tangent to the factor."""
        return (self.base_curvature - np.sinh(t) ** 2) / np.cosh(t) ** 2

    def hessian_residual(self, points: np.ndarray) -> float:
        """sup over the points of the g-norm of nabla^2 f - f g."""
        pack = curvature_at(self.metric, points)
        residual = hessian_rigidity_residual(self.metric, self.potential, points, pack)
        return float(np.sqrt(np.max(np.maximum(norm_squared(pack, residual), 0.0))))


def warped_fixture(base: BaseFactor = "sphere", n: int = 3) -> WarpedProductFixture:
    curvature = 1 if base == "sphere" else -1
    metric = SeparableDiagonalMetric(
        n,
        CoshWarpProfile(),
        SpaceFormFactor(n - 1, curvature),
        family=f"warped_{base}",
        coordinates="warped",
        params={"base": base},
    )
    potential = SeparableScalarField(n, HyperbolicSine(), ("one",) * (n - 1), label="sinh t")
    return WarpedProductFixture(base, metric, potential)


@dataclass(frozen=True)
class SectionalRow:
    t: float
    mixed: float
    tangential: float
    expected_tangential: float

    def as_dict(self) -> Dict[str, float]:
        return {
            "t": self.t,
            "mixed": self.mixed,
            "tangential": self.tangential,
            "expected_tangential": self.expected_tangential,
            "distance_to_minus_one": max(abs(self.mixed + 1.0), abs(self.tangential + 1.0)),
        }


def _coordinate_pair(n: int, count: int, first: int, second: int) -> Tuple[np.ndarray, np.ndarray]:
    X = np.zeros((count, n))
    Y = np.zeros((count, n))
    X[:, first] = 1.0
    Y[:, second] = 1.0
    return X, Y


def sectional_report(
    fixture: WarpedProductFixture, times: Sequence[float] = REPORT_TIMES
) -> List[SectionalRow]:
    """Mixed K(dt, X) and tangential K(X, Y) at the requested t values."""
    points = fixture.sample_points(times)
    pack = curvature_at(fixture.metric, points)
    n = fixture.dimension
    count = points.shape[0]
    mixed = sectional_curvature(pack, *_coordinate_pair(n, count, 0, 1))
    tangential = sectional_curvature(pack, *_coordinate_pair(n, count, 1, 2))
    expected = fixture.expected_tangential(points[:, 0])
    return [
        SectionalRow(float(t), float(a), float(b), float(c))
        for t, a, b, c in zip(points[:, 0], mixed, tangential, expected)
    ]


def fixture_summary(fixture: WarpedProductFixture, rows: Sequence[SectionalRow]) -> Dict[str, Any]:
    return {
        "base": fixture.base,
        "dimension": fixture.dimension,
        "sectional": [row.as_dict() for row in rows],
    }
