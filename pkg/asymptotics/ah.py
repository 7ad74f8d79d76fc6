from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from asymptotics.decay import DecayFit, check_ladder, fit_power_law
from core.errors import DomainError
from geometry.chart import angular_grid, shell_points
from geometry.frame import frame_components, frame_matrix
from geometry.metrics import MetricSpec, metric_deviation
from tensors.curvature import curvature_from_jet

FRAME_STEP = 1e-3
EXPONENT_SLACK = 0.1
SCALAR_ZERO_TOLERANCE = 1e-8


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    fits: Dict[str, DecayFit]
    required_rate: float
    note: str = ""

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "required_rate": self.required_rate,
            "note": self.note,
            "fits": {key: fit.as_dict() for key, fit in self.fits.items()},
        }


@dataclass(frozen=True)
class AhReport:
    family: str
    q_claimed: float
    borderline: bool
    conditions: List[ConditionResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(condition.passed for condition in self.conditions)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "q_claimed": self.q_claimed,
            "borderline": self.borderline,
            "passed": self.passed,
            "conditions": [condition.as_dict() for condition in self.conditions],
        }


def frame_deviation(g: MetricSpec, points: np.ndarray) -> np.ndarray:
    """kappa(e_a, e_b) for h = g - b."""
    return frame_components(metric_deviation(g, points, 0).value, points)


def _frame_directional(fn: Any, points: np.ndarray, step: float) -> np.ndarray:
    """e_a(fn) by central differences along each background frame vector; new axis 1."""
    frame = frame_matrix(points)
    count, n = points.shape
    shifted = [points + sign * step * frame[:, a, :] for a in range(n) for sign in (1.0, -1.0)]
    values = np.asarray(fn(np.concatenate(shifted, axis=0)))
    blocks = values.reshape((2 * n, count) + values.shape[1:])
    return np.stack(
        [(blocks[2 * a] - blocks[2 * a + 1]) / (2.0 * step) for a in range(n)], axis=1
    )


def frame_derivatives(
    g: MetricSpec, points: np.ndarray, *, step: float = FRAME_STEP
) -> Dict[str, np.ndarray]:
    """kappa, e(kappa) and e(e(kappa)) on a batch of chart points."""

    def level0(Y: np.ndarray) -> np.ndarray:
        return frame_deviation(g, Y)

    def level1(Y: np.ndarray) -> np.ndarray:
        return _frame_directional(level0, Y, step)

    return {
        "kappa": level0(points),
        "d_kappa": level1(points),
        "dd_kappa": _frame_directional(level1, points, step),
    }


def verify_ah(
    g: MetricSpec,
    q_claimed: float,
    radii: Sequence[float],
    *,
    per_angle: int = 32,
    frame_step: float = FRAME_STEP,
    zero_tolerance: float = SCALAR_ZERO_TOLERANCE,
) -> AhReport:
    """Sampled check of the two defining decay conditions of an AH metric.

    (a) frame components of g - b and two frame derivatives decay at rate >= q - 0.1;
    (b) R_g + n(n-1) decays faster than r^-n (or vanishes to zero_tolerance).
    """
    n = g.dimension
    if not (0.5 * n < q_claimed <= n):
        raise DomainError(f"q_claimed={q_claimed} outside ({n / 2:g}, {n}]")
    r = check_ladder(radii)
    angles = angular_grid(n, per_angle)
    sups: Dict[str, List[float]] = {"kappa": [], "d_kappa": [], "dd_kappa": []}
    scalar_sups: List[float] = []
    for radius in r:
        points = shell_points(float(radius), angles)
        for key, values in frame_derivatives(g, points, step=frame_step).items():
            sups[key].append(float(np.max(np.abs(values))))
        pack = curvature_from_jet(points, g.jet(points, 2))
        scalar_sups.append(float(np.max(np.abs(pack.scalar + n * (n - 1)))))

    required = q_claimed - EXPONENT_SLACK
    fits = {key: fit_power_law(r, values) for key, values in sups.items()}
    borderline = q_claimed == float(n)
    condition_a = ConditionResult(
        name="metric_decay",
        passed=all(fit.decays_at_least(required) for fit in fits.values()),
        fits=fits,
        required_rate=required,
        note="borderline decay q = n" if borderline else "",
    )

    scalar_fit = fit_power_law(r, scalar_sups, zero_tolerance=zero_tolerance)
    scalar_passed = scalar_fit.exact_zero or (
        scalar_fit.fitted_exponent is not None and scalar_fit.fitted_exponent > n
    )
    condition_b = ConditionResult(
        name="scalar_curvature_decay",
        passed=scalar_passed,
        fits={"scalar": scalar_fit},
        required_rate=float(n),
        note="exact zero" if scalar_fit.exact_zero else "",
    )
    return AhReport(
        family=g.family,
        q_claimed=float(q_claimed),
        borderline=borderline,
        conditions=[condition_a, condition_b],
    )
