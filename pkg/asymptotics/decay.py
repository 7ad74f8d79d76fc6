from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import DomainError, NumericalFailure
from geometry.chart import angular_grid, shell_points
from geometry.jets import ScalarField, TensorField

FieldSampler = Callable[[np.ndarray], np.ndarray]
Sampleable = Union[ScalarField, TensorField, FieldSampler]


@dataclass(frozen=True)
class DecayFit:
    """log-log least squares of sup |field| against r; field ~ amplitude * r^-exponent."""

    radii: Tuple[float, ...]
    samples: Tuple[float, ...]
    status: str
    fitted_exponent: Optional[float]
    amplitude: Optional[float]
    fit_residual: float

    @property
    def exact_zero(self) -> bool:
        return self.status == "exact_zero"

    def decays_at_least(self, rate: float) -> bool:
        return self.exact_zero or (self.fitted_exponent is not None and self.fitted_exponent >= rate)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "radii": list(self.radii),
            "samples": list(self.samples),
            "status": self.status,
            "fitted_exponent": self.fitted_exponent,
            "amplitude": self.amplitude,
            "fit_residual": self.fit_residual,
        }


def check_ladder(radii: Sequence[float], *, min_decades: float = 1.0) -> np.ndarray:
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or r.size < 3:
        raise DomainError("decay fits need at least 3 radii")
    if np.any(r <= 0.0) or np.any(np.diff(r) <= 0.0):
        raise DomainError("radii must be positive and strictly increasing")
    if math.log10(r[-1] / r[0]) < min_decades - 1e-12:
        raise DomainError(f"radius ladder must span at least {min_decades:g} decade(s)")
    return r


def fit_power_law(
    radii: Sequence[float],
    samples: Sequence[float],
    *,
    zero_tolerance: float = 0.0,
    min_decades: float = 1.0,
) -> DecayFit:
    r = check_ladder(radii, min_decades=min_decades)
    values = np.abs(np.asarray(samples, dtype=float))
    if values.shape != r.shape:
        raise DomainError("one sample per radius is required")
    if not np.all(np.isfinite(values)):
        raise NumericalFailure("non-finite samples on the radius ladder")
    zero = values <= zero_tolerance
    if np.all(zero):
        return DecayFit(tuple(r.tolist()), tuple(values.tolist()), "exact_zero", None, None, 0.0)
    if np.any(zero):
        raise NumericalFailure("field vanishes on part of the ladder only; no power law fits")
    x = np.log(r)
    y = np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return DecayFit(
        radii=tuple(r.tolist()),
        samples=tuple(values.tolist()),
        status="fit",
        fitted_exponent=float(-slope),
        amplitude=float(math.exp(intercept)),
        fit_residual=residual,
    )


def _sampler(field: Sampleable) -> FieldSampler:
    jet = getattr(field, "jet", None)
    if jet is not None:
        return lambda points: np.asarray(jet(points, 0).value)
    return field  # type: ignore[return-value]


def shell_sup(field: Sampleable, radius: float, angles: np.ndarray) -> float:
    values = np.asarray(_sampler(field)(shell_points(radius, angles)), dtype=float)
    return float(np.max(np.abs(values)))


def estimate_decay_rate(
    field: Sampleable,
    radii: Sequence[float],
    *,
    dimension: Optional[int] = None,
    per_angle: int = 32,
    zero_tolerance: float = 0.0,
) -> DecayFit:
    """Sup over a fixed off-pole angular grid at each radius, then a log-log fit."""
    n = dimension if dimension is not None else getattr(field, "dimension", None)
    if n is None:
        raise DomainError("dimension is required for plain sampler callables")
    r = check_ladder(radii)
    angles = angular_grid(int(n), per_angle)
    sups = [shell_sup(field, float(radius), angles) for radius in r]
    return fit_power_law(r, sups, zero_tolerance=zero_tolerance)
