from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Tuple

import numpy as np

from asymptotics.decay import estimate_decay_rate
from core.errors import DomainError
from geometry.jets import ScalarField, ScalarJet, TensorField, TensorJet
from geometry.metrics import MetricSpec
from geometry.potentials import (
    PolynomialBump,
    RadialFunction,
    SeparableScalarField,
    angular_modulated,
    chart_potential,
)
from geometry.tensor_fields import (
    MetricTensorField,
    PatternTensorField,
    ScaledTensorField,
    SumTensorField,
)

Support = Tuple[float, float]
AsymptoticTag = Literal["linear_growth", "decaying", "compact"]


@dataclass(frozen=True)
class SymmetricField:
    """A symmetric 2-tensor field h with its support descriptor."""

    field: TensorField
    support: Optional[Support] = None
    decay_rate: Optional[float] = None

    @property
    def dimension(self) -> int:
        return self.field.dimension

    @property
    def label(self) -> str:
        return self.field.label

    @property
    def derivative_mode(self) -> str:
        return self.field.derivative_mode

    @property
    def compact(self) -> bool:
        return self.support is not None

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        jet = self.field.jet(points, order)
        defect = np.max(np.abs(jet.value - np.swapaxes(jet.value, 1, 2)), initial=0.0)
        if defect > 1e-12 * max(1.0, float(np.max(np.abs(jet.value), initial=0.0))):
            raise DomainError(f"{self.label} is not symmetric (defect {defect:.3g})")
        return jet


@dataclass(frozen=True)
class PotentialField:
    """Scalar V with an asymptotic tag; linear-growth fields carry (a_0, a_1, ..., a_n)."""

    field: ScalarField
    tag: AsymptoticTag
    coefficients: Optional[Tuple[float, ...]] = None
    support: Optional[Support] = None

    def __post_init__(self) -> None:
        if self.tag == "compact" and self.support is None:
            raise DomainError("compactly supported potentials need a support annulus")
        if self.tag == "linear_growth" and self.coefficients is None:
            raise DomainError("linear-growth potentials need their coefficients a_0..a_n")

    @property
    def dimension(self) -> int:
        return self.field.dimension

    @property
    def label(self) -> str:
        return self.field.label

    def jet(self, points: np.ndarray, order: int = 2) -> ScalarJet:
        return self.field.jet(points, order)

    def tag_consistent(self, radii: Sequence[float], *, per_angle: int = 8) -> bool:
        """Cross-check the tag against a sampled decay fit."""
        if self.tag == "compact":
            assert self.support is not None
            outside = [r for r in radii if r > self.support[1]]
            fit = None
            if len(outside) >= 3:
                fit = estimate_decay_rate(self.field, outside, per_angle=per_angle)
            return fit is None or fit.exact_zero
        fit = estimate_decay_rate(self.field, radii, per_angle=per_angle)
        if self.tag == "decaying":
            return fit.exact_zero or (fit.fitted_exponent is not None and fit.fitted_exponent > 0.0)
        return fit.fitted_exponent is not None and abs(fit.fitted_exponent + 1.0) < 0.1


def static_potential_field(n: int, index: int) -> PotentialField:
    coefficients = [0.0] * (n + 1)
    # f ~ a_0 sqrt(1+r^2) - sum a_i x_i
    coefficients[index] = 1.0 if index == 0 else -1.0
    return PotentialField(chart_potential(n, index), "linear_growth", tuple(coefficients))


def bump_scalar(
    n: int,
    support: Support,
    *,
    angular: Optional[Sequence[float]] = None,
    amplitude: float = 1.0,
    power: int = 4,
    label: str = "bump",
) -> PotentialField:
    """bump(r) * (c_0 + c . x_hat), supported in the given annulus."""
    lo, hi = support
    bump = PolynomialBump(0.5 * (lo + hi), 0.5 * (hi - lo), amplitude, power)
    coefficients = list(angular) if angular is not None else [1.0] + [0.0] * n
    return PotentialField(
        angular_modulated(n, bump, coefficients, label=label), "compact", support=support
    )


def radial_scalar(n: int, radial: RadialFunction, *, label: str = "radial") -> SeparableScalarField:
    return SeparableScalarField(n, radial, ("one",) * (n - 1), label=label)


def conformal_direction(
    u: ScalarField, g: MetricSpec, support: Optional[Support] = None
) -> SymmetricField:
    """h = u * g."""
    return SymmetricField(ScaledTensorField(u, MetricTensorField(g), label="u*g"), support=support)


def bump_pair_field(
    n: int,
    background: MetricSpec,
    support: Support,
    trace_angular: Sequence[float],
    radial_angular: Sequence[float],
    *,
    power: int = 4,
) -> SymmetricField:
    """h = phi_1 * b + phi_2 * dr (x) dr with phi_k = bump(r) * (c_0 + c . x_hat)."""
    phi_1 = bump_scalar(n, support, angular=trace_angular, power=power, label="phi1").field
    phi_2 = bump_scalar(n, support, angular=radial_angular, power=power + 1, label="phi2").field
    field = SumTensorField(
        n,
        (
            ScaledTensorField(phi_1, MetricTensorField(background), label="phi1*b"),
            ScaledTensorField(phi_2, PatternTensorField.radial_radial(n), label="phi2*dr*dr"),
        ),
        label="bump_pair",
    )
    return SymmetricField(field, support=support)
