from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from core.errors import DomainError
from geometry.chart import cartesian_to_spherical, chart_jacobian, spherical_to_cartesian
from geometry.jets import (
    ScalarField,
    ScalarJet,
    StepRule,
    TensorField,
    TensorJet,
    chart_step_rule,
    finite_difference_jet,
)
from geometry.metrics import MetricSpec, conformal_product
from geometry.potentials import FramePowerRadial, angular_modulated

ComponentFn = Callable[[np.ndarray], np.ndarray]


class MetricTensorField:
    """A metric family viewed as a symmetric tensor field."""

    def __init__(self, metric: MetricSpec) -> None:
        self.metric = metric
        self.dimension = metric.dimension
        self.label = metric.label
        self.derivative_mode = metric.derivative_mode

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        return self.metric.jet(points, order)


@dataclass(frozen=True)
class ZeroTensorField:
    dimension: int
    label: str = "zero"
    derivative_mode: str = "analytic"

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        count = np.atleast_2d(points).shape[0]
        n = self.dimension
        return TensorJet(
            value=np.zeros((count, n, n)),
            grad=np.zeros((count, n, n, n)) if order >= 1 else None,
            hess=np.zeros((count, n, n, n, n)) if order >= 2 else None,
        )


@dataclass(frozen=True)
class PatternTensorField:
    """Constant chart components, e.g. dr (x) dr."""

    dimension: int
    pattern: Tuple[Tuple[float, ...], ...]
    label: str = "pattern"
    derivative_mode: str = "analytic"

    def __post_init__(self) -> None:
        matrix = np.asarray(self.pattern, dtype=float)
        if matrix.shape != (self.dimension, self.dimension):
            raise DomainError("pattern must be an n x n matrix")
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=0.0):
            raise DomainError("pattern must be symmetric")

    @classmethod
    def radial_radial(cls, n: int) -> "PatternTensorField":
        rows = [[0.0] * n for _ in range(n)]
        rows[0][0] = 1.0
        return cls(n, tuple(tuple(row) for row in rows), label="dr*dr")

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        count = np.atleast_2d(points).shape[0]
        n = self.dimension
        matrix = np.asarray(self.pattern, dtype=float)
        return TensorJet(
            value=np.broadcast_to(matrix, (count, n, n)).copy(),
            grad=np.zeros((count, n, n, n)) if order >= 1 else None,
            hess=np.zeros((count, n, n, n, n)) if order >= 2 else None,
        )


@dataclass(frozen=True)
class ScaledTensorField:
    """phi * T for a scalar field phi and a tensor field T."""

    scalar: ScalarField
    tensor: TensorField
    label: str = "scaled"
    decay_rate: Optional[float] = None

    @property
    def dimension(self) -> int:
        return self.tensor.dimension

    @property
    def derivative_mode(self) -> str:
        return self.tensor.derivative_mode

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        Y = np.atleast_2d(np.asarray(points, dtype=float))
        phi = self.scalar.jet(Y, order)
        return conformal_product(phi.value, phi.grad, phi.hess, self.tensor.jet(Y, order), order)


@dataclass(frozen=True)
class SumTensorField:
    dimension: int
    terms: Tuple[TensorField, ...]
    label: str = "sum"

    @property
    def derivative_mode(self) -> str:
        modes = {term.derivative_mode for term in self.terms}
        return "finite_difference" if "finite_difference" in modes else "analytic"

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        Y = np.atleast_2d(np.asarray(points, dtype=float))
        total: TensorJet = ZeroTensorField(self.dimension).jet(Y, order)
        for term in self.terms:
            total = total + term.jet(Y, order)
        return total


@dataclass(frozen=True)
class TabulatedTensorField:
    """Components from a callable; derivatives by nested central differences."""

    dimension: int
    components: ComponentFn
    label: str = "tabulated"
    step_rule: StepRule = chart_step_rule
    derivative_mode: str = "finite_difference"

    def _symmetric(self, points: np.ndarray) -> np.ndarray:
        values = np.asarray(self.components(points), dtype=float)
        return 0.5 * (values + np.swapaxes(values, -1, -2))

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        Y = np.atleast_2d(np.asarray(points, dtype=float))
        value, grad, hess = finite_difference_jet(
            self._symmetric, Y, order=order, step_rule=self.step_rule
        )
        return TensorJet(value=value, grad=grad, hess=hess)


def _check_rotation(rotation: np.ndarray, n: int) -> np.ndarray:
    R = np.asarray(rotation, dtype=float)
    if R.shape != (n, n):
        raise DomainError(f"rotation must be {n} x {n}")
    if not np.allclose(R @ R.T, np.eye(n), atol=1e-12) or np.linalg.det(R) < 0.0:
        raise DomainError("rotation must be an element of SO(n)")
    return R


def _pulled_back_points(points: np.ndarray, R: np.ndarray) -> np.ndarray:
    return cartesian_to_spherical(spherical_to_cartesian(points) @ R)


@dataclass(frozen=True)
class RotatedTensorField:
    """Pushforward of a chart tensor field by x -> R x, derivatives by finite differences."""

    inner: TensorField
    rotation: Tuple[Tuple[float, ...], ...]
    derivative_mode: str = "finite_difference"
    label: str = field(default="rotated")

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    @property
    def decay_rate(self) -> Optional[float]:
        return getattr(self.inner, "decay_rate", None)

    def _components(self, points: np.ndarray) -> np.ndarray:
        n = self.dimension
        R = _check_rotation(np.asarray(self.rotation), n)
        source = _pulled_back_points(points, R)
        J0 = chart_jacobian(source)
        J0_inv = np.linalg.inv(J0)
        h0 = self.inner.jet(source, 0).value
        cart0 = np.einsum("nai,nab,nbj->nij", J0_inv, h0, J0_inv)
        cart = np.einsum("ia,nab,jb->nij", R, cart0, R)
        J = chart_jacobian(points)
        return np.einsum("nia,nij,njb->nab", J, cart, J)

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        Y = np.atleast_2d(np.asarray(points, dtype=float))
        value, grad, hess = finite_difference_jet(self._components, Y, order=order)
        return TensorJet(value=value, grad=grad, hess=hess)


@dataclass(frozen=True)
class RotatedScalarField:
    """u(R^T x) in the hyperboloid chart."""

    inner: ScalarField
    rotation: Tuple[Tuple[float, ...], ...]
    label: str = "rotated"

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def _values(self, points: np.ndarray) -> np.ndarray:
        R = _check_rotation(np.asarray(self.rotation), self.dimension)
        return self.inner.jet(_pulled_back_points(points, R), 0).value

    def jet(self, points: np.ndarray, order: int = 2) -> ScalarJet:
        Y = np.atleast_2d(np.asarray(points, dtype=float))
        value, grad, hess = finite_difference_jet(self._values, Y, order=order)
        return ScalarJet(value=value, grad=grad, hess=hess)


def as_rotation_tuple(rotation: np.ndarray) -> Tuple[Tuple[float, ...], ...]:
    return tuple(tuple(float(v) for v in row) for row in np.asarray(rotation, dtype=float))


def radial_frame_perturbation(
    n: int,
    *,
    amplitude: float,
    exponent: float,
    angular: Optional[Sequence[float]] = None,
    label: str = "radial_frame",
) -> ScaledTensorField:
    """h with kappa(e_1, e_1) = amplitude * r^-exponent * (c_0 + c . x_hat), other frame entries 0."""
    coefficients = list(angular) if angular is not None else [1.0] + [0.0] * n
    scalar = angular_modulated(n, FramePowerRadial(amplitude, exponent), coefficients, label=label)
    return ScaledTensorField(
        scalar, PatternTensorField.radial_radial(n), label=label, decay_rate=float(exponent)
    )

