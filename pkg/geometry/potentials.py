from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Protocol, Sequence, Tuple

import numpy as np

from core.errors import DomainError
from geometry.jets import ScalarField, ScalarJet

RadialTriple = Tuple[np.ndarray, np.ndarray, np.ndarray]


class RadialFunction(Protocol):
    def evaluate(self, r: np.ndarray) -> RadialTriple:
        """Value, first and second derivative in the radial (first) coordinate."""


@dataclass(frozen=True)
class ConstantRadial:
    value: float = 1.0

    def evaluate(self, r: np.ndarray) -> RadialTriple:
        zeros = np.zeros_like(r)
        return np.full_like(r, self.value), zeros, zeros.copy()


@dataclass(frozen=True)
class LinearRadial:
    def evaluate(self, r: np.ndarray) -> RadialTriple:
        return r.copy(), np.ones_like(r), np.zeros_like(r)


@dataclass(frozen=True)
class SqrtOnePlusSquare:
    def evaluate(self, r: np.ndarray) -> RadialTriple:
        v = np.sqrt(1.0 + r * r)
        return v, r / v, 1.0 / (v * v * v)


@dataclass(frozen=True)
class FramePowerRadial:
    """Chart component of kappa(e_1, e_1) = amplitude * r**(-exponent): divides by 1 + r^2."""

    amplitude: float
    exponent: float

    def evaluate(self, r: np.ndarray) -> RadialTriple:
        q = self.exponent
        s = 1.0 + r * r
        v = self.amplitude * r ** (-q) / s
        # log-derivative: -q/r - 2r/s
        ld = -q / r - 2.0 * r / s
        dld = q / (r * r) - 2.0 / s + 4.0 * r * r / (s * s)
        return v, v * ld, v * (ld * ld + dld)


@dataclass(frozen=True)
class DecayingTail:
    """amplitude * (1 + r^2)**(-exponent/2): smooth at the origin, ~ r**(-exponent) at infinity."""

    amplitude: float
    exponent: float

    def evaluate(self, r: np.ndarray) -> RadialTriple:
        s = self.exponent
        base = 1.0 + r * r
        v = self.amplitude * base ** (-0.5 * s)
        dv = -s * r * v / base
        ddv = -s * v / (base * base) * (base - (s + 2.0) * r * r)
        return v, dv, ddv


@dataclass(frozen=True)
class PolynomialBump:
    """amplitude * (1 - s^2)**power on |s| < 1 with s = (r - center)/width; C^{power-1}."""

    center: float
    width: float
    amplitude: float = 1.0
    power: int = 4

    def __post_init__(self) -> None:
        if self.width <= 0.0:
            raise DomainError("bump width must be positive")
        if self.power < 3:
            raise DomainError("bump power must be at least 3 for two continuous derivatives")

    @property
    def support(self) -> Tuple[float, float]:
        return (self.center - self.width, self.center + self.width)

    def evaluate(self, r: np.ndarray) -> RadialTriple:
        k = self.power
        s = (r - self.center) / self.width
        inside = np.abs(s) < 1.0
        q = np.where(inside, 1.0 - s * s, 0.0)
        v = self.amplitude * q**k
        dv = self.amplitude * k * q ** (k - 1) * (-2.0 * s) / self.width
        ddv = (
            self.amplitude
            * (k * (k - 1) * q ** (k - 2) * 4.0 * s * s - 2.0 * k * q ** (k - 1))
            / (self.width * self.width)
        )
        return v, np.where(inside, dv, 0.0), np.where(inside, ddv, 0.0)


@dataclass(frozen=True)
class HyperbolicSine:
    def evaluate(self, r: np.ndarray) -> RadialTriple:
        return np.sinh(r), np.cosh(r), np.sinh(r)


@dataclass(frozen=True)
class SchwarzschildLapse:
    """sqrt(1 + r^2 - 2 m r^(2-n)): the static lapse of the Schwarzschild-AdS family."""

    n: int
    m: float

    def evaluate(self, r: np.ndarray) -> RadialTriple:
        n, m = self.n, self.m
        F = 1.0 + r * r - 2.0 * m * r ** (2 - n)
        if np.any(F <= 0.0):
            raise DomainError("static lapse evaluated inside the horizon region")
        dF = 2.0 * r + 2.0 * m * (n - 2) * r ** (1 - n)
        ddF = 2.0 - 2.0 * m * (n - 2) * (n - 1) * r ** (-n)
        f = np.sqrt(F)
        return f, dF / (2.0 * f), ddF / (2.0 * f) - dF * dF / (4.0 * f**3)


@dataclass(frozen=True)
class SumRadial:
    terms: Tuple[RadialFunction, ...]

    def evaluate(self, r: np.ndarray) -> RadialTriple:
        v = np.zeros_like(r)
        dv = np.zeros_like(r)
        ddv = np.zeros_like(r)
        for term in self.terms:
            a, b, c = term.evaluate(r)
            v, dv, ddv = v + a, dv + b, ddv + c
        return v, dv, ddv


_ANGULAR_KINDS = ("one", "sin", "cos")


def _angular_factor(kind: str, theta: np.ndarray) -> RadialTriple:
    if kind == "one":
        ones = np.ones_like(theta)
        return ones, np.zeros_like(theta), np.zeros_like(theta)
    if kind == "sin":
        s = np.sin(theta)
        return s, np.cos(theta), -s
    if kind == "cos":
        c = np.cos(theta)
        return c, -np.sin(theta), -c
    raise ValueError(f"unknown angular factor: {kind}")


def unit_vector_factors(n: int, index: int) -> Tuple[str, ...]:
    """Angular factors of x_hat_index (1-based) in the hyperboloid chart."""
    if not 1 <= index <= n:
        raise DomainError(f"potential index {index} outside 1..{n}")
    position = index - 1
    kinds: List[str] = []
    for c in range(n - 1):
        if c < position:
            kinds.append("sin")
        elif c == position:
            kinds.append("cos")
        else:
            kinds.append("one")
    return tuple(kinds)


@dataclass(frozen=True)
class SeparableScalarField:
    """coefficient * R(y_0) * prod_k f_k(y_k) with f_k in {1, sin, cos}."""

    dimension: int
    radial: RadialFunction
    factors: Tuple[str, ...]
    coefficient: float = 1.0
    label: str = "separable"

    def __post_init__(self) -> None:
        if len(self.factors) != self.dimension - 1:
            raise DomainError("one angular factor per angle is required")
        unknown = [kind for kind in self.factors if kind not in _ANGULAR_KINDS]
        if unknown:
            raise DomainError(f"unknown angular factors: {unknown}")

    def jet(self, points: np.ndarray, order: int = 2) -> ScalarJet:
        Y = np.atleast_2d(np.asarray(points, dtype=float))
        count, n = Y.shape
        R, dR, ddR = self.radial.evaluate(Y[:, 0])
        vals = np.empty((count, n - 1))
        d1 = np.empty((count, n - 1))
        d2 = np.empty((count, n - 1))
        for k, kind in enumerate(self.factors):
            vals[:, k], d1[:, k], d2[:, k] = _angular_factor(kind, Y[:, k + 1])
        product = np.prod(vals, axis=1)
        c = self.coefficient
        value = c * R * product
        if order < 1:
            return ScalarJet(value=value)

        # products with one or two factors replaced by derivatives; no division by sin
        first = np.empty((count, n - 1))
        for k in range(n - 1):
            columns = vals.copy()
            columns[:, k] = d1[:, k]
            first[:, k] = np.prod(columns, axis=1)
        grad = np.empty((count, n))
        grad[:, 0] = c * dR * product
        grad[:, 1:] = c * R[:, None] * first
        if order < 2:
            return ScalarJet(value=value, grad=grad)

        hess = np.empty((count, n, n))
        hess[:, 0, 0] = c * ddR * product
        hess[:, 0, 1:] = c * dR[:, None] * first
        hess[:, 1:, 0] = hess[:, 0, 1:]
        for k in range(n - 1):
            for ell in range(k, n - 1):
                columns = vals.copy()
                if k == ell:
                    columns[:, k] = d2[:, k]
                else:
                    columns[:, k] = d1[:, k]
                    columns[:, ell] = d1[:, ell]
                entry = c * R * np.prod(columns, axis=1)
                hess[:, k + 1, ell + 1] = entry
                hess[:, ell + 1, k + 1] = entry
        return ScalarJet(value=value, grad=grad, hess=hess)


@dataclass(frozen=True)
class ConstantField:
    dimension: int
    value: float = 1.0
    label: str = "constant"

    def jet(self, points: np.ndarray, order: int = 2) -> ScalarJet:
        Y = np.atleast_2d(np.asarray(points, dtype=float))
        count, n = Y.shape
        return ScalarJet(
            value=np.full(count, self.value),
            grad=np.zeros((count, n)) if order >= 1 else None,
            hess=np.zeros((count, n, n)) if order >= 2 else None,
        )


@dataclass(frozen=True)
class SumScalarField:
    dimension: int
    terms: Tuple[ScalarField, ...]
    label: str = "sum"

    def jet(self, points: np.ndarray, order: int = 2) -> ScalarJet:
        Y = np.atleast_2d(np.asarray(points, dtype=float))
        count, n = Y.shape
        value = np.zeros(count)
        grad = np.zeros((count, n)) if order >= 1 else None
        hess = np.zeros((count, n, n)) if order >= 2 else None
        for term in self.terms:
            part = term.jet(Y, order)
            value = value + part.value
            if grad is not None:
                grad = grad + part.grad
            if hess is not None:
                hess = hess + part.hess
        return ScalarJet(value=value, grad=grad, hess=hess)


def chart_potential(n: int, index: int) -> SeparableScalarField:
    """Static potential of b in the hyperboloid chart: V_0 = sqrt(1+r^2), V_i = x_i."""
    if n < 3:
        raise DomainError("dimension must be at least 3")
    if index == 0:
        return SeparableScalarField(n, SqrtOnePlusSquare(), ("one",) * (n - 1), label="V_0")
    return SeparableScalarField(n, LinearRadial(), unit_vector_factors(n, index), label=f"V_{index}")


def angular_modulated(
    n: int,
    radial: RadialFunction,
    coefficients: Sequence[float],
    *,
    label: str = "modulated",
) -> SumScalarField:
    """R(r) * (c_0 + c_1 x_hat_1 + ... + c_n x_hat_n) as a sum of separable terms."""
    if len(coefficients) != n + 1:
        raise DomainError(f"expected {n + 1} angular coefficients, got {len(coefficients)}")
    terms: List[SeparableScalarField] = []
    if coefficients[0] != 0.0:
        terms.append(SeparableScalarField(n, radial, ("one",) * (n - 1), float(coefficients[0])))
    for index in range(1, n + 1):
        c = float(coefficients[index])
        if c != 0.0:
            terms.append(SeparableScalarField(n, radial, unit_vector_factors(n, index), c))
    return SumScalarField(dimension=n, terms=tuple(terms), label=label)


@dataclass(frozen=True)
class CartesianPotential:
    """Static potentials of b in Cartesian coordinates of the hyperboloid model."""

    dimension: int
    index: int
    label: str = field(default="")

    def __post_init__(self) -> None:
        if not 0 <= self.index <= self.dimension:
            raise DomainError(f"potential index {self.index} outside 0..{self.dimension}")

    def jet(self, points: np.ndarray, order: int = 2) -> ScalarJet:
        X = np.atleast_2d(np.asarray(points, dtype=float))
        count, n = X.shape
        if self.index == 0:
            v = np.sqrt(1.0 + np.sum(X * X, axis=1))
            grad = X / v[:, None]
            hess = (np.eye(n)[None] * (v * v)[:, None, None] - np.einsum("ni,nj->nij", X, X)) / (
                v**3
            )[:, None, None]
        else:
            v = X[:, self.index - 1].copy()
            grad = np.zeros((count, n))
            grad[:, self.index - 1] = 1.0
            hess = np.zeros((count, n, n))
        return ScalarJet(
            value=v,
            grad=grad if order >= 1 else None,
            hess=hess if order >= 2 else None,
        )


@dataclass(frozen=True)
class HorosphericalPotential:
    """sqrt(1+|x|^2) - x_axis written without cancellation along the +axis ray."""

    dimension: int
    axis: int = 1
    label: str = "V_0 - x_1"

    def jet(self, points: np.ndarray, order: int = 2) -> ScalarJet:
        X = np.atleast_2d(np.asarray(points, dtype=float))
        v0 = CartesianPotential(self.dimension, 0).jet(X, order)
        vi = CartesianPotential(self.dimension, self.axis).jet(X, order)
        x_axis = X[:, self.axis - 1]
        norm_sq = np.sum(X * X, axis=1)
        value = (1.0 + norm_sq - x_axis * x_axis) / (v0.value + x_axis)
        return ScalarJet(
            value=value,
            grad=None if order < 1 else v0.grad - vi.grad,
            hess=None if order < 2 else v0.hess - vi.hess,
        )


@dataclass(frozen=True)
class CartesianRadialField:
    """v(|x|) in Cartesian coordinates."""

    dimension: int
    radial: RadialFunction
    label: str = "radial"

    def jet(self, points: np.ndarray, order: int = 2) -> ScalarJet:
        X = np.atleast_2d(np.asarray(points, dtype=float))
        count, n = X.shape
        r = np.linalg.norm(X, axis=1)
        if np.any(r == 0.0):
            raise DomainError("radial Cartesian field evaluated at the origin")
        v, dv, ddv = self.radial.evaluate(r)
        if order < 1:
            return ScalarJet(value=v)
        unit = X / r[:, None]
        grad = dv[:, None] * unit
        if order < 2:
            return ScalarJet(value=v, grad=grad)
        outer = np.einsum("ni,nj->nij", unit, unit)
        hess = ddv[:, None, None] * outer + (dv / r)[:, None, None] * (np.eye(n)[None] - outer)
        return ScalarJet(value=v, grad=grad, hess=hess)


@dataclass(frozen=True)
class HyperbolicDecayingRadial:
    """Decaying radial solution of (Delta - 3) u = 0 on hyperbolic 3-space: 1/(r (sqrt(1+r^2)+r)^2)."""

    def evaluate(self, r: np.ndarray) -> RadialTriple:
        # u = e^{-2s}/sinh s with r = sinh s; derivatives by the chain rule in s
        c = np.sqrt(1.0 + r * r)
        e2 = 1.0 / (c + r) ** 2
        u = e2 / r
        du_ds = u * (-2.0 - c / r)
        d2u_ds2 = u * ((2.0 + c / r) ** 2 + 1.0 / (r * r))
        du = du_ds / c
        ddu = d2u_ds2 / (c * c) - du_ds * r / (c**3)
        return u, du, ddu


class StaticPotentialBasis:
    """V_0, ..., V_n in both the hyperboloid chart and Cartesian coordinates."""

    def __init__(self, n: int) -> None:
        if n < 3:
            raise DomainError("dimension must be at least 3")
        self.n = n

    def chart(self, index: int) -> SeparableScalarField:
        return chart_potential(self.n, index)

    def cartesian(self, index: int) -> CartesianPotential:
        return CartesianPotential(self.n, index, label=f"V_{index}")

    def chart_fields(self) -> List[SeparableScalarField]:
        return [self.chart(k) for k in range(self.n + 1)]

    def cartesian_fields(self) -> List[CartesianPotential]:
        return [self.cartesian(k) for k in range(self.n + 1)]

    @staticmethod
    def closed_form(index: int, x: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(x, dtype=float))
        if index == 0:
            return np.sqrt(1.0 + np.sum(X * X, axis=1))
        return X[:, index - 1].copy()


def sphere_area(n: int) -> float:
    """Area of the unit (n-1)-sphere."""
    return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)
