from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Protocol, Tuple

import numpy as np
from scipy.optimize import brentq

from core.errors import DomainError
from geometry.jets import ScalarField, TensorField, TensorJet

ProfileValues = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]
CartesianCoefficients = Tuple[
    np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray
]


class RadialProfile(Protocol):
    """g = A(y_0) dy_0^2 + B(y_0) * (factor metric)."""

    name: str

    def evaluate(self, r: np.ndarray) -> ProfileValues:
        """(A, A', A'', B, B', B'') at the given first coordinates."""

    def check_domain(self, r: np.ndarray) -> None:
        """Raise DomainError outside the family's domain."""


@dataclass(frozen=True)
class HyperbolicProfile:
    name: str = "hyperbolic"

    def evaluate(self, r: np.ndarray) -> ProfileValues:
        s = 1.0 + r * r
        A = 1.0 / s
        dA = -2.0 * r / (s * s)
        ddA = (6.0 * r * r - 2.0) / (s * s * s)
        return A, dA, ddA, r * r, 2.0 * r, np.full_like(r, 2.0)

    def check_domain(self, r: np.ndarray) -> None:
        if np.any(r <= 0.0):
            raise DomainError("hyperboloid chart requires r > 0")

    def cartesian_coefficients(self, rho: np.ndarray) -> CartesianCoefficients:
        # g_ij = delta_ij - x_i x_j / (1 + |x|^2), smooth through the origin
        s = 1.0 + rho
        ones = np.ones_like(rho)
        zeros = np.zeros_like(rho)
        return ones, zeros, zeros.copy(), -1.0 / s, 1.0 / (s * s), -2.0 / (s * s * s)


@dataclass(frozen=True)
class SchwarzschildAdSProfile:
    n: int
    m: float
    name: str = "schwarzschild_ads"

    def lapse_squared(self, r: np.ndarray) -> np.ndarray:
        return 1.0 + r * r - 2.0 * self.m * r ** (2 - self.n)

    def evaluate(self, r: np.ndarray) -> ProfileValues:
        self.check_domain(r)
        n, m = self.n, self.m
        F = self.lapse_squared(r)
        dF = 2.0 * r + 2.0 * m * (n - 2) * r ** (1 - n)
        ddF = 2.0 - 2.0 * m * (n - 2) * (n - 1) * r ** (-n)
        A = 1.0 / F
        dA = -dF / (F * F)
        ddA = -ddF / (F * F) + 2.0 * dF * dF / (F * F * F)
        return A, dA, ddA, r * r, 2.0 * r, np.full_like(r, 2.0)

    def check_domain(self, r: np.ndarray) -> None:
        if np.any(r <= 0.0):
            raise DomainError("hyperboloid chart requires r > 0")
        if self.m > 0.0 and np.any(self.lapse_squared(r) <= 0.0):
            raise DomainError(
                f"Schwarzschild-AdS (m={self.m}) evaluated inside the horizon region "
                f"r <= {self.horizon_radius():.6g}"
            )

    def horizon_radius(self) -> float:
        if self.m == 0.0:
            return 0.0
        upper = max(1.0, (2.0 * self.m) ** (1.0 / self.n)) * 2.0
        return float(
            brentq(lambda x: float(self.lapse_squared(np.array([x]))[0]), 1e-12, upper, xtol=1e-15)
        )


@dataclass(frozen=True)
class CoshWarpProfile:
    """dt^2 + cosh(t)^2 * (factor): the warped-product fixture."""

    name: str = "cosh_warp"

    def evaluate(self, r: np.ndarray) -> ProfileValues:
        ones = np.ones_like(r)
        zeros = np.zeros_like(r)
        return ones, zeros, zeros.copy(), np.cosh(r) ** 2, np.sinh(2.0 * r), 2.0 * np.cosh(2.0 * r)

    def check_domain(self, r: np.ndarray) -> None:
        if not np.all(np.isfinite(r)):
            raise DomainError("warped coordinate t must be finite")


@dataclass(frozen=True)
class SpaceFormFactor:
    """Round unit sphere (curvature +1) or hyperbolic space (curvature -1) in polar angles.

    The metric is sum_a s_a(theta) dtheta_a^2 with s_a = prod_{c<a} q_c(theta_c),
    q_0 = sin^2 or sinh^2, q_c = sin^2 for c > 0.
    """

    dim: int
    curvature: int = 1

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise DomainError("factor dimension must be at least 2")
        if self.curvature not in (1, -1):
            raise DomainError("factor curvature must be +1 or -1")

    def _q(self, c: int, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if c == 0 and self.curvature == -1:
            return np.sinh(theta) ** 2, np.sinh(2.0 * theta), 2.0 * np.cosh(2.0 * theta)
        return np.sin(theta) ** 2, np.sin(2.0 * theta), 2.0 * np.cos(2.0 * theta)

    def evaluate(self, angles: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """s (N, d), ds[N, c, a] = d s_a / d theta_c, dds[N, c, e, a]."""
        count = angles.shape[0]
        d = self.dim
        q = np.ones((count, d))
        dq = np.zeros((count, d))
        ddq = np.zeros((count, d))
        for c in range(d - 1):
            q[:, c], dq[:, c], ddq[:, c] = self._q(c, angles[:, c])
        s = np.ones((count, d))
        ds = np.zeros((count, d, d))
        dds = np.zeros((count, d, d, d))
        for a in range(d):
            s[:, a] = np.prod(q[:, :a], axis=1)
            for c in range(a):
                cols = q[:, :a].copy()
                cols[:, c] = dq[:, c]
                ds[:, c, a] = np.prod(cols, axis=1)
                for e in range(a):
                    cols2 = q[:, :a].copy()
                    if e == c:
                        cols2[:, c] = ddq[:, c]
                    else:
                        cols2[:, c] = dq[:, c]
                        cols2[:, e] = dq[:, e]
                    dds[:, c, e, a] = np.prod(cols2, axis=1)
        return s, ds, dds

    def check_domain(self, angles: np.ndarray) -> None:
        if self.curvature == -1 and np.any(angles[:, 0] <= 0.0):
            raise DomainError("hyperbolic factor requires a positive polar radius")


class MetricSpec(Protocol):
    dimension: int
    family: str
    label: str
    derivative_mode: str
    coordinates: str
    rotationally_symmetric: bool
    decay_rate: Optional[float]

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        """Metric components and coordinate derivatives up to ``order``."""

    def check_domain(self, points: np.ndarray) -> None:
        """Raise DomainError when any point lies outside the family's domain."""

    def parameters(self) -> Dict[str, Any]:
        """Family parameters for reports."""


def _batch(points: np.ndarray, n: int) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(points, dtype=float))
    if Y.shape[1] != n:
        raise DomainError(f"expected points of dimension {n}, got {Y.shape[1]}")
    return Y


class SeparableDiagonalMetric:
    """A(y_0) dy_0^2 + B(y_0) * (space-form factor); analytic to second order."""

    derivative_mode = "analytic"

    def __init__(
        self,
        n: int,
        profile: RadialProfile,
        factor: Optional[SpaceFormFactor] = None,
        *,
        family: str,
        coordinates: str = "spherical",
        decay_rate: Optional[float] = None,
        params: Optional[Dict[str, Any]] = None,
    ) -> None:
        if n < 3:
            raise DomainError(f"dimension must be at least 3, got {n}")
        self.dimension = n
        self.profile = profile
        self.factor = factor or SpaceFormFactor(n - 1, 1)
        if self.factor.dim != n - 1:
            raise DomainError("factor dimension must be n - 1")
        self.family = family
        self.label = family
        self.coordinates = coordinates
        self.decay_rate = decay_rate
        self.rotationally_symmetric = coordinates == "spherical" and self.factor.curvature == 1
        self._params = dict(params or {})

    def parameters(self) -> Dict[str, Any]:
        return dict(self._params)

    def check_domain(self, points: np.ndarray) -> None:
        Y = _batch(points, self.dimension)
        self.profile.check_domain(Y[:, 0])
        self.factor.check_domain(Y[:, 1:])

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        Y = _batch(points, self.dimension)
        self.check_domain(Y)
        count, n = Y.shape
        A, dA, ddA, B, dB, ddB = self.profile.evaluate(Y[:, 0])
        s, ds, dds = self.factor.evaluate(Y[:, 1:])
        g = np.zeros((count, n, n))
        g[:, 0, 0] = A
        idx = np.arange(1, n)
        g[:, idx, idx] = B[:, None] * s
        if order < 1:
            return TensorJet(value=g)

        dg = np.zeros((count, n, n, n))
        dg[:, 0, 0, 0] = dA
        dg[:, 0, idx, idx] = dB[:, None] * s
        for c in range(n - 1):
            dg[:, c + 1, idx, idx] = B[:, None] * ds[:, c, :]
        if order < 2:
            return TensorJet(value=g, grad=dg)

        ddg = np.zeros((count, n, n, n, n))
        ddg[:, 0, 0, 0, 0] = ddA
        ddg[:, 0, 0, idx, idx] = ddB[:, None] * s
        for c in range(n - 1):
            ddg[:, 0, c + 1, idx, idx] = dB[:, None] * ds[:, c, :]
            ddg[:, c + 1, 0, idx, idx] = dB[:, None] * ds[:, c, :]
            for e in range(n - 1):
                ddg[:, c + 1, e + 1, idx, idx] = B[:, None] * dds[:, c, e, :]
        return TensorJet(value=g, grad=dg, hess=ddg)

    def cartesian_view(self) -> "CartesianRadialMetric":
        if not self.rotationally_symmetric:
            raise DomainError(f"{self.family} has no rotationally symmetric Cartesian form")
        return CartesianRadialMetric(self)

    def __repr__(self) -> str:
        return f"SeparableDiagonalMetric(family={self.family!r}, n={self.dimension}, params={self._params})"


def _generic_cartesian_coefficients(profile: RadialProfile, rho: np.ndarray) -> CartesianCoefficients:
    r = np.sqrt(rho)
    A, dA, ddA, B, dB, ddB = profile.evaluate(r)
    r2 = r * r
    a = B / r2
    a_r = dB / r2 - 2.0 * B / (r2 * r)
    a_rr = ddB / r2 - 4.0 * dB / (r2 * r) + 6.0 * B / (r2 * r2)
    diff = A - a
    c = diff / r2
    c_r = (dA - a_r) / r2 - 2.0 * diff / (r2 * r)
    c_rr = (ddA - a_rr) / r2 - 4.0 * (dA - a_r) / (r2 * r) + 6.0 * diff / (r2 * r2)

    def to_rho(f_r: np.ndarray, f_rr: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return f_r / (2.0 * r), (f_rr - f_r / r) / (4.0 * r2)

    a_p, a_pp = to_rho(a_r, a_rr)
    c_p, c_pp = to_rho(c_r, c_rr)
    return a, a_p, a_pp, c, c_p, c_pp


class CartesianRadialMetric:
    """A rotationally symmetric family written as g_ij = a(|x|^2) delta_ij + c(|x|^2) x_i x_j."""

    derivative_mode = "analytic"
    coordinates = "cartesian"
    rotationally_symmetric = True

    def __init__(self, chart_metric: SeparableDiagonalMetric) -> None:
        self.chart_metric = chart_metric
        self.dimension = chart_metric.dimension
        self.family = chart_metric.family
        self.label = f"{chart_metric.family}[cartesian]"
        self.decay_rate = chart_metric.decay_rate

    def parameters(self) -> Dict[str, Any]:
        return self.chart_metric.parameters()

    def _coefficients(self, rho: np.ndarray) -> CartesianCoefficients:
        profile = self.chart_metric.profile
        special = getattr(profile, "cartesian_coefficients", None)
        if special is not None:
            return special(rho)  # type: ignore[no-any-return]
        return _generic_cartesian_coefficients(profile, rho)

    def check_domain(self, points: np.ndarray) -> None:
        X = _batch(points, self.dimension)
        r = np.linalg.norm(X, axis=1)
        if isinstance(self.chart_metric.profile, HyperbolicProfile):
            return
        self.chart_metric.profile.check_domain(r)

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        X = _batch(points, self.dimension)
        self.check_domain(X)
        count, n = X.shape
        rho = np.sum(X * X, axis=1)
        a, a_p, a_pp, c, c_p, c_pp = self._coefficients(rho)
        eye = np.eye(n)
        xx = np.einsum("ni,nj->nij", X, X)
        g = a[:, None, None] * eye[None] + c[:, None, None] * xx
        if order < 1:
            return TensorJet(value=g)

        # d_k g_ij = 2 a' x_k d_ij + 2 c' x_k x_i x_j + c (d_ik x_j + d_jk x_i)
        sym = np.einsum("ik,nj->nkij", eye, X) + np.einsum("jk,ni->nkij", eye, X)
        dg = (
            2.0 * a_p[:, None, None, None] * np.einsum("nk,ij->nkij", X, eye)
            + 2.0 * c_p[:, None, None, None] * np.einsum("nk,nij->nkij", X, xx)
            + c[:, None, None, None] * sym
        )
        if order < 2:
            return TensorJet(value=g, grad=dg)

        xk_xl = xx
        ddg = (
            4.0 * a_pp[:, None, None, None, None] * np.einsum("nkl,ij->nklij", xk_xl, eye)
            + 2.0 * a_p[:, None, None, None, None] * np.einsum("kl,ij->klij", eye, eye)[None]
            + 4.0 * c_pp[:, None, None, None, None] * np.einsum("nkl,nij->nklij", xk_xl, xx)
            + 2.0 * c_p[:, None, None, None, None] * np.einsum("kl,nij->nklij", eye, xx)
            + 2.0 * c_p[:, None, None, None, None] * np.einsum("nk,nlij->nklij", X, sym)
            + 2.0 * c_p[:, None, None, None, None] * np.einsum("nl,nkij->nklij", X, sym)
            + c[:, None, None, None, None]
            * (np.einsum("ik,jl->klij", eye, eye) + np.einsum("jk,il->klij", eye, eye))[None]
        )
        return TensorJet(value=g, grad=dg, hess=ddg)


class ConformalMetric:
    """u * base with u > 0; derivatives by the product rule."""

    def __init__(
        self, base: MetricSpec, u: ScalarField, *, params: Optional[Dict[str, Any]] = None
    ) -> None:
        self.base = base
        self.u = u
        self.dimension = base.dimension
        self.family = "conformal"
        self.label = f"conformal({base.label})"
        self.derivative_mode = base.derivative_mode
        self.coordinates = base.coordinates
        self.rotationally_symmetric = False
        self.decay_rate = base.decay_rate
        self._params = dict(params or {"base": base.parameters(), "u": getattr(u, "label", "u")})

    def parameters(self) -> Dict[str, Any]:
        return dict(self._params)

    def check_domain(self, points: np.ndarray) -> None:
        self.base.check_domain(points)
        values = self.u.jet(_batch(points, self.dimension), 0).value
        if np.any(values <= 0.0):
            raise DomainError("conformal factor must be positive")

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        Y = _batch(points, self.dimension)
        self.check_domain(Y)
        base = self.base.jet(Y, order)
        u = self.u.jet(Y, order)
        return conformal_product(u.value, u.grad, u.hess, base, order)


def conformal_product(
    u: np.ndarray,
    du: Optional[np.ndarray],
    ddu: Optional[np.ndarray],
    base: TensorJet,
    order: int,
) -> TensorJet:
    """Jet of u * T from the jets of u and T."""
    value = u[:, None, None] * base.value
    if order < 1 or du is None or base.grad is None:
        return TensorJet(value=value)
    grad = np.einsum("nm,nij->nmij", du, base.value) + u[:, None, None, None] * base.grad
    if order < 2 or ddu is None or base.hess is None:
        return TensorJet(value=value, grad=grad)
    hess = (
        np.einsum("nab,nij->nabij", ddu, base.value)
        + np.einsum("na,nbij->nabij", du, base.grad)
        + np.einsum("nb,naij->nabij", du, base.grad)
        + u[:, None, None, None, None] * base.hess
    )
    return TensorJet(value=value, grad=grad, hess=hess)


class PerturbedMetric:
    """base + h for a symmetric tensor field h (analytic or finite-difference)."""

    def __init__(
        self, base: MetricSpec, h: TensorField, *, params: Optional[Dict[str, Any]] = None
    ) -> None:
        if h.dimension != base.dimension:
            raise DomainError("perturbation dimension does not match the base metric")
        self.base = base
        self.h = h
        self.dimension = base.dimension
        self.family = "perturbed"
        self.label = f"perturbed({base.label}, {h.label})"
        self.derivative_mode = (
            "finite_difference"
            if "finite_difference" in (base.derivative_mode, h.derivative_mode)
            else "analytic"
        )
        self.coordinates = base.coordinates
        self.rotationally_symmetric = False
        self.decay_rate = getattr(h, "decay_rate", None) or base.decay_rate
        self._params = dict(params or {"base": base.parameters(), "h": h.label})

    def parameters(self) -> Dict[str, Any]:
        return dict(self._params)

    def check_domain(self, points: np.ndarray) -> None:
        self.base.check_domain(points)

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        Y = _batch(points, self.dimension)
        return self.base.jet(Y, order) + self.h.jet(Y, order)


def hyperbolic_metric(n: int) -> SeparableDiagonalMetric:
    """The hyperboloid model b = dr^2/(1+r^2) + r^2 h."""
    if n < 3:
        raise DomainError(f"dimension must be at least 3, got {n}")
    return SeparableDiagonalMetric(n, HyperbolicProfile(), family="hyperbolic", params={})


def schwarzschild_ads(n: int, m: float) -> SeparableDiagonalMetric:
    if n < 3:
        raise DomainError(f"dimension must be at least 3, got {n}")
    if m < 0.0 or not math.isfinite(m):
        raise DomainError(f"mass parameter must be non-negative, got {m}")
    if m == 0.0:
        profile: RadialProfile = HyperbolicProfile()
    else:
        profile = SchwarzschildAdSProfile(n, float(m))
    return SeparableDiagonalMetric(
        n,
        profile,
        family="schwarzschild_ads",
        decay_rate=float(n),
        params={"m": float(m)},
    )


def horizon_radius(g: MetricSpec) -> float:
    profile = getattr(g, "profile", None)
    if isinstance(profile, SchwarzschildAdSProfile):
        return profile.horizon_radius()
    return 0.0


def is_hyperbolic(g: MetricSpec) -> bool:
    return isinstance(g, SeparableDiagonalMetric) and isinstance(g.profile, HyperbolicProfile) and (
        g.coordinates == "spherical"
    )


def metric_deviation(g: MetricSpec, points: np.ndarray, order: int = 2) -> TensorJet:
    """Jet of h = g - b in the hyperboloid chart, avoiding cancellation where the family allows."""
    if g.coordinates != "spherical":
        raise DomainError("deviation from b is defined in the hyperboloid chart only")
    Y = _batch(points, g.dimension)
    background = hyperbolic_metric(g.dimension)
    if is_hyperbolic(g):
        zeros = background.jet(Y, order).scaled(0.0)
        return zeros
    if isinstance(g, PerturbedMetric):
        if is_hyperbolic(g.base):
            g.check_domain(Y)
            return g.h.jet(Y, order)
        return metric_deviation(g.base, Y, order) + g.h.jet(Y, order)
    if isinstance(g, ConformalMetric) and is_hyperbolic(g.base):
        g.check_domain(Y)
        u = g.u.jet(Y, order)
        return conformal_product(u.value - 1.0, u.grad, u.hess, background.jet(Y, order), order)
    return g.jet(Y, order) - background.jet(Y, order)


def min_eigenvalue(g: MetricSpec, points: np.ndarray) -> np.ndarray:
    values = g.jet(points, 0).value
    return np.linalg.eigvalsh(0.5 * (values + np.swapaxes(values, 1, 2)))[:, 0]
