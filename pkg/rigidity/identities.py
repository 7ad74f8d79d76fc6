from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from core.errors import DomainError
from geometry.chart import shell_points
from geometry.jets import ScalarField
from geometry.metrics import MetricSpec
from mass.quadrature import SphereQuadrature, pairwise_sum
from odelab.geodesics import GeodesicSample, integrate_geodesics
from odelab.lemmas import ExponentialFit, fit_exponential_pair
from operators.linearized import hessian_rigidity_residual, static_residual_fields
from operators.volume import VolumeQuadrature
from tensors.calculus import dot, norm_squared, raise_index
from tensors.curvature import CurvaturePack, curvature_at, curvature_from_jet, sectional_curvature

BALL_INNER_FRACTION = 1e-6
STATIC_THRESHOLD = 1e-6
CRITICAL_GRADIENT = 1e-10
STENCIL_STEP = 5e-3
ODE_STEP = 0.025


# ---------------------------------------------------------------- integral identity


@dataclass(frozen=True)
class WangReport:
    lhs: float
    rhs: float
    outer_flux: float
    inner_flux: float
    gap: float
    relative_gap: float
    static: bool
    static_residual: float
    region: Tuple[float, float]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "outer_flux": self.outer_flux,
            "inner_flux": self.inner_flux,
            "gap": self.gap,
            "relative_gap": self.relative_gap,
            "static": self.static,
            "static_residual": self.static_residual,
            "region": list(self.region),
        }


def boundary_flux(g: MetricSpec, f: ScalarField, radius: float, sphere: SphereQuadrature) -> float:
    """Integral over r = radius of (Ric + (n-1) g)(grad f, nu) d(sigma_g)."""
    angles, weights = sphere.nodes()
    points = shell_points(radius, angles)
    pack = curvature_from_jet(points, g.jet(points, 2))
    jet = f.jet(points, 1)
    assert jet.grad is not None
    grad = raise_index(pack, jet.grad)
    normal = pack.inverse[:, :, 0] / np.sqrt(pack.inverse[:, 0, 0])[:, None]
    S = pack.traceless_ricci_shift()
    density = np.einsum("nij,ni,nj->n", S, grad, normal)
    area = np.sqrt(np.linalg.det(pack.metric[:, 1:, 1:]))
    return pairwise_sum(density * area * weights / np.sin(angles[:, 0]))


def wang_identity_check(
    g: MetricSpec,
    f: ScalarField,
    r_outer: float,
    *,
    r_inner: Optional[float] = None,
    radial_order: int = 64,
    sphere: Optional[SphereQuadrature] = None,
    floor: float = 1.0,
    static_threshold: float = STATIC_THRESHOLD,
) -> WangReport:
    """int f^-1 |nabla^2 f - f g|^2 dmu_g against the flux of S(grad f) through the boundary.

    The region is the ball of radius r_outer, or the annulus when r_inner is given.
    """
    if g.dimension != 3:
        raise DomainError("the integral identity is evaluated for n = 3 only")
    rule = sphere or SphereQuadrature()
    inner = r_inner if r_inner is not None else BALL_INNER_FRACTION * r_outer
    quad = VolumeQuadrature(inner, r_outer, radial_order, rule.polar, rule.azimuth)
    static_sup = 0.0

    def density(points: np.ndarray, pack: CurvaturePack) -> np.ndarray:
        nonlocal static_sup
        jet = f.jet(points, 2)
        if np.any(jet.value <= 0.0):
            raise DomainError(f"{getattr(f, 'label', 'f')} is not positive on the region")
        tensor, scalar = static_residual_fields(pack, jet)
        static_sup = max(static_sup, float(np.max(tensor)), float(np.max(scalar)))
        residual = hessian_rigidity_residual(g, jet, points, pack)
        return norm_squared(pack, residual) / jet.value

    lhs = quad.integrate(g, density)
    outer = boundary_flux(g, f, r_outer, rule)
    inner_flux = boundary_flux(g, f, r_inner, rule) if r_inner is not None else 0.0
    rhs = outer - inner_flux
    gap = abs(lhs - rhs)
    return WangReport(
        lhs=lhs,
        rhs=rhs,
        outer_flux=outer,
        inner_flux=inner_flux,
        gap=gap,
        relative_gap=gap / max(abs(lhs), abs(rhs), floor),
        static=static_sup < static_threshold,
        static_residual=static_sup,
        region=(0.0 if r_inner is None else float(r_inner), float(r_outer)),
    )


# ---------------------------------------------------------------- pointwise divergence form


@dataclass(frozen=True)
class DivergenceCheck:
    lhs: float
    rhs: float
    residual: float

    def as_dict(self) -> Dict[str, float]:
        return {"lhs": self.lhs, "rhs": self.rhs, "residual": self.residual}


def _weighted_flux(g: MetricSpec, f: ScalarField, points: np.ndarray) -> np.ndarray:
    """sqrt(det g) * S(grad f)^sharp at each point, shape (N, n)."""
    pack = curvature_from_jet(points, g.jet(points, 2))
    jet = f.jet(points, 1)
    assert jet.grad is not None
    covector = np.einsum("nij,nj->ni", pack.traceless_ricci_shift(), raise_index(pack, jet.grad))
    return np.sqrt(np.linalg.det(pack.metric))[:, None] * raise_index(pack, covector)


def divergence_form_check(
    g: MetricSpec, f: ScalarField, point: np.ndarray, *, step: float = STENCIL_STEP
) -> DivergenceCheck:
    """|f |S|^2 - div(S(grad f))| at one point; the divergence by 5-point stencils."""
    p = np.asarray(point, dtype=float).ravel()
    n = p.size
    g.check_domain(p[None, :])
    offsets = np.array([-2.0, -1.0, 1.0, 2.0]) * step
    weights = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * step)
    stencil = np.repeat(p[None, :], 4 * n, axis=0)
    for i in range(n):
        stencil[4 * i : 4 * i + 4, i] += offsets
    flux = _weighted_flux(g, f, stencil)
    total = 0.0
    for i in range(n):
        total += float(np.dot(weights, flux[4 * i : 4 * i + 4, i]))
    pack = curvature_at(g, p[None, :])
    S = pack.traceless_ricci_shift()
    value = float(f.jet(p[None, :], 0).value[0])
    lhs = value * float(dot(pack, S, S)[0])
    rhs = total / math.sqrt(float(np.linalg.det(pack.metric[0])))
    return DivergenceCheck(lhs, rhs, abs(lhs - rhs))


# ---------------------------------------------------------------- sectional-curvature ODEs


@dataclass(frozen=True)
class RhoClassification:
    kind: str
    C: Optional[float]
    residual: float
    notes: Tuple[str, ...] = ()

    def as_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "C": self.C, "residual": self.residual, "notes": list(self.notes)}


def classify_rho(t: np.ndarray, rho: np.ndarray, *, tolerance: float = 1e-8) -> RhoClassification:
    """Fit rho = 1 - 2/(C e^{2t} + 1): C > 0 inside (-1, 1), C < 0 outside, rho = +-1 constant."""
    t = np.asarray(t, dtype=float)
    rho = np.asarray(rho, dtype=float)
    notes = ("exponential alternatives are excluded only on the sampled horizon",)
    for level in (1.0, -1.0):
        if np.max(np.abs(rho - level)) < tolerance:
            return RhoClassification("constant", None, float(np.max(np.abs(rho - level))), notes)
    inside = np.abs(rho) < 1.0
    if np.all(inside):
        kind = "tanh-type"
    elif not np.any(inside):
        kind = "coth-type"
    else:
        return RhoClassification("indeterminate", None, math.inf, notes)
    C = float(np.median((1.0 + rho) / (1.0 - rho) * np.exp(-2.0 * t)))
    model = 1.0 - 2.0 / (C * np.exp(2.0 * t) + 1.0)
    return RhoClassification(kind, C, float(np.max(np.abs(rho - model))), notes)


def gradient_geodesic(
    g: MetricSpec, f: ScalarField, start: np.ndarray, horizon: float, *, step: float = ODE_STEP
) -> GeodesicSample:
    """Geodesic along grad f / |grad f| carrying two parallel unit vectors orthogonal to it."""
    p = np.asarray(start, dtype=float).ravel()[None, :]
    pack = curvature_at(g, p)
    jet = f.jet(p, 1)
    assert jet.grad is not None
    grad = raise_index(pack, jet.grad)
    norm = float(np.sqrt(np.einsum("nij,ni,nj->n", pack.metric, grad, grad))[0])
    if norm < CRITICAL_GRADIENT:
        raise DomainError("f has a critical point at the start of the geodesic")
    n = p.shape[1]
    # two coordinate directions least aligned with grad f
    order = np.argsort(np.abs(grad[0]))
    frames = np.zeros((1, 2, n))
    frames[0, 0, order[0]] = 1.0
    frames[0, 1, order[1]] = 1.0
    return integrate_geodesics(g, p, grad, horizon, frames=frames, segment=step)


def _five_point(values: np.ndarray, h: float) -> np.ndarray:
    """Central first derivative at interior samples 2..K-3."""
    return (values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]) / (12.0 * h)


@dataclass(frozen=True)
class SectionalOdeReport:
    step: float
    rho_residual: float
    curvature_residual: float
    mixed_residual: float
    hessian_residual: float
    rho: RhoClassification
    exponential_fit: ExponentialFit
    t: np.ndarray
    rho_samples: np.ndarray
    curvature_samples: np.ndarray

    def as_dict(self) -> Dict[str, Any]:
        return {
            "step": self.step,
            "rho_residual": self.rho_residual,
            "curvature_residual": self.curvature_residual,
            "mixed_residual": self.mixed_residual,
            "hessian_residual": self.hessian_residual,
            "rho": self.rho.as_dict(),
            "exponential_fit": self.exponential_fit.as_dict(),
        }


def sectional_ode_check(
    g: MetricSpec, f: ScalarField, sample: GeodesicSample, seed: int = 0
) -> SectionalOdeReport:
    """rho' = 1 - rho^2, K' = -2 rho (K + 1) and K(X, gamma') = -1 along a transported frame."""
    if sample.frames is None or sample.frames.shape[2] < 2:
        raise DomainError("the geodesic must carry two parallel frame vectors")
    t = sample.t
    h = float(t[1] - t[0])
    if t.size < 5 or not np.allclose(np.diff(t), h):
        raise DomainError("sectional ODE check needs at least 5 uniform samples")
    positions = sample.positions[seed]
    pack = curvature_at(g, positions)
    jet = f.jet(positions, 2)
    assert jet.grad is not None
    grad = raise_index(pack, jet.grad)
    gradient_norm = np.sqrt(np.einsum("nij,ni,nj->n", pack.metric, grad, grad))
    if np.min(gradient_norm) < CRITICAL_GRADIENT:
        raise DomainError("f has a critical point along the geodesic")
    rho = jet.value / gradient_norm
    X = sample.frames[seed, :, 0]
    Y = sample.frames[seed, :, 1]
    K = sectional_curvature(pack, X, Y)
    mixed = sectional_curvature(pack, X, sample.velocities[seed])
    inner = slice(2, t.size - 2)
    rho_residual = np.abs(_five_point(rho, h) - (1.0 - rho[inner] ** 2))
    k_residual = np.abs(_five_point(K, h) + 2.0 * rho[inner] * (K[inner] + 1.0))
    hessian = hessian_rigidity_residual(g, jet, positions, pack)
    return SectionalOdeReport(
        step=h,
        rho_residual=float(np.max(rho_residual)),
        curvature_residual=float(np.max(k_residual)),
        mixed_residual=float(np.max(np.abs(mixed + 1.0))),
        hessian_residual=float(np.max(np.sqrt(np.maximum(norm_squared(pack, hessian), 0.0)))),
        rho=classify_rho(t, rho),
        exponential_fit=fit_exponential_pair(t, jet.value),
        t=t,
        rho_samples=rho,
        curvature_samples=K,
    )
