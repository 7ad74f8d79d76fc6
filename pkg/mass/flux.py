from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from core.errors import DomainError
from geometry.chart import shell_points
from geometry.jets import ScalarField
from geometry.metrics import MetricSpec, SeparableDiagonalMetric, hyperbolic_metric, metric_deviation
from geometry.potentials import (
    PolynomialBump,
    SeparableScalarField,
    StaticPotentialBasis,
    SumScalarField,
    angular_modulated,
    chart_potential,
    sphere_area,
)
from mass.extrapolation import FluxReport, extrapolate_limit
from mass.quadrature import SphereQuadrature
from tensors.calculus import covariant_derivative_from_jet, raise_index
from tensors.curvature import CurvaturePack, curvature_from_jet

Reference = Literal["b", "g"]


@dataclass(frozen=True)
class MassVector:
    p: Tuple[float, ...]
    reports: Tuple[FluxReport, ...]
    reference: str = "b"

    @property
    def defect(self) -> float:
        return self.p[0] - math.sqrt(sum(value * value for value in self.p[1:]))

    @property
    def flags(self) -> List[str]:
        return sorted({report.status for report in self.reports if report.status == "no-extrapolation"})

    def as_dict(self) -> Dict[str, Any]:
        return {
            "p": list(self.p),
            "defect": self.defect,
            "reference": self.reference,
            "flags": self.flags,
            "components": [report.as_dict() for report in self.reports],
        }


def _shell_nodes(n: int, radius: float, quad: SphereQuadrature) -> Tuple[np.ndarray, np.ndarray]:
    if n != 3:
        raise DomainError("full angular quadrature is implemented for n = 3 only")
    angles, weights = quad.nodes()
    return shell_points(radius, angles), weights


def _potential_index(V: ScalarField) -> Optional[int]:
    """Index k when V is the chart static potential V_k, else None."""
    if isinstance(V, SeparableScalarField) and V.coefficient == 1.0:
        basis = StaticPotentialBasis(V.dimension)
        for k in range(V.dimension + 1):
            if V == basis.chart(k):
                return k
    return None


def _reduced_dimension_value(
    n: int, radius: float, V: ScalarField, g: MetricSpec, integrand: Any
) -> float:
    """n >= 4: rotationally symmetric g only; V_0 reduces to the sphere area, V_i vanish by parity."""
    if not (isinstance(g, SeparableDiagonalMetric) and g.rotationally_symmetric):
        raise DomainError(f"n = {n} sphere integrals need a rotationally symmetric metric")
    index = _potential_index(V)
    if index is None:
        raise DomainError(f"n = {n} sphere integrals support the static potentials V_k only")
    if index > 0:
        return 0.0
    point = np.array([[radius] + [0.5 * math.pi] * (n - 2) + [0.0]])
    density = float(integrand(point)[0])
    return density * sphere_area(n)


def _flux_density(
    g: MetricSpec,
    V: ScalarField,
    points: np.ndarray,
    reference: Reference,
) -> np.ndarray:
    """Integrand of the mass flux per unit round measure d(omega) at points on S_r."""
    n = g.dimension
    h = metric_deviation(g, points, 1)
    b_jet = hyperbolic_metric(n).jet(points, 2)
    pack: CurvaturePack
    if reference == "b":
        pack = curvature_from_jet(points, b_jet)
    else:
        pack = curvature_from_jet(points, g.jet(points, 2))
    Dh = covariant_derivative_from_jet(pack, h)
    div_h = np.einsum("nbi,nbij->nj", pack.inverse, Dh)
    d_tr_h = np.einsum("nik,njik->nj", pack.inverse, Dh)
    tr_h = np.einsum("nij,nij->n", pack.inverse, h.value)

    v = V.jet(points, 1)
    assert v.grad is not None
    grad_v = raise_index(pack, v.grad)

    r = points[:, 0]
    radial_inverse = pack.inverse[:, :, 0]
    normal = radial_inverse / np.sqrt(pack.inverse[:, 0, 0])[:, None]
    if reference == "b":
        area = r ** (n - 1)
    else:
        angular = pack.metric[:, 1:, 1:]
        round_density = np.prod(np.diagonal(b_jet.value[:, 1:, 1:], axis1=1, axis2=2), axis=1) / (
            r ** (2 * (n - 1))
        )
        area = np.sqrt(np.linalg.det(angular) / round_density)

    bracket = (
        v.value * np.einsum("nj,nj->n", div_h - d_tr_h, normal)
        + tr_h * np.einsum("nj,nj->n", v.grad, normal)
        - np.einsum("nij,ni,nj->n", h.value, grad_v, normal)
    )
    return bracket * area


def mass_flux_integral(
    g: MetricSpec,
    V: ScalarField,
    r: float,
    quad: SphereQuadrature,
    *,
    reference: Reference = "b",
) -> float:
    """Sphere integral at radius r of V(div h - d tr h)(nu) + tr h dV(nu) - h(grad V, nu), h = g - b."""
    n = g.dimension
    if n != 3:
        return _reduced_dimension_value(
            n, r, V, g, lambda points: _flux_density(g, V, points, reference)
        )
    points, weights = _shell_nodes(n, r, quad)
    return quad.integrate(_flux_density(g, V, points, reference), weights)


def ricci_flux(
    g: MetricSpec,
    V: ScalarField,
    r: float,
    quad: SphereQuadrature,
) -> float:
    """Sphere integral of (Ric_g + (n-1) g)(grad_b V, nu_0) against the round measure of radius r."""
    n = g.dimension

    def density(points: np.ndarray) -> np.ndarray:
        pack = curvature_from_jet(points, g.jet(points, 2))
        b_inverse = np.linalg.inv(hyperbolic_metric(n).jet(points, 0).value)
        v = V.jet(points, 1)
        assert v.grad is not None
        grad_v = np.einsum("nij,nj->ni", b_inverse, v.grad)
        radius = points[:, 0]
        normal = np.zeros_like(points)
        normal[:, 0] = np.sqrt(1.0 + radius * radius)
        S = pack.traceless_ricci_shift()
        return np.einsum("nij,ni,nj->n", S, grad_v, normal) * radius ** (n - 1)

    if n != 3:
        return _reduced_dimension_value(n, r, V, g, density)
    points, weights = _shell_nodes(n, r, quad)
    return quad.integrate(density(points), weights)


def _initial_beta(g: MetricSpec) -> Tuple[float, float]:
    n = g.dimension
    q = g.decay_rate if g.decay_rate is not None else float(n)
    return 2.0 * q - n, 2.0 * n


def flux_report(
    g: MetricSpec,
    V: ScalarField,
    radii: Sequence[float],
    quad: SphereQuadrature,
    *,
    reference: Reference = "b",
    label: Optional[str] = None,
) -> FluxReport:
    values = [mass_flux_integral(g, V, float(r), quad, reference=reference) for r in radii]
    beta0, beta_max = _initial_beta(g)
    return extrapolate_limit(
        label or getattr(V, "label", "V"), radii, values, beta_initial=beta0, beta_max=beta_max
    )


def mass_vector(
    g: MetricSpec,
    radii: Sequence[float],
    quad: SphereQuadrature,
    *,
    reference: Reference = "b",
) -> MassVector:
    basis = StaticPotentialBasis(g.dimension)
    reports = tuple(
        flux_report(g, V, radii, quad, reference=reference, label=f"p_{k}")
        for k, V in enumerate(basis.chart_fields())
    )
    return MassVector(
        p=tuple(report.fitted_limit for report in reports), reports=reports, reference=reference
    )


@dataclass(frozen=True)
class RicciFluxCheck:
    """lim ricci_flux against -(n-2)/2 * H(V)."""

    ricci: FluxReport
    mass: FluxReport
    lhs: float
    rhs: float
    gap: float
    tolerance: float
    passed: bool

    def as_dict(self) -> Dict[str, Any]:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "ricci": self.ricci.as_dict(),
            "mass": self.mass.as_dict(),
        }


def ricci_flux_check(
    g: MetricSpec,
    V: ScalarField,
    radii: Sequence[float],
    quad: SphereQuadrature,
    *,
    tolerance: float = 1e-2,
    absolute_floor: float = 1e-8,
) -> RicciFluxCheck:
    n = g.dimension
    label = getattr(V, "label", "V")
    beta0, beta_max = _initial_beta(g)
    ricci_values = [ricci_flux(g, V, float(r), quad) for r in radii]
    ricci = extrapolate_limit(
        f"ricci[{label}]", radii, ricci_values, beta_initial=beta0, beta_max=beta_max
    )
    mass = flux_report(g, V, radii, quad, label=f"H[{label}]")
    lhs = ricci.fitted_limit
    rhs = -0.5 * (n - 2) * mass.fitted_limit
    gap = abs(lhs - rhs)
    passed = gap <= tolerance * max(abs(lhs), abs(rhs)) + absolute_floor
    return RicciFluxCheck(ricci, mass, lhs, rhs, gap, tolerance, passed)


@dataclass(frozen=True)
class PotentialStabilityCheck:
    """Flux limit of V_0 against V_0 + w for a bump w inside the innermost shell."""

    plain: FluxReport
    perturbed: FluxReport
    support: Tuple[float, float]
    gap: float
    tolerance: float
    passed: bool

    def as_dict(self) -> Dict[str, Any]:
        return {
            "support": list(self.support),
            "plain_limit": self.plain.fitted_limit,
            "perturbed_limit": self.perturbed.fitted_limit,
            "gap": self.gap,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def bumped_lapse(
    n: int,
    support: Tuple[float, float],
    *,
    amplitude: float = 1.0,
    angular: Optional[Sequence[float]] = None,
) -> SumScalarField:
    """V_0 + w with w = bump(r) * (c_0 + c . x_hat) supported in the annulus."""
    lo, hi = support
    if not 0.0 < lo < hi:
        raise DomainError("bump support must be an increasing pair of positive radii")
    coefficients = list(angular) if angular is not None else [1.0, 0.5] + [0.0] * (n - 1)
    bump = PolynomialBump(0.5 * (lo + hi), 0.5 * (hi - lo), amplitude)
    w = angular_modulated(n, bump, coefficients, label="w")
    return SumScalarField(n, (chart_potential(n, 0), w), label="V_0+w")


def potential_stability_check(
    g: MetricSpec,
    radii: Sequence[float],
    quad: SphereQuadrature,
    *,
    support: Optional[Tuple[float, float]] = None,
    tolerance: float = 1e-8,
    reference: Reference = "b",
) -> PotentialStabilityCheck:
    """The mass functional only sees V near infinity: a compact change of V_0 keeps the limit."""
    if g.dimension != 3:
        raise DomainError("potential stability needs the full angular quadrature (n = 3)")
    innermost = float(min(radii))
    lo, hi = support if support is not None else (0.5 * innermost, 0.9 * innermost)
    if hi >= innermost:
        raise DomainError(f"bump support must end inside the innermost shell r = {innermost:g}")
    plain = flux_report(g, chart_potential(3, 0), radii, quad, reference=reference, label="V_0")
    perturbed = flux_report(
        g, bumped_lapse(3, (lo, hi)), radii, quad, reference=reference, label="V_0+w"
    )
    gap = abs(perturbed.fitted_limit - plain.fitted_limit)
    passed = gap <= tolerance * max(abs(plain.fitted_limit), 1.0)
    return PotentialStabilityCheck(plain, perturbed, (lo, hi), gap, tolerance, passed)


def schwarzschild_mass(n: int, m: float) -> float:
    """p_0 of schwarzschild_ads(n, m): 2 (n - 1) |S^{n-1}| m, from the 1/r expansion of the flux."""
    return 2.0 * (n - 1) * sphere_area(n) * m
