from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from asymptotics.decay import DecayFit, fit_power_law
from core.errors import DomainError, NumericalFailure
from geometry.metrics import MetricSpec, PerturbedMetric, hyperbolic_metric
from geometry.potentials import ConstantField
from geometry.tensor_fields import ScaledTensorField
from mass.flux import mass_flux_integral, mass_vector
from mass.quadrature import SphereQuadrature, pairwise_sum
from operators.fields import PotentialField, SymmetricField
from operators.linearized import adjoint_from_jet, linearized_scalar_from_jet
from operators.volume import Density, VolumeQuadrature
from tensors.calculus import dot
from tensors.curvature import CurvaturePack, curvature_from_jet

DEFAULT_EPSILONS = (2e-2, 1e-2, 5e-3, 2.5e-3)
TAIL_ZERO_TOLERANCE = 1e-14


def _require_growth(f: PotentialField) -> None:
    if f.tag != "linear_growth":
        raise DomainError(f"{f.label} must carry the linear-growth tag")


def _functional_density(g: MetricSpec, f: PotentialField, gamma: MetricSpec) -> Density:
    """[L_g(gamma - b) - (R(gamma) + n(n-1))] f - (gamma - b) . L_g* f at chart points."""
    n = g.dimension
    background = hyperbolic_metric(n)

    def density(points: np.ndarray, pack: CurvaturePack) -> np.ndarray:
        gamma_jet = gamma.jet(points, 2)
        e = gamma_jet - background.jet(points, 2)
        scalar = curvature_from_jet(points, gamma_jet).scalar
        f_jet = f.jet(points, 2)
        first = (linearized_scalar_from_jet(pack, e) - (scalar + n * (n - 1))) * f_jet.value
        return first - dot(pack, e.value, adjoint_from_jet(pack, f_jet))

    return density


def _shell_density(g: MetricSpec, density: Density, radius: float, sphere: SphereQuadrature) -> float:
    """Integral of density dmu_g over the coordinate sphere r = radius, per unit dr."""
    angles, weights = sphere.nodes()
    points = np.empty((angles.shape[0], 3))
    points[:, 0] = radius
    points[:, 1:] = angles
    pack = curvature_from_jet(points, g.jet(points, 2))
    volume = np.sqrt(np.linalg.det(pack.metric))
    coordinate = weights / np.sin(angles[:, 0])
    return pairwise_sum(density(points, pack) * volume * coordinate)


@dataclass(frozen=True)
class TailEstimate:
    value: float
    error: float
    fit: DecayFit

    def as_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "error": self.error, "fit": self.fit.as_dict()}


def tail_estimate(
    g: MetricSpec,
    density: Density,
    r_outer: float,
    radii: Sequence[float],
    sphere: SphereQuadrature,
) -> TailEstimate:
    """Integral beyond r_outer from a power-law fit c r^-beta of the shell density."""
    samples = [_shell_density(g, density, float(r), sphere) for r in radii]
    scale = max((abs(value) for value in samples), default=0.0)
    fit = fit_power_law(radii, samples, zero_tolerance=TAIL_ZERO_TOLERANCE * max(1.0, scale))
    if fit.exact_zero:
        return TailEstimate(0.0, 0.0, fit)
    beta = float(fit.fitted_exponent or 0.0)
    if beta <= 1.0:
        raise NumericalFailure(f"divergent tail: shell density decays like r^-{beta:.3g}")
    assert fit.amplitude is not None
    sign = math.copysign(1.0, samples[-1])
    value = sign * fit.amplitude * r_outer ** (1.0 - beta) / (beta - 1.0)
    return TailEstimate(value, abs(value) * max(fit.fit_residual, 0.05), fit)


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    volume: float
    tail: Optional[TailEstimate]

    @property
    def error(self) -> float:
        return 0.0 if self.tail is None else self.tail.error

    def as_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "volume": self.volume,
            "error": self.error,
            "tail": None if self.tail is None else self.tail.as_dict(),
        }


def functional_F(
    g: MetricSpec,
    f: PotentialField,
    gamma: MetricSpec,
    quad: VolumeQuadrature,
    radii: Optional[Sequence[float]] = None,
) -> FunctionalValue:
    """F(gamma) over the quadrature annulus plus a fitted tail when radii are given."""
    _require_growth(f)
    if gamma.dimension != g.dimension:
        raise DomainError("gamma and g must share the dimension")
    density = _functional_density(g, f, gamma)
    volume = quad.integrate(g, density)
    tail = None
    if radii is not None:
        sphere = SphereQuadrature(quad.polar, quad.azimuth)
        tail = tail_estimate(g, density, quad.r_outer, radii, sphere)
    return FunctionalValue(volume + (tail.value if tail else 0.0), volume, tail)


def functional_F_flux_form(
    gamma: MetricSpec,
    f: PotentialField,
    quad: VolumeQuadrature,
    mass_radii: Sequence[float],
    sphere: SphereQuadrature,
    tail_radii: Optional[Sequence[float]] = None,
) -> FunctionalValue:
    """a_0 p_0 - sum a_i p_i - int (R(gamma) + n(n-1)) f dmu_b."""
    _require_growth(f)
    assert f.coefficients is not None
    n = gamma.dimension
    background = hyperbolic_metric(n)

    def density(points: np.ndarray, pack: CurvaturePack) -> np.ndarray:
        scalar = curvature_from_jet(points, gamma.jet(points, 2)).scalar
        return (scalar + n * (n - 1)) * f.jet(points, 0).value

    p = mass_vector(gamma, mass_radii, sphere).p
    a = f.coefficients
    pairing = a[0] * p[0] - sum(a[i] * p[i] for i in range(1, n + 1))
    volume = quad.integrate(background, density)
    tail = None
    if tail_radii is not None:
        tail = tail_estimate(background, density, quad.r_outer, tail_radii, sphere)
    total = volume + (tail.value if tail else 0.0)
    return FunctionalValue(pairing - total, -total, tail)


@dataclass(frozen=True)
class FirstVariationReport:
    epsilons: Tuple[float, ...]
    quotients: Tuple[float, ...]
    target: float
    errors: Tuple[float, ...]
    order: Optional[float]
    richardson: Optional[float]
    status: str
    min_order: float

    @property
    def passed(self) -> bool:
        if self.status == "exact":
            return True
        return self.order is not None and self.order >= self.min_order

    def as_dict(self) -> Dict[str, Any]:
        return {
            "epsilons": list(self.epsilons),
            "quotients": list(self.quotients),
            "target": self.target,
            "errors": list(self.errors),
            "order": self.order,
            "richardson": self.richardson,
            "status": self.status,
            "min_order": self.min_order,
            "passed": self.passed,
        }


def first_variation_check(
    g: MetricSpec,
    f: PotentialField,
    h: SymmetricField,
    quad: VolumeQuadrature,
    *,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    min_order: float = 0.9,
    exact_tolerance: float = 1e-13,
) -> FirstVariationReport:
    """(F(g + eps h) - F(g)) / eps against -int h . L_g* f; contributions outside supp h cancel."""
    _require_growth(f)
    if h.support is None or not quad.contains(h.support):
        raise DomainError("h must be compactly supported inside the quadrature annulus")
    eps = sorted((float(value) for value in epsilons), reverse=True)
    if len(eps) < 2 or eps[-1] <= 0.0:
        raise DomainError("first variation needs at least two positive step sizes")
    n = g.dimension

    def target_density(points: np.ndarray, pack: CurvaturePack) -> np.ndarray:
        return -dot(pack, h.jet(points, 0).value, adjoint_from_jet(pack, f.jet(points, 2)))

    target = quad.integrate(g, target_density)
    base = quad.integrate(g, _functional_density(g, f, g))

    quotients: List[float] = []
    for value in eps:
        step = ScaledTensorField(ConstantField(n, value), h.field, label=f"{value:g}*h")
        gamma = PerturbedMetric(g, step)
        quotients.append((quad.integrate(g, _functional_density(g, f, gamma)) - base) / value)

    errors = [abs(q - target) for q in quotients]
    floor = exact_tolerance * max(1.0, abs(target), max(abs(q) for q in quotients))
    if all(err <= floor for err in errors):
        return FirstVariationReport(
            tuple(eps), tuple(quotients), target, tuple(errors), None, None, "exact", min_order
        )
    usable = [(e, err) for e, err in zip(eps, errors) if err > floor]
    order: Optional[float] = None
    if len(usable) >= 2:
        x = np.log([e for e, _ in usable])
        y = np.log([err for _, err in usable])
        order = float(np.polyfit(x, y, 1)[0])
    richardson = None
    if len(eps) >= 2 and math.isclose(eps[-2], 2.0 * eps[-1], rel_tol=1e-9):
        richardson = 2.0 * quotients[-1] - quotients[-2]
    return FirstVariationReport(
        tuple(eps),
        tuple(quotients),
        target,
        tuple(errors),
        order,
        richardson,
        "converging",
        min_order,
    )


@dataclass(frozen=True)
class FluxFormReport:
    volume: float
    boundary: float
    inner_flux: float
    outer_flux: float
    gap: float
    scale: float

    @property
    def relative_gap(self) -> float:
        return 0.0 if self.scale == 0.0 else self.gap / self.scale

    def as_dict(self) -> Dict[str, Any]:
        return {
            "volume": self.volume,
            "boundary": self.boundary,
            "inner_flux": self.inner_flux,
            "outer_flux": self.outer_flux,
            "gap": self.gap,
            "relative_gap": self.relative_gap,
        }


def flux_form_check(
    gamma: MetricSpec,
    f: PotentialField,
    r1: float,
    r2: float,
    *,
    radial_order: int = 64,
    sphere: Optional[SphereQuadrature] = None,
) -> FluxFormReport:
    """int_{r1<r<r2} (f L_b e - e . L_b* f) dmu_b against Phi(r2) - Phi(r1), e = gamma - b."""
    if gamma.dimension != 3:
        raise DomainError("the annulus identity is evaluated for n = 3 only")
    rule = sphere or SphereQuadrature()
    quad = VolumeQuadrature(r1, r2, radial_order, rule.polar, rule.azimuth)
    background = hyperbolic_metric(gamma.dimension)

    def density(points: np.ndarray, pack: CurvaturePack) -> np.ndarray:
        e = gamma.jet(points, 2) - background.jet(points, 2)
        f_jet = f.jet(points, 2)
        return f_jet.value * linearized_scalar_from_jet(pack, e) - dot(
            pack, e.value, adjoint_from_jet(pack, f_jet)
        )

    volume = quad.integrate(background, density)
    inner = mass_flux_integral(gamma, f, r1, rule)
    outer = mass_flux_integral(gamma, f, r2, rule)
    boundary = outer - inner
    return FluxFormReport(
        volume=volume,
        boundary=boundary,
        inner_flux=inner,
        outer_flux=outer,
        gap=abs(volume - boundary),
        scale=max(abs(volume), abs(inner), abs(outer)),
    )
