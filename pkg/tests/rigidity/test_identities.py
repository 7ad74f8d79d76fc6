import math

import numpy as np
import pytest

from core.errors import DomainError
from geometry.metrics import hyperbolic_metric, schwarzschild_ads
from geometry.potentials import SchwarzschildLapse, SeparableScalarField, chart_potential
from mass.quadrature import SphereQuadrature
from rigidity.identities import (
    classify_rho,
    divergence_form_check,
    gradient_geodesic,
    sectional_ode_check,
    wang_identity_check,
)

SPHERE = SphereQuadrature(8, 16)
M = 0.5


def _lapse(m: float) -> SeparableScalarField:
    return SeparableScalarField(3, SchwarzschildLapse(3, m), ("one", "one"), label="lapse")


def test_identity_vanishes_on_the_hyperbolic_ball() -> None:
    report = wang_identity_check(hyperbolic_metric(3), chart_potential(3, 0), 3.0, sphere=SPHERE)
    assert report.lhs == pytest.approx(0.0, abs=1e-9)
    assert report.relative_gap < 1e-8
    assert report.static
    assert report.region == (0.0, 3.0)


def test_identity_on_a_schwarzschild_annulus_matches_closed_form() -> None:
    r1, r2 = 2.0, 6.0
    report = wang_identity_check(
        schwarzschild_ads(3, M), _lapse(M), r2, r_inner=r1, sphere=SPHERE
    )
    # the lapse has Hess f - f g = f S with |S|^2 = 6 m^2 / r^6
    expected = 8.0 * math.pi * M**2 * (r1**-3 - r2**-3)
    assert report.lhs == pytest.approx(expected, rel=1e-8)
    assert report.rhs == pytest.approx(expected, rel=1e-6)
    assert report.static
    assert report.as_dict()["region"] == [r1, r2]


def test_identity_rejects_sign_changing_potentials_and_other_dimensions() -> None:
    with pytest.raises(DomainError):
        wang_identity_check(hyperbolic_metric(3), chart_potential(3, 1), 2.0, sphere=SPHERE)
    with pytest.raises(DomainError):
        wang_identity_check(hyperbolic_metric(4), chart_potential(4, 0), 2.0, sphere=SPHERE)


def test_pointwise_divergence_form_on_schwarzschild() -> None:
    check = divergence_form_check(schwarzschild_ads(3, M), _lapse(M), np.array([3.0, 1.1, 0.5]))
    f = math.sqrt(1.0 + 9.0 - 2.0 * M / 3.0)
    assert check.lhs == pytest.approx(f * 6.0 * M**2 / 3.0**6, rel=1e-8)
    assert check.residual < 1e-6 * abs(check.lhs)


@pytest.mark.parametrize(
    "rho, kind, C",
    [
        (np.tanh, "tanh-type", 1.0),
        (lambda t: 1.0 / np.tanh(t + 1.0), "coth-type", -math.exp(2.0)),
    ],
)
def test_rho_classification_recovers_the_constant(rho, kind: str, C: float) -> None:
    t = np.linspace(0.0, 4.0, 81)
    result = classify_rho(t, rho(t))
    assert result.kind == kind
    assert result.C == pytest.approx(C, rel=1e-9)
    assert result.residual < 1e-10


def test_rho_classification_constant_and_indeterminate() -> None:
    t = np.linspace(0.0, 1.0, 11)
    assert classify_rho(t, np.ones_like(t)).kind == "constant"
    assert classify_rho(t, np.linspace(0.5, 1.5, 11)).kind == "indeterminate"


def test_sectional_odes_along_the_hyperbolic_gradient_line() -> None:
    g = hyperbolic_metric(3)
    f = chart_potential(3, 0)
    sample = gradient_geodesic(g, f, np.array([1.0, 1.1, 0.5]), 2.0)
    report = sectional_ode_check(g, f, sample)
    assert report.rho_residual < 1e-6
    assert report.curvature_residual < 1e-6
    assert report.mixed_residual < 1e-9
    assert report.hessian_residual < 1e-9
    assert report.rho.kind == "coth-type"
    assert report.exponential_fit.residual < 1e-8


def test_sectional_check_needs_five_samples() -> None:
    g = hyperbolic_metric(3)
    sample = gradient_geodesic(g, chart_potential(3, 0), np.array([1.0, 1.1, 0.5]), 0.05)
    with pytest.raises(DomainError):
        sectional_ode_check(g, chart_potential(3, 0), sample)
