import math

import numpy as np
import pytest

from core.errors import DomainError
from core.schema import default_radii
from geometry.metrics import PerturbedMetric, hyperbolic_metric, schwarzschild_ads
from geometry.potentials import StaticPotentialBasis
from geometry.tensor_fields import (
    RotatedTensorField,
    as_rotation_tuple,
    radial_frame_perturbation,
)
from mass.flux import (
    bumped_lapse,
    flux_report,
    mass_flux_integral,
    mass_vector,
    potential_stability_check,
    ricci_flux_check,
    schwarzschild_mass,
)
from mass.quadrature import SphereQuadrature

QUAD = SphereQuadrature(8, 16)


def test_background_has_zero_mass() -> None:
    vector = mass_vector(hyperbolic_metric(3), default_radii(), QUAD)
    assert vector.p == (0.0, 0.0, 0.0, 0.0)
    assert all(report.status == "exact" for report in vector.reports)
    assert vector.defect == 0.0


def test_schwarzschild_mass_is_sixteen_pi_m() -> None:
    m = 0.5
    vector = mass_vector(schwarzschild_ads(3, m), default_radii(), QUAD)
    assert schwarzschild_mass(3, m) == pytest.approx(16.0 * math.pi * m)
    assert vector.p[0] == pytest.approx(16.0 * math.pi * m, rel=1e-2)
    assert max(abs(value) for value in vector.p[1:]) < 1e-6
    assert vector.defect > 0.0


def test_flux_at_a_large_radius_approaches_the_limit() -> None:
    g = schwarzschild_ads(3, 0.25)
    V0 = StaticPotentialBasis(3).chart(0)
    value = mass_flux_integral(g, V0, 200.0, QUAD)
    assert value == pytest.approx(schwarzschild_mass(3, 0.25), rel=1e-2)


def test_higher_dimensions_use_the_rotational_reduction() -> None:
    g = schwarzschild_ads(4, 0.3)
    vector = mass_vector(g, default_radii(), QUAD)
    assert vector.p[0] == pytest.approx(schwarzschild_mass(4, 0.3), rel=1e-2)
    assert vector.p[1:] == (0.0, 0.0, 0.0, 0.0)


def test_higher_dimensions_reject_general_metrics() -> None:
    h = radial_frame_perturbation(4, amplitude=0.1, exponent=3.0)
    g = PerturbedMetric(hyperbolic_metric(4), h)
    with pytest.raises(DomainError):
        mass_vector(g, default_radii(), QUAD)


def test_ricci_flux_agrees_with_the_mass_flux() -> None:
    g = schwarzschild_ads(3, 0.5)
    check = ricci_flux_check(g, StaticPotentialBasis(3).chart(0), default_radii(), QUAD)
    assert check.passed
    assert check.rhs == pytest.approx(-0.5 * schwarzschild_mass(3, 0.5), rel=1e-2)


def test_reference_choice_does_not_change_the_mass() -> None:
    g = schwarzschild_ads(3, 0.5)
    background = mass_vector(g, default_radii(), QUAD, reference="b")
    own = mass_vector(g, default_radii(), QUAD, reference="g")
    assert own.reference == "g"
    assert own.p[0] == pytest.approx(background.p[0], rel=1e-2)


def test_rotating_an_anisotropic_perturbation_rotates_the_mass_vector() -> None:
    h = radial_frame_perturbation(3, amplitude=0.2, exponent=3.0, angular=[1.0, 0.5, 0.0, 0.0])
    quarter = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    b = hyperbolic_metric(3)
    plain = mass_vector(PerturbedMetric(b, h), default_radii(), QUAD)
    turned = mass_vector(
        PerturbedMetric(b, RotatedTensorField(h, as_rotation_tuple(quarter))), default_radii(), QUAD
    )
    spatial = np.array(plain.p[1:])
    assert abs(spatial[0]) > 1e-3
    tolerance = 2e-2 * max(abs(plain.p[0]), float(np.max(np.abs(spatial))))
    assert turned.p[0] == pytest.approx(plain.p[0], abs=tolerance)
    np.testing.assert_allclose(turned.p[1:], quarter @ spatial, atol=tolerance)


def test_p0_is_linear_in_m() -> None:
    masses = np.array([0.25, 0.5, 1.0])
    V0 = StaticPotentialBasis(3).chart(0)
    p0 = [
        flux_report(schwarzschild_ads(3, m), V0, default_radii(), QUAD).fitted_limit
        for m in masses
    ]
    slope, intercept = np.polyfit(masses, p0, 1)
    assert slope == pytest.approx(16.0 * math.pi, rel=1e-2)
    assert abs(intercept) < 1e-2 * slope


@pytest.mark.parametrize("k", [0, 1])
def test_doubling_the_angular_nodes_leaves_the_flux_unchanged(k: int) -> None:
    g = schwarzschild_ads(3, 0.5)
    V = StaticPotentialBasis(3).chart(k)
    coarse = mass_flux_integral(g, V, 50.0, QUAD)
    fine = mass_flux_integral(g, V, 50.0, QUAD.refined())
    assert abs(fine - coarse) < 1e-8


def test_compact_change_of_the_lapse_keeps_the_mass() -> None:
    g = schwarzschild_ads(3, 0.5)
    check = potential_stability_check(g, default_radii(), QUAD)
    assert check.passed
    assert check.gap < 1e-12
    assert check.support == pytest.approx((10.0, 18.0))
    assert check.plain.fitted_limit == pytest.approx(schwarzschild_mass(3, 0.5), rel=1e-2)
    # inside the support the flux does see w
    W = bumped_lapse(3, check.support)
    V0 = StaticPotentialBasis(3).chart(0)
    assert abs(mass_flux_integral(g, W, 14.0, QUAD) - mass_flux_integral(g, V0, 14.0, QUAD)) > 1e-6


def test_potential_stability_rejects_a_bump_reaching_the_ladder() -> None:
    with pytest.raises(DomainError):
        potential_stability_check(
            schwarzschild_ads(3, 0.5), default_radii(), QUAD, support=(15.0, 25.0)
        )
    with pytest.raises(DomainError):
        potential_stability_check(schwarzschild_ads(4, 0.5), default_radii(), QUAD)
