import pytest

from core.errors import DomainError
from core.schema import default_radii
from geometry.metrics import hyperbolic_metric, schwarzschild_ads
from mass.quadrature import SphereQuadrature
from operators.fields import SymmetricField, bump_pair_field, bump_scalar, static_potential_field
from operators.functional import (
    first_variation_check,
    flux_form_check,
    functional_F,
    functional_F_flux_form,
)
from operators.volume import VolumeQuadrature

SPHERE = SphereQuadrature(8, 16)


def _quad(lo: float = 2.0, hi: float = 6.0) -> VolumeQuadrature:
    return VolumeQuadrature(lo, hi, radial_order=24, polar=8, azimuth=16)


def test_functional_vanishes_at_the_background() -> None:
    b = hyperbolic_metric(3)
    value = functional_F(b, static_potential_field(3, 0), b, _quad())
    assert abs(value.value) < 1e-8
    assert value.tail is None and value.error == 0.0


def test_functional_needs_a_growing_potential() -> None:
    b = hyperbolic_metric(3)
    with pytest.raises(DomainError):
        functional_F(b, bump_scalar(3, (2.0, 6.0)), b, _quad())


def test_first_variation_converges_at_first_order() -> None:
    b = hyperbolic_metric(3)
    h = bump_pair_field(3, b, (3.0, 5.0), [1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0])
    report = first_variation_check(b, static_potential_field(3, 0), h, _quad())
    assert report.passed
    assert report.status in {"exact", "converging"}
    if report.status == "converging":
        assert report.order is not None and report.order >= 0.9
        assert report.richardson is not None


def test_first_variation_needs_h_inside_the_annulus() -> None:
    b = hyperbolic_metric(3)
    h = bump_pair_field(3, b, (5.0, 9.0), [1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0])
    with pytest.raises(DomainError):
        first_variation_check(b, static_potential_field(3, 0), h, _quad())
    with pytest.raises(DomainError):
        first_variation_check(
            b, static_potential_field(3, 0), SymmetricField(h.field), _quad(), epsilons=[1e-2]
        )


def test_flux_form_identity_on_an_annulus() -> None:
    gamma = schwarzschild_ads(3, 0.5)
    report = flux_form_check(
        gamma, static_potential_field(3, 0), 2.0, 10.0, radial_order=48, sphere=SPHERE
    )
    assert report.scale > 0.0
    assert report.relative_gap < 1e-6


def test_flux_form_is_three_dimensional() -> None:
    with pytest.raises(DomainError):
        flux_form_check(schwarzschild_ads(4, 0.5), static_potential_field(4, 0), 2.0, 10.0)


def test_flux_form_of_the_background_is_zero() -> None:
    b = hyperbolic_metric(3)
    f = static_potential_field(3, 0)
    value = functional_F_flux_form(b, f, _quad(), default_radii(), SPHERE)
    assert abs(value.value) < 1e-8
