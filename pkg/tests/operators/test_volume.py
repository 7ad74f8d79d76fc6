import math

import numpy as np
import pytest

from core.errors import DomainError
from geometry.metrics import hyperbolic_metric, schwarzschild_ads
from operators.fields import bump_pair_field, bump_scalar, static_potential_field
from operators.volume import VolumeQuadrature, duality_residual

SUPPORT = (2.0, 6.0)


def _quad() -> VolumeQuadrature:
    return VolumeQuadrature(SUPPORT[0], SUPPORT[1], radial_order=32, polar=12, azimuth=24)


def test_volume_of_a_hyperbolic_annulus() -> None:
    def antiderivative(r: float) -> float:
        return 0.5 * (r * math.sqrt(1.0 + r * r) - math.asinh(r))

    volume = _quad().integrate(hyperbolic_metric(3), lambda points, pack: np.ones(points.shape[0]))
    expected = 4.0 * math.pi * (antiderivative(6.0) - antiderivative(2.0))
    assert volume == pytest.approx(expected, rel=1e-10)


def test_nodes_and_bounds() -> None:
    quad = _quad()
    points, weights = quad.nodes()
    assert points.shape == (32 * 12 * 24, 3)
    assert np.all(weights > 0.0)
    assert quad.contains(SUPPORT) and not quad.contains((1.0, 4.0))
    with pytest.raises(DomainError):
        VolumeQuadrature(3.0, 2.0)
    with pytest.raises(DomainError):
        quad.integrate(hyperbolic_metric(4), lambda points, pack: np.ones(points.shape[0]))


@pytest.mark.parametrize("m", [0.0, 0.5])
def test_duality_between_the_operator_and_its_adjoint(m: float) -> None:
    g = schwarzschild_ads(3, m)
    b = hyperbolic_metric(3)
    h = bump_pair_field(3, b, SUPPORT, [1.0, 0.3, 0.0, 0.0], [0.2, 0.0, 0.0, 0.5])
    u = bump_scalar(3, SUPPORT, angular=[1.0, 0.0, -0.4, 0.0])
    report = duality_residual(g, h, u, _quad())
    assert report.scale > 0.0
    assert report.residual < 1e-6
    assert report.trace_identity is None


def test_duality_requires_compact_supports_inside_the_annulus() -> None:
    g = hyperbolic_metric(3)
    h = bump_pair_field(3, g, (1.0, 4.0), [1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0])
    u = bump_scalar(3, SUPPORT)
    with pytest.raises(DomainError):
        duality_residual(g, h, u, _quad())
    inside = bump_pair_field(3, g, SUPPORT, [1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0])
    with pytest.raises(DomainError):
        duality_residual(g, inside, static_potential_field(3, 0), _quad())


def test_trace_direction_reports_the_conformal_pairing() -> None:
    g = hyperbolic_metric(3)
    h = bump_pair_field(3, g, SUPPORT, [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0])
    u = bump_scalar(3, SUPPORT)
    report = duality_residual(g, h, u, _quad(), trace_direction=True)
    assert report.trace_identity is not None and math.isfinite(report.trace_identity)
