import math

import numpy as np
import pytest

from core.errors import DomainError
from geometry.chart import ChartPoint
from geometry.metrics import hyperbolic_metric, schwarzschild_ads
from odelab.geodesics import (
    cartesian_form,
    fibonacci_directions,
    integrate_geodesic,
    integrate_geodesics,
    radial_seed,
    reversal_gap,
)


def test_hyperbolic_radial_rays_have_constant_arcsinh_offset() -> None:
    g = cartesian_form(hyperbolic_metric(3))
    directions = fibonacci_directions(6)
    sample = integrate_geodesics(g, 0.5 * directions, directions, 5.0)
    offsets = sample.arcsinh_offset()
    np.testing.assert_allclose(offsets, math.asinh(0.5), atol=1e-8)
    assert float(np.max(sample.drift)) < 1e-8
    # |gamma(t)| = sinh(t + asinh 0.5) stays within a fixed factor of e^t
    assert np.all(sample.comparability() < 2.0)


def test_geodesics_reverse_to_their_start() -> None:
    g = cartesian_form(hyperbolic_metric(3))
    start = np.array([0.4, -0.2, 0.3])
    assert reversal_gap(g, start, np.array([0.1, 1.0, -0.5]), 4.0) < 1e-6


def test_schwarzschild_geodesics_stay_unit_speed() -> None:
    g = schwarzschild_ads(3, 0.5)
    start, direction = radial_seed(3, 2.0, np.array([1.0, 0.2, 0.0]))
    sample = integrate_geodesics(cartesian_form(g), start, direction, 3.0)
    assert sample.coordinates == "cartesian"
    assert float(np.max(sample.drift)) < 1e-8
    assert np.all(np.diff(sample.radius()[0]) > 0.0)


def test_chart_start_matches_the_cartesian_ray() -> None:
    g = hyperbolic_metric(3)
    p = ChartPoint(1.0, (math.pi / 2, 0.0))
    sample = integrate_geodesic(g, p, np.array([1.0, 0.0, 0.0]), 2.0)
    end = sample.positions[0, -1]
    assert np.linalg.norm(end) == pytest.approx(math.sinh(math.asinh(1.0) + 2.0), rel=1e-8)
    np.testing.assert_allclose(end / np.linalg.norm(end), p.cartesian(), atol=1e-10)


def test_frames_stay_orthonormal_along_transport() -> None:
    g = cartesian_form(hyperbolic_metric(3))
    start = np.array([[0.5, 0.0, 0.0]])
    frame = np.array([[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]])
    sample = integrate_geodesics(g, start, np.array([[1.0, 0.0, 0.0]]), 2.0, frames=frame)
    assert sample.frames is not None
    last = sample.frames[0, -1]
    g_end = g.jet(sample.positions[0, -1][None, :], 0).value[0]
    np.testing.assert_allclose(last @ g_end @ last.T, np.eye(2), atol=1e-10)


def test_fibonacci_directions_are_unit_vectors() -> None:
    fan = fibonacci_directions(32)
    assert fan.shape == (32, 3)
    np.testing.assert_allclose(np.linalg.norm(fan, axis=1), 1.0)
    np.testing.assert_allclose(fan.mean(axis=0), 0.0, atol=0.05)
    other = fibonacci_directions(5, 4, seed=3)
    np.testing.assert_array_equal(other, fibonacci_directions(5, 4, seed=3))
    with pytest.raises(DomainError):
        fibonacci_directions(0)


def test_geodesic_input_errors() -> None:
    g = cartesian_form(hyperbolic_metric(3))
    with pytest.raises(DomainError):
        integrate_geodesics(g, np.ones((2, 3)), np.ones((1, 3)), 1.0)
    with pytest.raises(DomainError):
        integrate_geodesics(g, np.ones(3), np.ones(3), 0.0)
    with pytest.raises(DomainError):
        radial_seed(3, 1.0, np.array([1.0, 0.0]))
