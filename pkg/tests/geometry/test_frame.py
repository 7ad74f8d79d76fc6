import numpy as np

from geometry.chart import ChartPoint, random_chart_points
from geometry.frame import frame_at, frame_components, frame_vector_components
from geometry.metrics import hyperbolic_metric, schwarzschild_ads


def test_frame_is_orthonormal_for_the_background() -> None:
    Y = random_chart_points(np.random.default_rng(31), 4, 10, r_range=(0.2, 80.0))
    b = hyperbolic_metric(4).jet(Y, 0).value
    expected = np.broadcast_to(np.eye(4), b.shape)
    np.testing.assert_allclose(frame_components(b, Y), expected, atol=1e-12)


def test_frame_at_reports_both_metrics() -> None:
    point = ChartPoint(r=3.0, angles=(1.0, 2.0))
    frame = frame_at(point, schwarzschild_ads(3, 0.5))
    assert frame.orthonormality_error() < 1e-13
    assert not np.allclose(frame.g_values, frame.b_values)
    assert np.allclose(frame_at(point).g_values, frame_at(point).b_values)


def test_radial_covector_component() -> None:
    Y = np.array([[2.0, 1.0, 0.5]])
    omega = np.array([[1.0, 0.0, 0.0]])
    np.testing.assert_allclose(frame_vector_components(omega, Y), [[np.sqrt(5.0), 0.0, 0.0]])
