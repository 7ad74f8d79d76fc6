import numpy as np

from geometry.chart import random_chart_points
from geometry.metrics import hyperbolic_metric, schwarzschild_ads
from geometry.potentials import StaticPotentialBasis
from geometry.tensor_fields import MetricTensorField
from tensors.calculus import (
    divergence,
    gradient,
    hessian,
    laplacian,
    norm_squared,
    second_covariant_derivative,
    trace,
)
from tensors.curvature import curvature_at


def _points(seed: int, count: int = 6) -> np.ndarray:
    return random_chart_points(np.random.default_rng(seed), 3, count, r_range=(2.0, 12.0))


def test_metric_is_parallel() -> None:
    g = schwarzschild_ads(3, 0.4)
    Y = _points(51)
    field = MetricTensorField(g)
    assert np.max(np.abs(divergence(g, field, Y))) < 1e-10
    D2 = second_covariant_derivative(g, field, Y)
    scale = np.max(np.abs(g.jet(Y, 0).value))
    assert np.max(np.abs(D2)) / scale < 1e-9


def test_trace_and_norm_of_the_metric_are_the_dimension() -> None:
    g = hyperbolic_metric(3)
    Y = _points(52)
    np.testing.assert_allclose(trace(g, MetricTensorField(g), Y), 3.0)
    pack = curvature_at(g, Y)
    np.testing.assert_allclose(norm_squared(pack, pack.metric), 3.0, rtol=1e-12)


def test_gradient_of_the_radial_potential() -> None:
    Y = _points(53)
    r = Y[:, 0]
    grad = gradient(hyperbolic_metric(3), StaticPotentialBasis(3).chart(0), Y)
    np.testing.assert_allclose(grad[:, 0], r * np.sqrt(1.0 + r * r), rtol=1e-12)
    np.testing.assert_allclose(grad[:, 1:], 0.0, atol=1e-12)


def test_hessian_is_symmetric_and_traces_to_the_laplacian() -> None:
    g = schwarzschild_ads(3, 0.5)
    Y = _points(54)
    V = StaticPotentialBasis(3).chart(2)
    pack = curvature_at(g, Y)
    H = hessian(g, V, Y, pack)
    np.testing.assert_allclose(H, np.swapaxes(H, 1, 2), atol=0.0)
    np.testing.assert_allclose(
        laplacian(g, V, Y, pack), np.einsum("nij,nij->n", pack.inverse, H), rtol=1e-13
    )
