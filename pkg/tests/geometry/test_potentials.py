import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import DomainError
from geometry.chart import random_chart_points, spherical_to_cartesian
from geometry.jets import finite_difference_jet
from geometry.metrics import hyperbolic_metric
from geometry.potentials import (
    CartesianRadialField,
    DecayingTail,
    HorosphericalPotential,
    HyperbolicDecayingRadial,
    PolynomialBump,
    StaticPotentialBasis,
    angular_modulated,
    sphere_area,
)
from tensors.calculus import hessian, laplacian


@settings(max_examples=20, deadline=None)
@given(
    n=st.integers(min_value=3, max_value=5),
    seed=st.integers(min_value=0, max_value=2**31 - 1),
)
def test_chart_potentials_are_static_on_the_background(n: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    Y = random_chart_points(rng, n, 5, r_range=(0.3, 10.0))
    b = hyperbolic_metric(n)
    basis = StaticPotentialBasis(n)
    g_values = b.jet(Y, 0).value
    for k, V in enumerate(basis.chart_fields()):
        value = V.jet(Y, 0).value
        H = hessian(b, V, Y)
        scale = 1.0 + np.max(np.abs(value))
        assert np.max(np.abs(H - value[:, None, None] * g_values)) / scale < 1e-8, k


def test_chart_potentials_agree_with_the_closed_form() -> None:
    rng = np.random.default_rng(11)
    Y = random_chart_points(rng, 4, 12, r_range=(0.1, 40.0))
    X = spherical_to_cartesian(Y)
    basis = StaticPotentialBasis(4)
    for k in range(5):
        np.testing.assert_allclose(
            basis.chart(k).jet(Y, 0).value,
            StaticPotentialBasis.closed_form(k, X),
            rtol=1e-12,
            atol=1e-12,
        )


def test_cartesian_potentials_have_the_static_laplacian() -> None:
    rng = np.random.default_rng(12)
    X = rng.uniform(-3.0, 3.0, size=(8, 3))
    view = hyperbolic_metric(3).cartesian_view()
    for k, V in enumerate(StaticPotentialBasis(3).cartesian_fields()):
        np.testing.assert_allclose(laplacian(view, V, X), 3.0 * V.jet(X, 0).value, atol=1e-9)


def test_horospherical_potential_matches_the_difference_and_stays_positive() -> None:
    X = np.array([[1e6, 0.0, 0.0], [2.0, -1.0, 0.5]])
    field = HorosphericalPotential(3)
    value = field.jet(X, 0).value
    assert np.all(value > 0.0)
    assert value[0] == pytest.approx(0.5e-6, rel=1e-6)
    direct = np.sqrt(1.0 + np.sum(X[1] ** 2)) - X[1, 0]
    assert value[1] == pytest.approx(direct, rel=1e-12)


def test_decaying_radial_solution_solves_the_static_equation() -> None:
    X = np.array([[1.0, 0.5, -0.3], [4.0, 2.0, 1.0], [0.2, 0.1, 0.1]])
    view = hyperbolic_metric(3).cartesian_view()
    u = CartesianRadialField(3, HyperbolicDecayingRadial())
    values = u.jet(X, 0).value
    np.testing.assert_allclose(laplacian(view, u, X), 3.0 * values, rtol=1e-8)


def test_cartesian_radial_field_rejects_the_origin() -> None:
    with pytest.raises(DomainError):
        CartesianRadialField(3, DecayingTail(1.0, 2.0)).jet(np.zeros((1, 3)))


@pytest.mark.parametrize(
    "radial",
    [DecayingTail(0.3, 2.5), PolynomialBump(4.0, 2.0, 0.7, 4)],
)
def test_radial_derivatives_match_finite_differences(radial) -> None:
    r = np.linspace(2.5, 5.5, 13)
    v, dv, ddv = radial.evaluate(r)
    _, grad, hess = finite_difference_jet(
        lambda p: radial.evaluate(p[:, 0])[0], r[:, None], order=2
    )
    np.testing.assert_allclose(grad[:, 0], dv, atol=1e-7)
    np.testing.assert_allclose(hess[:, 0, 0], ddv, atol=1e-3)


def test_bump_vanishes_outside_its_support() -> None:
    bump = PolynomialBump(4.0, 1.0)
    v, dv, ddv = bump.evaluate(np.array([2.9, 3.0, 5.0, 5.1]))
    assert np.all(v == 0.0) and np.all(dv == 0.0) and np.all(ddv == 0.0)
    assert bump.support == (3.0, 5.0)
    with pytest.raises(DomainError):
        PolynomialBump(4.0, 1.0, power=2)


def test_angular_modulation_reproduces_linear_combinations() -> None:
    rng = np.random.default_rng(13)
    Y = random_chart_points(rng, 3, 6, r_range=(1.0, 4.0))
    X = spherical_to_cartesian(Y)
    field = angular_modulated(3, DecayingTail(1.0, 0.0), [0.5, 1.0, -2.0, 0.25])
    expected = 0.5 + (X @ np.array([1.0, -2.0, 0.25])) / Y[:, 0]
    np.testing.assert_allclose(field.jet(Y, 0).value, expected, rtol=1e-12)
    with pytest.raises(DomainError):
        angular_modulated(3, DecayingTail(1.0, 0.0), [1.0])


def test_sphere_area() -> None:
    assert sphere_area(3) == pytest.approx(4.0 * math.pi)
    assert sphere_area(2) == pytest.approx(2.0 * math.pi)
    assert sphere_area(4) == pytest.approx(2.0 * math.pi**2)
