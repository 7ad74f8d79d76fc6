import numpy as np
import pytest

from core.errors import DomainError
from geometry.chart import random_chart_points, spherical_to_cartesian
from geometry.frame import frame_components
from geometry.potentials import StaticPotentialBasis
from geometry.tensor_fields import (
    PatternTensorField,
    RotatedScalarField,
    RotatedTensorField,
    SumTensorField,
    TabulatedTensorField,
    ZeroTensorField,
    as_rotation_tuple,
    radial_frame_perturbation,
)

QUARTER_TURN = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


def _points(seed: int, count: int = 6) -> np.ndarray:
    return random_chart_points(np.random.default_rng(seed), 3, count, r_range=(1.5, 6.0))


def test_radial_frame_perturbation_has_one_frame_entry() -> None:
    Y = _points(21)
    h = radial_frame_perturbation(3, amplitude=0.1, exponent=2.5, angular=[1.0, 0.3, 0.0, 0.0])
    kappa = frame_components(h.jet(Y, 0).value, Y)
    X = spherical_to_cartesian(Y)
    r = Y[:, 0]
    expected = 0.1 * r**-2.5 * (1.0 + 0.3 * X[:, 0] / r)
    np.testing.assert_allclose(kappa[:, 0, 0], expected, rtol=1e-12)
    off = kappa.copy()
    off[:, 0, 0] = 0.0
    assert np.max(np.abs(off)) < 1e-15
    assert h.decay_rate == 2.5


def test_scaled_field_jet_matches_finite_differences() -> None:
    Y = _points(22, 4)
    h = radial_frame_perturbation(3, amplitude=0.2, exponent=2.0)
    analytic = h.jet(Y)
    numeric = TabulatedTensorField(3, lambda p: h.jet(p, 0).value).jet(Y)
    np.testing.assert_allclose(numeric.grad, analytic.grad, atol=1e-7)
    np.testing.assert_allclose(numeric.hess, analytic.hess, atol=1e-4)


def test_pattern_must_be_symmetric_and_square() -> None:
    with pytest.raises(DomainError):
        PatternTensorField(2, ((0.0, 1.0), (0.0, 0.0)))
    with pytest.raises(DomainError):
        PatternTensorField(3, ((1.0, 0.0), (0.0, 1.0)))


def test_sum_of_fields_adds_jets_and_reports_mode() -> None:
    Y = _points(23, 3)
    rr = PatternTensorField.radial_radial(3)
    total = SumTensorField(3, (rr, rr, ZeroTensorField(3)))
    assert total.derivative_mode == "analytic"
    np.testing.assert_allclose(total.jet(Y).value[:, 0, 0], 2.0)
    tabulated = TabulatedTensorField(3, lambda p: rr.jet(p, 0).value)
    assert SumTensorField(3, (rr, tabulated)).derivative_mode == "finite_difference"


def test_identity_rotation_leaves_a_field_unchanged() -> None:
    Y = _points(24, 4)
    h = radial_frame_perturbation(3, amplitude=0.1, exponent=2.5, angular=[1.0, 0.3, 0.0, 0.0])
    rotated = RotatedTensorField(h, as_rotation_tuple(np.eye(3)))
    np.testing.assert_allclose(rotated.jet(Y, 0).value, h.jet(Y, 0).value, rtol=1e-10, atol=1e-12)
    assert rotated.decay_rate == 2.5


def test_rotated_scalar_moves_one_potential_onto_another() -> None:
    Y = _points(25, 5)
    basis = StaticPotentialBasis(3)
    rotated = RotatedScalarField(basis.chart(1), as_rotation_tuple(QUARTER_TURN))
    np.testing.assert_allclose(
        rotated.jet(Y, 0).value, basis.chart(2).jet(Y, 0).value, rtol=1e-10, atol=1e-12
    )


def test_reflections_are_not_rotations() -> None:
    reflection = np.diag([1.0, 1.0, -1.0])
    field = RotatedTensorField(PatternTensorField.radial_radial(3), as_rotation_tuple(reflection))
    with pytest.raises(DomainError):
        field.jet(_points(26, 1), 0)
