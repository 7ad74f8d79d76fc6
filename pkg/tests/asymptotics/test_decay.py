import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymptotics.decay import check_ladder, estimate_decay_rate, fit_power_law
from core.errors import DomainError, NumericalFailure
from core.schema import default_radii
from geometry.potentials import DecayingTail, SeparableScalarField

LADDER = [10.0, 20.0, 40.0, 80.0, 160.0]


@settings(max_examples=50, deadline=None)
@given(
    exponent=st.floats(min_value=0.5, max_value=6.0),
    amplitude=st.floats(min_value=1e-3, max_value=1e3),
)
def test_pure_power_laws_are_recovered(exponent: float, amplitude: float) -> None:
    r = np.asarray(LADDER)
    fit = fit_power_law(r, amplitude * r**-exponent)
    assert fit.status == "fit"
    assert fit.fitted_exponent == pytest.approx(exponent, abs=1e-9)
    assert fit.amplitude == pytest.approx(amplitude, rel=1e-8)
    assert fit.fit_residual < 1e-10
    assert fit.decays_at_least(exponent - 0.1)


def test_identically_zero_samples_are_exact() -> None:
    fit = fit_power_law(LADDER, [0.0] * 5)
    assert fit.exact_zero
    assert fit.decays_at_least(100.0)
    assert fit.as_dict()["fitted_exponent"] is None


def test_zero_tolerance_absorbs_roundoff() -> None:
    assert fit_power_law(LADDER, [1e-15, 0.0, -2e-16, 0.0, 0.0], zero_tolerance=1e-12).exact_zero


def test_partial_zeros_do_not_fit() -> None:
    with pytest.raises(NumericalFailure):
        fit_power_law(LADDER, [1.0, 0.5, 0.0, 0.1, 0.05])
    with pytest.raises(NumericalFailure):
        fit_power_law(LADDER, [1.0, np.nan, 0.2, 0.1, 0.05])


def test_ladder_validation() -> None:
    with pytest.raises(DomainError):
        check_ladder([10.0, 20.0])
    with pytest.raises(DomainError):
        check_ladder([10.0, 30.0, 20.0])
    with pytest.raises(DomainError):
        check_ladder([10.0, 20.0, 50.0])
    assert check_ladder(default_radii()).size == len(default_radii())


def test_decay_rate_of_a_tail_field() -> None:
    tail = SeparableScalarField(3, DecayingTail(0.5, 2.5), ("one", "one"))
    fit = estimate_decay_rate(tail, default_radii(), per_angle=4)
    assert fit.fitted_exponent == pytest.approx(2.5, abs=5e-3)


def test_plain_callables_need_a_dimension() -> None:
    with pytest.raises(DomainError):
        estimate_decay_rate(lambda p: p[:, 0] ** -2.0, LADDER)
    fit = estimate_decay_rate(lambda p: p[:, 0] ** -2.0, LADDER, dimension=3, per_angle=4)
    assert fit.fitted_exponent == pytest.approx(2.0, abs=1e-12)
