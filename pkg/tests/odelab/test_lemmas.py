import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from core.errors import DomainError
from odelab.lemmas import (
    Coefficient,
    ODEProblem,
    build_decaying_solution,
    comparison_holds,
    count_sign_changes,
    exhaustion_member,
    fit_exponential_pair,
    fundamental_pair,
    particular_solution,
    solve_initial_value,
)

TRIVIAL = ODEProblem(horizon=8.0)
FORCED = ODEProblem(
    P=Coefficient.of((0.2, 1.5, 0.0)),
    Q=Coefficient.of((0.3, 2.0, 1.0)),
    f=Coefficient.of((1.0, 2.0, 0.0)),
    horizon=10.0,
)


def test_coefficient_bound_covers_every_term() -> None:
    c = Coefficient.of((0.5, 2.0, 0.0), (-0.25, 1.0, 3.0))
    assert c.bound() == (0.75, 1.0)
    assert Coefficient().bound() == (0.0, math.inf)
    assert Coefficient.of((0.0, 1.0, 0.0)).is_zero


def test_trivial_problem_decays_like_exp_minus_t() -> None:
    decaying = build_decaying_solution(TRIVIAL)
    t = decaying.solution.t
    np.testing.assert_allclose(decaying.solution.u, np.exp(-t), rtol=1e-7)
    assert decaying.positive and decaying.decreasing
    assert decaying.differences[-1] < 1e-10


def test_trivial_fundamental_pair_has_unit_certificate() -> None:
    pair = fundamental_pair(TRIVIAL)
    np.testing.assert_allclose(pair.u1, np.exp(pair.t), rtol=1e-8)
    np.testing.assert_allclose(pair.wronskian, -2.0, rtol=1e-6)
    assert pair.certificate == pytest.approx(1.0, abs=1e-6)
    assert pair.wronskian_bound_holds


def test_forced_problem_decaying_solution_is_positive_and_decreasing() -> None:
    decaying = build_decaying_solution(FORCED)
    assert decaying.positive
    assert decaying.decreasing
    assert decaying.solution.u[0] == pytest.approx(1.0)


def test_fast_forcing_leaves_a_remainder_at_the_forcing_rate() -> None:
    prob = ODEProblem(f=Coefficient.of((1.0, 2.0, 0.0)), horizon=10.0)
    particular = particular_solution(prob)
    # u'' = u + e^{-2t} has remainder e^{-2t}/3 after removing c_2 e^{-t}
    assert particular.c2 == pytest.approx(-0.5, rel=1e-3)
    assert particular.fitted_rate == pytest.approx(2.0, abs=1e-3)
    assert particular.profile_constant is None
    half = particular.t >= 5.0
    np.testing.assert_allclose(
        particular.remainder[half], np.exp(-2.0 * particular.t[half]) / 3.0, rtol=5e-3
    )


def test_forced_config_problem_keeps_the_forcing_rate() -> None:
    particular = particular_solution(FORCED)
    assert particular.rate == 2.0
    assert particular.fitted_rate == pytest.approx(2.0, abs=5e-2)
    assert particular.tail_change < 1e-6


def test_resonant_forcing_has_a_t_exp_minus_t_profile() -> None:
    T = 20.0
    particular = particular_solution(ODEProblem(f=Coefficient.of((1.0, 1.0, 0.0)), horizon=T))
    assert particular.fitted_rate is None
    assert particular.c2 == 0.0
    assert particular.profile_constant == pytest.approx(-0.5 - 0.25 / T, rel=1e-3)


def test_zero_forcing_gives_the_zero_particular_solution() -> None:
    particular = particular_solution(TRIVIAL)
    assert not np.any(particular.u)
    assert particular.as_dict()["rate"] is None


def test_hypotheses_reject_a_nonpositive_potential() -> None:
    prob = ODEProblem(Q=Coefficient.of((-2.0, 0.0, 0.0)), horizon=5.0)
    with pytest.raises(DomainError):
        prob.check_hypotheses()
    with pytest.raises(DomainError):
        build_decaying_solution(prob)


def test_problem_shape_errors() -> None:
    with pytest.raises(DomainError):
        ODEProblem(horizon=0.0)
    with pytest.raises(DomainError):
        build_decaying_solution(ODEProblem(horizon=10.0), j_max=11)


def test_comparison_of_growing_solutions() -> None:
    steeper = solve_initial_value(TRIVIAL, 1.0, 1.0)
    flatter = solve_initial_value(TRIVIAL, 1.0, 0.0)
    assert comparison_holds(steeper, flatter)
    assert not comparison_holds(flatter, steeper)


def test_sign_changes_ignore_the_floor() -> None:
    t = np.linspace(0.1, 3.0 * math.pi - 0.1, 400)
    assert count_sign_changes(np.sin(t)) == 2
    assert count_sign_changes(np.exp(-t)) == 0
    noisy = np.array([1.0, 1e-12, -1e-12, 1.0])
    assert count_sign_changes(noisy) == 2
    assert count_sign_changes(noisy, floor=1e-9) == 0


def test_exponential_pair_fit_recovers_coefficients() -> None:
    t = np.linspace(0.0, 5.0, 101)
    fit = fit_exponential_pair(t, 2.0 * np.exp(t) - 3.0 * np.exp(-t))
    assert fit.C1 == pytest.approx(2.0, rel=1e-9)
    assert fit.C2 == pytest.approx(-3.0, rel=1e-7)
    assert fit.residual < 1e-10


def _terms(amplitude: float):
    return st.tuples(
        st.floats(min_value=-amplitude, max_value=amplitude),
        st.floats(min_value=0.5, max_value=2.5),
        st.floats(min_value=0.0, max_value=3.0),
    )


@st.composite
def homogeneous_problems(draw, horizon: float = 6.0) -> ODEProblem:
    """u'' = P u' + (1 + Q) u with |Q| < 1/2, so the zeroth-order coefficient stays positive."""
    return ODEProblem(
        P=Coefficient.of(draw(_terms(0.5))),
        Q=Coefficient.of(draw(_terms(0.45))),
        horizon=horizon,
    )


DATA = st.floats(min_value=-1.0, max_value=1.0)
STEP = st.floats(min_value=0.0, max_value=1.0)


@settings(max_examples=200, deadline=None)
@given(prob=homogeneous_problems(), u0=DATA, du0=DATA)
def test_nonzero_solutions_have_at_most_one_zero(prob: ODEProblem, u0: float, du0: float) -> None:
    assume(abs(u0) + abs(du0) > 0.1)
    solution = solve_initial_value(prob, u0, du0)
    floor = 1e-9 * float(np.max(np.abs(solution.u)))
    assert count_sign_changes(solution.u, floor=floor) <= 1


@settings(max_examples=100, deadline=None)
@given(prob=homogeneous_problems(), v0=DATA, dv0=DATA, a=STEP, b=STEP)
def test_larger_initial_data_stays_larger(
    prob: ODEProblem, v0: float, dv0: float, a: float, b: float
) -> None:
    assume(a + b >= 0.05)
    upper = solve_initial_value(prob, v0 + a, dv0 + b)
    lower = solve_initial_value(prob, v0, dv0)
    assert comparison_holds(upper, lower)


@settings(max_examples=30, deadline=None)
@given(prob=homogeneous_problems(), j=st.integers(min_value=2, max_value=5))
def test_exhaustion_members_increase_with_j(prob: ODEProblem, j: int) -> None:
    inner = exhaustion_member(prob, j, j - 0.5)
    outer = exhaustion_member(prob, j + 1, j - 0.5)
    np.testing.assert_array_equal(inner.t, outer.t)
    assert inner.u[0] == outer.u[0] == 1.0
    assert np.all(outer.u[1:] > inner.u[1:])


@settings(max_examples=20, deadline=None)
@given(prob=homogeneous_problems())
def test_decaying_solution_is_positive_decreasing_and_monotone(prob: ODEProblem) -> None:
    decaying = build_decaying_solution(prob)
    assert decaying.positive and decaying.decreasing
    assert decaying.monotone
