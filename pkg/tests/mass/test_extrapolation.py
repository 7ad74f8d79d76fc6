import math

import numpy as np
import pytest

from core.schema import default_radii
from mass.extrapolation import extrapolate_limit


def test_constant_sequences_are_exact() -> None:
    report = extrapolate_limit("p_0", default_radii(), [2.5] * 8, beta_initial=3.0, beta_max=6.0)
    assert report.status == "exact"
    assert report.fitted_limit == 2.5
    assert report.as_dict()["fit_exponent"] == 0.0


def test_power_law_approach_is_extrapolated() -> None:
    r = np.asarray(default_radii())
    values = 8.0 * math.pi - 3.0 * (r / r[-1]) ** -2.0 * 1e-2
    report = extrapolate_limit("p_0", r, values, beta_initial=3.0, beta_max=6.0)
    assert report.extrapolated
    assert report.fitted_limit == pytest.approx(8.0 * math.pi, rel=1e-9)
    assert report.fit_exponent == pytest.approx(2.0, rel=1e-6)
    assert report.fit_residual < 1e-10


def test_non_finite_values_are_rejected() -> None:
    values = [1.0, 2.0, float("inf"), 3.0, 3.0, 3.0, 3.0, 3.0]
    with pytest.raises(ValueError):
        extrapolate_limit("p_0", default_radii(), values, beta_initial=2.0, beta_max=6.0)
    with pytest.raises(ValueError):
        extrapolate_limit("p_0", default_radii(), [1.0, 2.0], beta_initial=2.0, beta_max=6.0)
