import math
from pathlib import Path

import numpy as np
import pytest

from core.errors import DomainError
from geometry.loader import load_metric
from geometry.metrics import hyperbolic_metric, schwarzschild_ads
from geometry.potentials import ConstantRadial, DecayingTail
from operators.radial import (
    RadialReduction,
    conformal_deform_radial,
    inner_radius,
    radial_eigenfunction,
)
from tensors.curvature import curvature_at

METRICS = Path(__file__).resolve().parents[2] / "configs" / "metrics"


def test_reduction_reproduces_the_chart_scalar_curvature() -> None:
    g = schwarzschild_ads(3, 0.5)
    r = np.array([1.5, 3.0, 9.0])
    Y = np.column_stack([r, np.full(3, 1.2), np.full(3, 0.4)])
    np.testing.assert_allclose(
        RadialReduction(g).scalar_curvature(r), curvature_at(g, Y).scalar, rtol=1e-10
    )


def test_inner_radius_avoids_the_horizon() -> None:
    assert inner_radius(hyperbolic_metric(3)) == pytest.approx(0.1)
    g = schwarzschild_ads(3, 0.5)
    assert inner_radius(g) > 1.0


def test_background_eigenfunction_needs_no_correction() -> None:
    result = radial_eigenfunction(hyperbolic_metric(3))
    assert result.correction.zero
    assert result.correction_decay.exact_zero
    assert result.shooting_gap == 0.0
    assert result.positive
    assert result.residual_sup / (3.0 * math.sqrt(1.0 + 150.0**2)) < 1e-12


def test_schwarzschild_eigenfunction_is_positive_and_decays() -> None:
    result = radial_eigenfunction(schwarzschild_ads(3, 0.5))
    assert result.positive
    assert result.flags == []
    assert result.residual_sup / (3.0 * math.sqrt(1.0 + 150.0**2)) < 1e-5
    assert result.shooting_gap < 1e-5
    assert result.potential.tag == "linear_growth"
    assert result.potential.coefficients == (1.0, 0.0, 0.0, 0.0)


def test_eigenfunction_rejects_other_indices_and_general_metrics() -> None:
    with pytest.raises(DomainError):
        radial_eigenfunction(hyperbolic_metric(3), which=1)
    with pytest.raises(DomainError):
        radial_eigenfunction(load_metric(str(METRICS / "perturbed3.json")))


def test_deformation_solves_the_linear_problem_and_contracts() -> None:
    result = conformal_deform_radial(hyperbolic_metric(3), DecayingTail(0.1, 2.0), newton_steps=2)
    assert result.decay_target == pytest.approx(2.0, abs=0.05)
    assert result.linear_residual < 1e-6
    assert result.u_decay is not None
    assert result.u_decay.fitted_exponent == pytest.approx(2.0, abs=0.1)
    first, second = result.newton_residuals[0], result.newton_residuals[1]
    assert second < first
    assert result.contractions[0] >= 10.0
    assert result.curvature_crosscheck is not None


def test_zero_target_is_solved_by_zero() -> None:
    result = conformal_deform_radial(hyperbolic_metric(3), ConstantRadial(0.0), newton_steps=1)
    assert result.linear_residual == 0.0
    assert result.newton_residuals == (0.0, 0.0)


def test_deformation_rejects_decay_outside_the_isomorphism_range() -> None:
    with pytest.raises(DomainError):
        conformal_deform_radial(hyperbolic_metric(3), DecayingTail(0.1, 2.0), decay=3.5)
