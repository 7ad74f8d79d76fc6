from pathlib import Path

import numpy as np
import pytest

from asymptotics.ah import frame_derivatives, verify_ah
from core.errors import DomainError
from core.schema import default_radii
from geometry.loader import load_metric
from geometry.metrics import PerturbedMetric, hyperbolic_metric, schwarzschild_ads
from geometry.tensor_fields import radial_frame_perturbation

METRICS = Path(__file__).resolve().parents[2] / "configs" / "metrics"


def _conditions(report) -> dict:
    return {condition.name: condition for condition in report.conditions}


def test_background_passes_with_exact_zeros() -> None:
    report = verify_ah(hyperbolic_metric(3), 3.0, default_radii(), per_angle=6)
    assert report.passed
    assert report.borderline
    conditions = _conditions(report)
    assert all(fit.exact_zero for fit in conditions["metric_decay"].fits.values())
    assert conditions["scalar_curvature_decay"].note == "exact zero"


def test_schwarzschild_decays_at_rate_n() -> None:
    report = verify_ah(schwarzschild_ads(3, 0.5), 3.0, default_radii(), per_angle=6)
    assert report.passed
    kappa = _conditions(report)["metric_decay"].fits["kappa"]
    assert kappa.fitted_exponent == pytest.approx(3.0, abs=0.05)
    assert report.as_dict()["family"] == "schwarzschild_ads"


def test_generic_perturbation_fails_only_the_scalar_condition() -> None:
    g = load_metric(str(METRICS / "perturbed3.json"))
    report = verify_ah(g, 2.5, default_radii(), per_angle=6)
    conditions = _conditions(report)
    assert conditions["metric_decay"].passed
    assert not conditions["scalar_curvature_decay"].passed
    assert not report.passed
    assert not report.borderline


def test_slow_perturbation_fails_the_metric_condition() -> None:
    h = radial_frame_perturbation(3, amplitude=0.1, exponent=1.0)
    report = verify_ah(PerturbedMetric(hyperbolic_metric(3), h), 2.0, default_radii(), per_angle=6)
    metric = _conditions(report)["metric_decay"]
    assert not metric.passed
    assert metric.required_rate == pytest.approx(1.9)
    assert metric.fits["kappa"].fitted_exponent == pytest.approx(1.0, abs=0.05)
    assert not report.passed


@pytest.mark.parametrize("q", [1.5, 3.5])
def test_claimed_rate_must_lie_in_the_admissible_window(q: float) -> None:
    with pytest.raises(DomainError):
        verify_ah(hyperbolic_metric(3), q, default_radii())


def test_frame_derivatives_vanish_for_the_background() -> None:
    Y = np.array([[3.0, 1.0, 0.5], [10.0, 2.0, 4.0]])
    levels = frame_derivatives(hyperbolic_metric(3), Y)
    assert levels["kappa"].shape == (2, 3, 3)
    assert levels["d_kappa"].shape == (2, 3, 3, 3)
    assert levels["dd_kappa"].shape == (2, 3, 3, 3, 3)
    assert all(np.all(value == 0.0) for value in levels.values())
