import pytest
from pydantic import ValidationError

from core.schema import MetricDocument, NumericConfig, RunConfig, default_radii


def test_metric_document_params_follow_the_family() -> None:
    doc = MetricDocument.model_validate(
        {"family": "schwarzschild_ads", "n": 3, "params": {"m": 0.5}}
    )
    assert doc.typed_params().m == 0.5
    with pytest.raises(ValidationError):
        MetricDocument.model_validate({"family": "schwarzschild_ads", "n": 3, "params": {"m": -1}})
    with pytest.raises(ValidationError):
        MetricDocument.model_validate({"family": "hyperbolic", "n": 3, "params": {"m": 0.5}})
    with pytest.raises(ValidationError):
        MetricDocument.model_validate({"family": "hyperbolic", "n": 2})


def test_nested_base_must_share_the_dimension() -> None:
    payload = {
        "family": "perturbed",
        "n": 4,
        "params": {"base": {"family": "hyperbolic", "n": 3}, "h": {"kind": "zero"}},
    }
    with pytest.raises(ValidationError):
        MetricDocument.model_validate(payload)


def test_run_config_requires_a_metric_for_geometric_commands() -> None:
    with pytest.raises(ValidationError):
        RunConfig.model_validate({"command": "mass"})
    with pytest.raises(ValidationError):
        RunConfig.model_validate({"command": "verify-ah", "metric": "m.json"})
    assert RunConfig.model_validate({"command": "ode-verify"}).metric is None


def test_unknown_keys_and_commands_are_rejected() -> None:
    with pytest.raises(ValidationError):
        RunConfig.model_validate({"command": "ode-verify", "extra": 1})
    with pytest.raises(ValidationError):
        RunConfig.model_validate({"command": "plot"})


def test_radius_ladder_validation() -> None:
    assert len(default_radii()) == 8
    assert default_radii()[0] == pytest.approx(20.0)
    assert default_radii()[-1] == pytest.approx(200.0)
    for radii in ([10.0, 20.0], [10.0, 5.0, 20.0], [-1.0, 2.0, 3.0]):
        with pytest.raises(ValidationError):
            NumericConfig(radii=radii)
    with pytest.raises(ValidationError):
        NumericConfig(tolerance=0.0)


def test_overrides_revalidate_the_config() -> None:
    config = RunConfig.model_validate({"command": "ode-verify"})
    updated = config.with_overrides(out="elsewhere", quad_order=12, tol=1e-6, seed=7)
    assert updated.output == "elsewhere"
    assert (updated.numeric.quad_polar, updated.numeric.quad_azimuth) == (12, 24)
    assert updated.numeric.tolerance == 1e-6 and updated.numeric.seed == 7
    assert config.numeric.seed == 0
    with pytest.raises(ValidationError):
        config.with_overrides(quad_order=2)
