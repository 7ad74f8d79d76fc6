import json
from pathlib import Path

from api.registry import CommandRegistry
from api.toolkit_runner import load_config, run
from core.errors import EXIT_CHECK_FAILED, EXIT_NUMERICAL, EXIT_OK, EXIT_SCHEMA, SchemaError
from core.schema import RunConfig

METRICS = Path(__file__).resolve().parents[2] / "configs" / "metrics"


def _config(tmp_path, **payload) -> RunConfig:
    payload.setdefault("output", str(tmp_path / "run"))
    return RunConfig.model_validate(payload)


def test_trivial_ode_run_passes_and_is_reproducible(tmp_path) -> None:
    config = _config(tmp_path, command="ode-verify")
    report = run(config)
    assert report.exit_code == EXIT_OK
    assert report.failed_checks == []
    first = Path(report.report_path).read_bytes()
    again = run(config)
    assert again.run_id == report.run_id
    assert Path(again.report_path).read_bytes() == first
    payload = json.loads(first)
    assert payload["command"] == "ode-verify" and payload["exit_code"] == 0
    assert all(check["pass"] for check in payload["checks"])
    assert report.tables == ["fundamental_pair"]
    metadata = json.loads(Path(report.metadata_path).read_text(encoding="utf-8"))
    assert metadata["stages"][-1] == "api.ode-verify"
    assert "ode-verify.fundamental_pair" in metadata["stages"]
    # metrics.jsonl keeps both runs
    lines = Path(report.metrics_path).read_text(encoding="utf-8").splitlines()
    assert sum(json.loads(line)["layer"] == "api" for line in lines) == 2


def test_failed_check_exits_with_one(tmp_path) -> None:
    config = _config(
        tmp_path,
        command="ode-verify",
        numeric={"ode_horizon": 10.0},
        ode={
            "f": [{"amplitude": 1.0, "rate": 2.0}],
            "horizons": [10.0, 12.0],
            "rate_tolerance": 1e-12,
        },
    )
    report = run(config)
    assert report.exit_code == EXIT_CHECK_FAILED
    assert report.failed_checks == ["remainder_rate"]
    assert "particular" in report.tables


def test_domain_error_exits_with_three(tmp_path) -> None:
    config = _config(tmp_path, command="ode-verify", ode={"Q": [{"amplitude": -2.0}]})
    report = run(config)
    assert report.exit_code == EXIT_NUMERICAL
    assert report.error.startswith("DomainError")
    payload = json.loads(Path(report.report_path).read_text(encoding="utf-8"))
    assert payload["results"] == {} and payload["checks"] == []


def test_unregistered_command_exits_with_two(tmp_path) -> None:
    report = run(_config(tmp_path, command="ode-verify"), registry=CommandRegistry())
    assert report.exit_code == EXIT_SCHEMA


def test_bad_metric_document_exits_with_two(tmp_path) -> None:
    metric = tmp_path / "metric.json"
    metric.write_text(json.dumps({"family": "flat", "n": 3}), encoding="utf-8")
    report = run(_config(tmp_path, command="curvature", metric=str(metric)))
    assert report.exit_code == EXIT_SCHEMA


def test_curvature_run_on_hyperbolic_space(tmp_path) -> None:
    config = _config(
        tmp_path,
        command="curvature",
        metric=str(METRICS / "hyperbolic3.json"),
        curvature={"points": 20, "r_range": [0.5, 5.0]},
    )
    report = run(config)
    assert report.exit_code == EXIT_OK, report.failed_checks
    payload = json.loads(Path(report.report_path).read_text(encoding="utf-8"))
    assert payload["results"]["scalar_curvature"]["sup_gap_to_model"] < 1e-8


def test_dichotomy_runs_in_the_chart_of_a_perturbed_metric(tmp_path) -> None:
    config = _config(
        tmp_path,
        command="dichotomy",
        metric=str(METRICS / "perturbed3.json"),
        dichotomy={"potential": "V_0", "directions": 8, "horizon": 6.0},
    )
    report = run(config)
    assert report.exit_code != EXIT_NUMERICAL, report.error
    assert "linear_growth_on_some_seed" not in report.failed_checks
    payload = json.loads(Path(report.report_path).read_text(encoding="utf-8"))
    assert payload["results"]["axis_label"] is None
    assert payload["results"]["growth"]["counts"]["linear-growth"] == 8


def test_mass_run_reports_potential_stability(tmp_path) -> None:
    config = _config(tmp_path, command="mass", metric=str(METRICS / "hyperbolic3.json"))
    report = run(config)
    assert report.exit_code == EXIT_OK, report.failed_checks
    payload = json.loads(Path(report.report_path).read_text(encoding="utf-8"))
    stability = payload["results"]["potential_stability"]
    assert stability["passed"] and stability["gap"] == 0.0
    assert "potential_stability" in [check["name"] for check in payload["checks"]]


def test_load_config_wraps_validation_errors(tmp_path) -> None:
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"command": "mass"}), encoding="utf-8")
    try:
        load_config(path)
    except SchemaError as exc:
        assert "failed validation" in str(exc)
    else:
        raise AssertionError("expected a SchemaError")
