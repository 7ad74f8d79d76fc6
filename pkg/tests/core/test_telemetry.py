import json

import numpy as np
import pytest

from core.telemetry import JsonlMetricsLogger, run_timed


def _lines(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def test_run_timed_records_one_line_with_summary(tmp_path) -> None:
    path = tmp_path / "logs" / "metrics.jsonl"
    logger = JsonlMetricsLogger(str(path))
    value = run_timed(
        logger,
        layer="mass",
        action="flux",
        fn=lambda: np.float64(2.5),
        details={"radius": 20.0},
        summarize=lambda result: {"value": result, "samples": np.arange(2)},
    )
    assert value == 2.5
    (line,) = _lines(path)
    assert line["layer"] == "mass" and line["action"] == "flux" and line["ok"]
    assert line["details"] == {"radius": 20.0, "value": 2.5, "samples": [0, 1]}
    assert logger.history[0].elapsed_ms >= 0


def test_failures_are_recorded_and_reraised(tmp_path) -> None:
    logger = JsonlMetricsLogger(str(tmp_path / "metrics.jsonl"))

    def boom() -> float:
        raise RuntimeError("solver stalled")

    with pytest.raises(RuntimeError):
        run_timed(logger, layer="ode", action="pair", fn=boom)
    (line,) = _lines(logger.path)
    assert not line["ok"]
    assert line["details"]["error"] == "RuntimeError: solver stalled"


def test_logger_appends_across_instances(tmp_path) -> None:
    path = tmp_path / "metrics.jsonl"
    for _ in range(2):
        run_timed(JsonlMetricsLogger(str(path)), layer="api", action="mass", fn=lambda: 1)
    assert len(_lines(path)) == 2


def test_history_keeps_the_stage_details(tmp_path) -> None:
    logger = JsonlMetricsLogger(str(tmp_path / "metrics.jsonl"))
    details = {"family": "hyperbolic"}
    run_timed(logger, layer="geometry", action="load_metric", fn=lambda: 0, details=details)
    assert logger.history[0].details == {"family": "hyperbolic"}
    assert logger.history[0].ok


def test_without_a_logger_the_function_just_runs() -> None:
    assert run_timed(None, layer="x", action="y", fn=lambda: 3) == 3
