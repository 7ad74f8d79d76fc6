from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import ValidationError

from api.contracts import CommandOutcome, RunContext
from api.curvature_runner import run_curvature, run_verify_ah
from api.mass_runner import run_mass
from api.ode_runner import run_dichotomy, run_ode_verify
from api.operators_runner import (
    run_deform,
    run_duality_check,
    run_eigenfunction,
    run_first_variation,
)
from api.registry import CommandRegistry
from api.rigidity_runner import run_rigidity_check
from core import __version__
from core.deterministic_id import make_run_id
from core.errors import (
    EXIT_CHECK_FAILED,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_SCHEMA,
    DomainError,
    NumericalFailure,
    SchemaError,
)
from core.schema import RunConfig
from core.telemetry import JsonlMetricsLogger, run_timed
from geometry.loader import load_metric, read_json
from geometry.metrics import MetricSpec
from storage.report_store import ReportStore


@dataclass(frozen=True)
class ToolkitRunReport:
    command: str
    run_id: str
    exit_code: int
    failed_checks: List[str] = field(default_factory=list)
    error: str = ""
    report_path: str = ""
    metadata_path: str = ""
    metrics_path: str = ""
    tables: List[str] = field(default_factory=list)


def default_registry() -> CommandRegistry:
    registry = CommandRegistry()
    registry.register("mass", run_mass)
    registry.register("curvature", run_curvature)
    registry.register("verify-ah", run_verify_ah)
    registry.register("duality-check", run_duality_check)
    registry.register("eigenfunction", run_eigenfunction)
    registry.register("deform", run_deform)
    registry.register("first-variation", run_first_variation)
    registry.register("ode-verify", run_ode_verify)
    registry.register("dichotomy", run_dichotomy)
    registry.register("rigidity-check", run_rigidity_check)
    return registry


def load_config(path: Union[str, Path]) -> RunConfig:
    try:
        return RunConfig.model_validate(read_json(path))
    except ValidationError as exc:
        raise SchemaError(f"config {path} failed validation: {exc}") from exc


def _report_payload(
    config: RunConfig,
    run_id: str,
    resolved: Dict[str, Any],
    outcome: Optional[CommandOutcome],
    exit_code: int,
    error: str,
) -> Dict[str, Any]:
    return {
        "command": config.command,
        "version": __version__,
        "run_id": run_id,
        "seed": config.numeric.seed,
        "config": resolved,
        "results": outcome.results if outcome is not None else {},
        "checks": [check.as_dict() for check in outcome.checks] if outcome is not None else [],
        "exit_code": exit_code,
        "error": error,
    }


def run(config: RunConfig, *, registry: Optional[CommandRegistry] = None) -> ToolkitRunReport:
    """Execute one command and write report.json, metadata.json, metrics.jsonl and CSV tables.

    Exit codes: 0 all checks pass, 1 a check failed, 2 schema violation,
    3 numerical failure or a request outside a family's domain.
    """
    commands = registry or default_registry()
    store = ReportStore(config.output)
    resolved = config.model_dump(mode="json")
    run_id = make_run_id(config.command, resolved)
    logger = JsonlMetricsLogger(str(store.metrics_path))

    outcome: Optional[CommandOutcome] = None
    error = ""
    try:
        metric: Optional[MetricSpec] = None
        if config.metric is not None:
            metric = run_timed(
                logger,
                layer="geometry",
                action="load_metric",
                fn=lambda: load_metric(config.metric or ""),
                details={"path": config.metric},
            )
        context = RunContext(config=config, metric=metric, logger=logger)
        outcome = run_timed(
            logger,
            layer="api",
            action=config.command,
            fn=lambda: commands.execute(config.command, context),
            details={"run_id": run_id},
            summarize=lambda result: {"failed_checks": result.failed_checks},
        )
        exit_code = EXIT_OK if outcome.passed else EXIT_CHECK_FAILED
    except SchemaError as exc:
        exit_code, error = EXIT_SCHEMA, f"{type(exc).__name__}: {exc}"
    except (DomainError, NumericalFailure) as exc:
        exit_code, error = EXIT_NUMERICAL, f"{type(exc).__name__}: {exc}"

    store.write_report(_report_payload(config, run_id, resolved, outcome, exit_code, error))
    store.write_metadata(
        run_id=run_id,
        version=__version__,
        command=config.command,
        stages=[f"{stage.layer}.{stage.action}" for stage in logger.history],
    )
    if outcome is not None:
        for name, table in sorted(outcome.tables.items()):
            store.write_table(name, table.header, table.rows)
    return ToolkitRunReport(
        command=config.command,
        run_id=run_id,
        exit_code=exit_code,
        failed_checks=outcome.failed_checks if outcome is not None else [],
        error=error,
        report_path=str(store.report_path),
        metadata_path=str(store.metadata_path),
        metrics_path=str(store.metrics_path),
        tables=store.tables(),
    )
