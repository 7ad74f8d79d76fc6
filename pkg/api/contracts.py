from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple, TypeVar

from core.errors import DomainError
from core.schema import RunConfig
from core.telemetry import JsonlMetricsLogger, run_timed
from geometry.metrics import MetricSpec
from mass.quadrature import SphereQuadrature

T = TypeVar("T")
Comparison = Literal["<=", ">="]


@dataclass(frozen=True)
class Check:
    """One toleranced check of a run; serialized as {"name", "value", "tolerance", "pass"}."""

    name: str
    value: float
    tolerance: float
    passed: bool
    comparison: Comparison = "<="

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def at_most(name: str, value: float, tolerance: float) -> Check:
    value = float(value)
    return Check(name, value, float(tolerance), math.isfinite(value) and value <= tolerance)


def at_least(name: str, value: float, threshold: float) -> Check:
    value = float(value)
    passed = not math.isnan(value) and value >= threshold
    return Check(name, value, float(threshold), passed, ">=")


def holds(name: str, condition: bool) -> Check:
    return Check(name, 1.0 if condition else 0.0, 1.0, bool(condition), ">=")


@dataclass(frozen=True)
class Table:
    header: Tuple[str, ...]
    rows: List[Sequence[Any]]


@dataclass(frozen=True)
class CommandOutcome:
    results: Dict[str, Any]
    checks: Tuple[Check, ...] = ()
    tables: Dict[str, Table] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed_checks(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]


@dataclass(frozen=True)
class RunContext:
    """What a command runner receives: the resolved config, the loaded metric and the logger."""

    config: RunConfig
    metric: Optional[MetricSpec] = None
    logger: Optional[JsonlMetricsLogger] = None

    def require_metric(self) -> MetricSpec:
        if self.metric is None:
            raise DomainError(f"command {self.config.command!r} needs a metric")
        return self.metric

    def sphere(self) -> SphereQuadrature:
        numeric = self.config.numeric
        return SphereQuadrature(numeric.quad_polar, numeric.quad_azimuth)

    def stage(
        self,
        action: str,
        fn: Callable[[], T],
        *,
        details: Optional[Dict[str, Any]] = None,
        summarize: Optional[Callable[[T], Dict[str, Any]]] = None,
    ) -> T:
        return run_timed(
            self.logger,
            layer=self.config.command,
            action=action,
            fn=fn,
            details=details,
            summarize=summarize,
        )
