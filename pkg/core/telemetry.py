from __future__ import annotations

import json
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, TypeVar

T = TypeVar("T")


@dataclass(frozen=True)
class StageMetric:
    """One timed stage of a toolkit run (a module-level computation)."""

    layer: str
    action: str
    started_at: str
    ended_at: str
    elapsed_ms: int
    ok: bool
    details: Dict[str, Any]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "layer": self.layer,
            "action": self.action,
            "started_at": self.started_at,
            "ended_at": self.ended_at,
            "elapsed_ms": self.elapsed_ms,
            "ok": self.ok,
            "details": self.details,
        }


def _jsonable(value: Any) -> Any:
    # numpy scalars and arrays sneak into details from solver diagnostics
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


class JsonlMetricsLogger:
    """Append-only stage logger (JSONL). Timing data never enters report.json."""

    def __init__(self, path: str) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._history: List[StageMetric] = []

    @property
    def history(self) -> List[StageMetric]:
        return list(self._history)

    def record(self, metric: StageMetric) -> None:
        self._history.append(metric)
        line = json.dumps(
            _jsonable(metric.as_dict()),
            ensure_ascii=True,
            separators=(",", ":"),
            default=str,
        )
        with self.path.open("a", encoding="utf-8") as file:
            file.write(line + "\n")


def run_timed(
    logger: Optional[JsonlMetricsLogger],
    *,
    layer: str,
    action: str,
    fn: Callable[[], T],
    details: Optional[Dict[str, Any]] = None,
    summarize: Optional[Callable[[T], Dict[str, Any]]] = None,
) -> T:
    """Run ``fn`` and record one stage line; ``summarize`` adds result diagnostics."""
    if logger is None:
        return fn()

    started_at = datetime.now(timezone.utc)
    start_perf = time.perf_counter()
    ok = False
    stage_details: Dict[str, Any] = dict(details or {})
    try:
        result = fn()
        ok = True
        if summarize is not None:
            stage_details.update(summarize(result))
        return result
    except Exception as exc:
        stage_details["error"] = f"{type(exc).__name__}: {exc}"
        raise
    finally:
        ended_at = datetime.now(timezone.utc)
        elapsed_ms = int((time.perf_counter() - start_perf) * 1000)
        logger.record(
            StageMetric(
                layer=layer,
                action=action,
                started_at=started_at.isoformat(),
                ended_at=ended_at.isoformat(),
                elapsed_ms=elapsed_ms,
                ok=ok,
                details=stage_details,
            )
        )
