from __future__ import annotations

import csv
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

CSV_FORMAT = "%.17g"


def jsonable(value: Any) -> Any:
    """Plain JSON types; numpy values unwrapped, non-finite floats spelled out."""
    if hasattr(value, "tolist"):
        value = value.tolist()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    return value


def _cell(value: Any) -> str:
    if value is None:
        return "nan"
    if isinstance(value, float) or hasattr(value, "dtype"):
        return CSV_FORMAT % float(value)
    return str(value)


class ReportStore:
    """One run directory: report.json, metadata.json, metrics.jsonl and CSV tables."""

    def __init__(self, out_dir: str) -> None:
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    @property
    def report_path(self) -> Path:
        return self.out_dir / "report.json"

    @property
    def metadata_path(self) -> Path:
        return self.out_dir / "metadata.json"

    @property
    def metrics_path(self) -> Path:
        return self.out_dir / "metrics.jsonl"

    def table_path(self, name: str) -> Path:
        return self.out_dir / f"{name}.csv"

    def write_report(self, report: Dict[str, Any]) -> Path:
        # byte-identical for identical inputs: sorted keys, no timestamps
        text = json.dumps(jsonable(report), indent=2, sort_keys=True, ensure_ascii=True)
        self.report_path.write_text(text + "\n", encoding="utf-8")
        return self.report_path

    def write_metadata(
        self, *, run_id: str, version: str, command: str, stages: Sequence[str] = ()
    ) -> Path:
        payload = {
            "run_id": run_id,
            "version": version,
            "command": command,
            "stages": list(stages),
            "written_at": datetime.now(timezone.utc).isoformat(),
        }
        self.metadata_path.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return self.metadata_path

    def write_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.table_path(name)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(list(header))
            for row in rows:
                if len(row) != len(header):
                    raise ValueError(f"row width {len(row)} does not match header of {name}")
                writer.writerow([_cell(value) for value in row])
        return path

    def read_report(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = json.loads(self.report_path.read_text(encoding="utf-8"))
        return payload

    def tables(self) -> List[str]:
        return sorted(path.stem for path in self.out_dir.glob("*.csv"))
