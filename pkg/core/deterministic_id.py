from __future__ import annotations

import hashlib
import json
from typing import Any, Dict


def _stable_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def make_run_id(command: str, resolved_config: Dict[str, Any]) -> str:
    """Deterministic run identifier derived from the fully resolved configuration."""
    stable_payload = {"command": command, "config": resolved_config}
    digest = hashlib.sha256(_stable_json(stable_payload).encode("utf-8")).hexdigest()
    return f"run_{digest[:24]}"


def derive_seed(base_seed: int, *labels: str) -> int:
    """Sub-seed for a named stage so that stages draw independent but reproducible streams."""
    payload = {"seed": int(base_seed), "labels": list(labels)}
    digest = hashlib.sha256(_stable_json(payload).encode("utf-8")).hexdigest()
    return int(digest[:12], 16)
