from __future__ import annotations

from typing import List, MutableMapping, Protocol

from api.contracts import CommandOutcome, RunContext
from core.errors import SchemaError


class CommandRunner(Protocol):
    def __call__(self, context: RunContext) -> CommandOutcome:
        ...


class CommandRegistry:
    """Deterministic name -> runner dispatch for toolkit commands."""

    def __init__(self) -> None:
        self._runners: MutableMapping[str, CommandRunner] = {}

    def register(self, name: str, runner: CommandRunner) -> None:
        normalized = name.strip().lower()
        if not normalized:
            raise ValueError("command name cannot be empty")
        self._runners[normalized] = runner

    def has(self, name: str) -> bool:
        return name.strip().lower() in self._runners

    def execute(self, name: str, context: RunContext) -> CommandOutcome:
        normalized = name.strip().lower()
        if normalized not in self._runners:
            raise SchemaError(f"command not registered: {name}")
        return self._runners[normalized](context)

    def names(self) -> List[str]:
        return sorted(self._runners)
