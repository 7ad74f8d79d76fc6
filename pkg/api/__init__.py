from api.contracts import Check, CommandOutcome, RunContext, Table
from api.registry import CommandRegistry
from api.toolkit_runner import ToolkitRunReport, default_registry, load_config, run

__all__ = [
    "Check",
    "CommandOutcome",
    "CommandRegistry",
    "RunContext",
    "Table",
    "ToolkitRunReport",
    "default_registry",
    "load_config",
    "run",
]
