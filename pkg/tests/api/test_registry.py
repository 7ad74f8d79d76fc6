import pytest

from api.contracts import CommandOutcome, RunContext, at_least, at_most, holds
from api.registry import CommandRegistry
from api.toolkit_runner import default_registry
from core.errors import DomainError, SchemaError
from core.schema import COMMANDS, RunConfig


def _context() -> RunContext:
    return RunContext(config=RunConfig.model_validate({"command": "ode-verify"}))


def test_default_registry_covers_every_command() -> None:
    assert default_registry().names() == sorted(COMMANDS)


def test_names_are_normalized() -> None:
    registry = CommandRegistry()
    registry.register("  Mass ", lambda context: CommandOutcome(results={"ok": True}))
    assert registry.has("mass")
    assert registry.execute("MASS", _context()).results == {"ok": True}
    with pytest.raises(ValueError):
        registry.register("   ", lambda context: CommandOutcome(results={}))
    with pytest.raises(SchemaError):
        registry.execute("curvature", _context())


def test_checks_serialize_and_fail_on_nan() -> None:
    assert at_most("gap", 1e-9, 1e-8).as_dict() == {
        "name": "gap",
        "value": 1e-9,
        "tolerance": 1e-8,
        "pass": True,
    }
    assert not at_most("gap", float("nan"), 1.0).passed
    assert not at_least("order", float("nan"), 0.9).passed
    assert at_least("order", 1.0, 0.9).passed
    outcome = CommandOutcome(results={}, checks=(holds("a", True), holds("b", False)))
    assert not outcome.passed
    assert outcome.failed_checks == ["b"]


def test_metric_is_required_by_geometric_runners() -> None:
    with pytest.raises(DomainError):
        _context().require_metric()
