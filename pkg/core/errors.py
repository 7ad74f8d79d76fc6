from __future__ import annotations


class ToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class SchemaError(ToolkitError, ValueError):
    """A configuration or metric document failed validation."""


class DomainError(ToolkitError, ValueError):
    """An evaluation was requested outside the domain of a family or operation."""


class NumericalFailure(ToolkitError, RuntimeError):
    """A solver, integrator or fit could not produce a trustworthy answer."""


EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_SCHEMA = 2
EXIT_NUMERICAL = 3
