from core.deterministic_id import derive_seed, make_run_id
from core.errors import DomainError, NumericalFailure, SchemaError, ToolkitError
from core.schema import MetricDocument, RunConfig
from core.telemetry import JsonlMetricsLogger, StageMetric, run_timed

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "JsonlMetricsLogger",
    "MetricDocument",
    "NumericalFailure",
    "RunConfig",
    "SchemaError",
    "StageMetric",
    "ToolkitError",
    "__version__",
    "derive_seed",
    "make_run_id",
    "run_timed",
]
