from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
from pydantic import ValidationError

from core.errors import DomainError, SchemaError
from core.schema import (
    ConformalParams,
    ConstantDocument,
    FramePowerDocument,
    LapseDocument,
    MetricDocument,
    PerturbedParams,
    PotentialDocument,
    ScalarBumpDocument,
    ScalarFieldDocument,
    SchwarzschildParams,
    SumDocument,
    SymmetricFieldDocument,
    TailDocument,
    TensorBumpDocument,
    ZeroTensorDocument,
)
from geometry.jets import ScalarField, TensorField
from geometry.metrics import (
    ConformalMetric,
    MetricSpec,
    PerturbedMetric,
    hyperbolic_metric,
    schwarzschild_ads,
)
from geometry.potentials import (
    ConstantField,
    ConstantRadial,
    DecayingTail,
    PolynomialBump,
    RadialFunction,
    SchwarzschildLapse,
    SeparableScalarField,
    SumScalarField,
    chart_potential,
)
from geometry.tensor_fields import (
    PatternTensorField,
    ScaledTensorField,
    ZeroTensorField,
    radial_frame_perturbation,
)


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise SchemaError(f"document not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise SchemaError(f"{path} must contain a JSON object")
    return payload


def load_metric_document(path: Union[str, Path]) -> MetricDocument:
    try:
        return MetricDocument.model_validate(read_json(path))
    except ValidationError as exc:
        raise SchemaError(f"metric document {path} failed validation: {exc}") from exc


def scalar_field_from_document(n: int, document: ScalarFieldDocument) -> ScalarField:
    if isinstance(document, PotentialDocument):
        if document.index > n:
            raise DomainError(f"potential index {document.index} exceeds dimension {n}")
        return chart_potential(n, document.index)
    if isinstance(document, ScalarBumpDocument):
        bump = PolynomialBump(document.center, document.width, document.amplitude, document.power)
        return SeparableScalarField(n, bump, ("one",) * (n - 1), label="bump")
    if isinstance(document, TailDocument):
        tail = DecayingTail(document.amplitude, document.exponent)
        return SeparableScalarField(n, tail, ("one",) * (n - 1), label="tail")
    if isinstance(document, ConstantDocument):
        return ConstantField(n, document.value)
    if isinstance(document, LapseDocument):
        return SeparableScalarField(
            n, SchwarzschildLapse(n, document.m), ("one",) * (n - 1), label="lapse"
        )
    if isinstance(document, SumDocument):
        terms = tuple(scalar_field_from_document(n, term) for term in document.terms)
        return SumScalarField(n, terms)
    raise SchemaError(f"unsupported scalar field document: {document!r}")


def radial_from_document(document: ScalarFieldDocument) -> RadialFunction:
    """The radial profile of a rotationally symmetric scalar document."""
    if isinstance(document, TailDocument):
        return DecayingTail(document.amplitude, document.exponent)
    if isinstance(document, ScalarBumpDocument):
        return PolynomialBump(document.center, document.width, document.amplitude, document.power)
    if isinstance(document, ConstantDocument):
        return ConstantRadial(document.value)
    raise SchemaError(f"scalar field of kind {document.kind!r} is not radial")


def symmetric_field_from_document(n: int, document: SymmetricFieldDocument) -> TensorField:
    if isinstance(document, ZeroTensorDocument):
        return ZeroTensorField(n)
    if isinstance(document, FramePowerDocument):
        return radial_frame_perturbation(
            n,
            amplitude=document.amplitude,
            exponent=document.exponent,
            angular=document.angular,
        )
    if isinstance(document, TensorBumpDocument):
        i, j = document.component
        if not (0 <= i < n and 0 <= j < n):
            raise DomainError(f"component {document.component} outside an {n}-dimensional chart")
        pattern = np.zeros((n, n))
        pattern[i, j] = pattern[j, i] = 1.0
        bump = PolynomialBump(document.center, document.width, document.amplitude, document.power)
        scalar = SeparableScalarField(n, bump, ("one",) * (n - 1), label="bump")
        rows = tuple(tuple(float(v) for v in row) for row in pattern)
        return ScaledTensorField(scalar, PatternTensorField(n, rows, label=f"d{i}*d{j}"), label="bump")
    raise SchemaError(f"unsupported symmetric field document: {document!r}")


def metric_from_document(document: MetricDocument) -> MetricSpec:
    n = document.n
    params = document.typed_params()
    if document.family == "hyperbolic":
        return hyperbolic_metric(n)
    if isinstance(params, SchwarzschildParams):
        return schwarzschild_ads(n, params.m)
    if isinstance(params, ConformalParams):
        base = metric_from_document(params.base)
        return ConformalMetric(base, scalar_field_from_document(n, params.u), params=document.params)
    if isinstance(params, PerturbedParams):
        base = metric_from_document(params.base)
        return PerturbedMetric(base, symmetric_field_from_document(n, params.h), params=document.params)
    raise SchemaError(f"unsupported metric family: {document.family}")


def load_metric(path: Union[str, Path]) -> MetricSpec:
    return metric_from_document(load_metric_document(path))
