from __future__ import annotations

import math
from typing import Any, Dict, List

import numpy as np

from api.contracts import Check, CommandOutcome, RunContext, Table, at_least, at_most, holds
from core.deterministic_id import derive_seed
from core.errors import DomainError
from core.schema import TensorBumpDocument
from geometry.chart import random_chart_points
from geometry.loader import radial_from_document, symmetric_field_from_document
from geometry.metrics import MetricSpec, hyperbolic_metric
from operators.fields import (
    PotentialField,
    SymmetricField,
    bump_pair_field,
    bump_scalar,
    conformal_direction,
    static_potential_field,
)
from operators.functional import first_variation_check
from operators.linearized import linearized_scalar, trace_identity_rhs
from operators.radial import (
    BVP_TOLERANCE,
    DeformResult,
    EigenfunctionResult,
    conformal_deform_radial,
    radial_eigenfunction,
)
from operators.volume import DualityReport, VolumeQuadrature, duality_residual

# Newton residuals below this are at the collocation floor and no longer contract
NEWTON_FLOOR = 100.0 * BVP_TOLERANCE


def _volume(context: RunContext, support: tuple[float, float]) -> VolumeQuadrature:
    numeric = context.config.numeric
    return VolumeQuadrature(
        support[0],
        support[1],
        radial_order=numeric.radial_order,
        polar=numeric.quad_polar,
        azimuth=numeric.quad_azimuth,
    )


def _trace_identity_gap(g: MetricSpec, u: PotentialField, points: np.ndarray) -> float:
    """sup |L_g(u g) - (1-n)(Delta u + R u/(n-1))| relative to the size of the right side."""
    h = conformal_direction(u.field, g)
    lhs = linearized_scalar(g, h.field, points)
    rhs = trace_identity_rhs(g, u.field, points)
    return float(np.max(np.abs(lhs - rhs)) / max(1.0, float(np.max(np.abs(rhs)))))


def run_duality_check(context: RunContext) -> CommandOutcome:
    """<L_g h, u> = <h, L_g* u> over randomized bump pairs, plus the pointwise trace identity."""
    g = context.require_metric()
    n = g.dimension
    config = context.config
    section = config.duality
    quad = _volume(context, section.support)
    background = hyperbolic_metric(n)
    rng = np.random.default_rng(derive_seed(config.numeric.seed, "duality"))

    reports: List[DualityReport] = []
    trace_gaps: List[float] = []
    for k in range(section.pairs):
        h = bump_pair_field(
            n, background, section.support, rng.normal(size=n + 1), rng.normal(size=n + 1)
        )
        u = bump_scalar(n, section.support, angular=rng.normal(size=n + 1))
        reports.append(
            context.stage(
                "duality_pair",
                lambda h=h, u=u: duality_residual(g, h, u, quad),
                details={"pair": k},
                summarize=lambda report: {"residual": report.residual},
            )
        )
        points = random_chart_points(rng, n, 32, r_range=section.support)
        trace_gaps.append(_trace_identity_gap(g, u, points))

    worst = max(report.residual for report in reports)
    worst_trace = max(trace_gaps)
    numeric = config.numeric
    tier = numeric.tolerance if g.derivative_mode == "analytic" else numeric.fd_tolerance
    results: Dict[str, Any] = {
        "pairs": [report.as_dict() for report in reports],
        "max_residual": worst,
        "max_trace_identity_gap": worst_trace,
        "quadrature": quad.as_dict(),
    }
    rows = [
        (k, report.lhs, report.rhs, report.scale, report.residual, trace_gaps[k])
        for k, report in enumerate(reports)
    ]
    return CommandOutcome(
        results=results,
        checks=(
            at_most("duality_residual", worst, section.tolerance),
            at_most("trace_identity", worst_trace, tier),
        ),
        tables={
            "duality": Table(("pair", "lhs", "rhs", "scale", "residual", "trace_gap"), rows)
        },
    )


def run_eigenfunction(context: RunContext) -> CommandOutcome:
    g = context.require_metric()
    config = context.config
    section = config.eigenfunction
    result: EigenfunctionResult = context.stage(
        "radial_eigenfunction",
        lambda: radial_eigenfunction(
            g,
            r_max=section.r_max,
            check_range=section.check_range,
            decay_radii=config.numeric.radii,
        ),
        summarize=lambda r: {"nodes": r.correction.nodes, "flags": r.flags},
    )
    n = g.dimension
    # residual relative to n f_0 at the far end of the check range
    scale = n * math.sqrt(1.0 + section.check_range[1] ** 2)
    tolerance = config.numeric.fd_tolerance
    checks = (
        at_most("eigen_residual", result.residual_sup / scale, tolerance),
        at_most("shooting_gap", result.shooting_gap, tolerance),
        holds("positive", result.positive),
        holds("correction_decay", not result.flags),
    )
    radii = np.geomspace(result.r_min, result.r_max, 200)
    v, dv, ddv = result.correction.evaluate(radii)
    ray = np.column_stack([radii] + [np.full_like(radii, 1.0)] * (n - 1))
    f0 = result.potential.field.jet(ray, 0)
    rows = [(r, a, b, c, d) for r, a, b, c, d in zip(radii, f0.value, v, dv, ddv)]
    return CommandOutcome(
        results={"eigenfunction": result.as_dict()},
        checks=checks,
        tables={"eigenfunction": Table(("r", "f0", "v", "v_r", "v_rr"), rows)},
    )


def run_deform(context: RunContext) -> CommandOutcome:
    g = context.require_metric()
    config = context.config
    section = config.deform
    phi = radial_from_document(section.target)
    result: DeformResult = context.stage(
        "conformal_deform_radial",
        lambda: conformal_deform_radial(
            g,
            phi,
            decay=section.decay,
            newton_steps=section.newton_steps,
            r_max=section.r_max,
            fit_radii=config.numeric.radii,
        ),
        summarize=lambda r: {"newton_residuals": list(r.newton_residuals)},
    )
    checks: List[Check] = [
        at_most("linear_residual", result.linear_residual, section.linear_tolerance)
    ]
    residuals = result.newton_residuals
    for k, ratio in enumerate(result.contractions):
        effective = math.inf if residuals[k + 1] <= NEWTON_FLOOR else ratio
        checks.append(at_least(f"newton_contraction_{k + 1}", effective, section.min_contraction))
    rows = [(k, value) for k, value in enumerate(residuals)]
    return CommandOutcome(
        results={"deform": result.as_dict(), "newton_floor": NEWTON_FLOOR},
        checks=tuple(checks),
        tables={"newton": Table(("step", "residual"), rows)},
    )


def _compact_direction(n: int, context: RunContext) -> SymmetricField:
    document = context.config.first_variation.h
    if not isinstance(document, TensorBumpDocument):
        raise DomainError("first variation needs a compactly supported bump direction h")
    support = (document.center - document.width, document.center + document.width)
    if support[0] <= 0.0:
        raise DomainError("the support of h must stay away from the origin")
    return SymmetricField(symmetric_field_from_document(n, document), support=support)


def run_first_variation(context: RunContext) -> CommandOutcome:
    g = context.require_metric()
    n = g.dimension
    section = context.config.first_variation
    h = _compact_direction(n, context)
    assert h.support is not None
    if section.potential == "V_0":
        f = static_potential_field(n, 0)
    else:
        f = context.stage("radial_eigenfunction", lambda: radial_eigenfunction(g)).potential
    quad = _volume(context, h.support)
    report = context.stage(
        "first_variation_check",
        lambda: first_variation_check(
            g, f, h, quad, epsilons=section.epsilons, min_order=section.min_order
        ),
        summarize=lambda r: {"order": r.order, "status": r.status},
    )
    order = math.inf if report.status == "exact" else report.order
    check = at_least("convergence_order", math.nan if order is None else order, section.min_order)
    rows = list(zip(report.epsilons, report.quotients, report.errors))
    return CommandOutcome(
        results={"first_variation": report.as_dict(), "quadrature": quad.as_dict()},
        checks=(check,),
        tables={"first_variation": Table(("epsilon", "quotient", "error"), rows)},
    )
