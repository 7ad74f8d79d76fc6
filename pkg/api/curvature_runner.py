from __future__ import annotations

from typing import Any, Dict, List

import numpy as np

from api.contracts import Check, CommandOutcome, RunContext, Table, at_most, holds
from asymptotics.ah import AhReport, verify_ah
from core.deterministic_id import derive_seed
from geometry.chart import random_chart_points
from geometry.metrics import MetricSpec, horizon_radius, is_hyperbolic
from geometry.potentials import chart_potential
from operators.linearized import static_residual
from tensors.curvature import CurvaturePack, curvature_at, symmetry_defects


def _tier(context: RunContext, g: MetricSpec) -> float:
    numeric = context.config.numeric
    return numeric.tolerance if g.derivative_mode == "analytic" else numeric.fd_tolerance


def _sample_points(context: RunContext, g: MetricSpec) -> np.ndarray:
    section = context.config.curvature
    lo, hi = section.r_range
    # stay clear of a horizon where the chart degenerates
    lo = max(lo, 2.0 * horizon_radius(g))
    if lo >= hi:
        hi = 4.0 * lo
    rng = np.random.default_rng(derive_seed(context.config.numeric.seed, "curvature"))
    return random_chart_points(rng, g.dimension, section.points, r_range=(lo, hi))


def run_curvature(context: RunContext) -> CommandOutcome:
    """Curvature at sampled points: symmetries, scalar curvature and static residuals on b."""
    g = context.require_metric()
    n = g.dimension
    tolerance = _tier(context, g)
    points = _sample_points(context, g)
    pack: CurvaturePack = context.stage(
        "curvature_at",
        lambda: curvature_at(g, points),
        details={"points": int(points.shape[0])},
    )
    defects = symmetry_defects(pack)
    scalar_gap = np.abs(pack.scalar + n * (n - 1))
    results: Dict[str, Any] = {
        "metric": {"family": g.family, "n": n, "params": g.parameters()},
        "derivative_mode": g.derivative_mode,
        "symmetry_defects": defects,
        "scalar_curvature": {
            "min": float(np.min(pack.scalar)),
            "max": float(np.max(pack.scalar)),
            "sup_gap_to_model": float(np.max(scalar_gap)),
        },
    }
    checks: List[Check] = [
        at_most(f"riemann_{key}", value, tolerance) for key, value in defects.items()
    ]

    # both families have R = -n(n-1); only b is Einstein
    if g.family == "schwarzschild_ads" or is_hyperbolic(g):
        checks.append(at_most("scalar_curvature_model", float(np.max(scalar_gap)), tolerance))
    if is_hyperbolic(g):
        ricci_gap = float(np.max(np.abs(pack.ricci + (n - 1) * pack.metric)))
        results["einstein_gap"] = ricci_gap
        checks.append(at_most("einstein_condition", ricci_gap, tolerance))
        residuals: Dict[str, Any] = {}
        for k in range(n + 1):
            residual = static_residual(g, chart_potential(n, k), points)
            residuals[f"V_{k}"] = residual.as_dict()
            checks.append(at_most(f"static_hessian_V_{k}", residual.hessian_sup, tolerance))
            checks.append(at_most(f"static_laplacian_V_{k}", residual.laplacian_sup, tolerance))
        results["static_potentials"] = residuals

    rows = [
        tuple(point.tolist()) + (float(scalar),) for point, scalar in zip(points, pack.scalar)
    ]
    header = tuple(f"y{i}" for i in range(n)) + ("scalar",)
    return CommandOutcome(
        results=results, checks=tuple(checks), tables={"scalar_curvature": Table(header, rows)}
    )


def run_verify_ah(context: RunContext) -> CommandOutcome:
    g = context.require_metric()
    config = context.config
    section = config.verify_ah
    assert section is not None
    radii = section.radii or config.numeric.radii
    report: AhReport = context.stage(
        "verify_ah",
        lambda: verify_ah(g, section.q_claimed, radii, per_angle=config.numeric.angular_samples),
        summarize=lambda r: {"passed": r.passed, "borderline": r.borderline},
    )
    checks = [holds(condition.name, condition.passed) for condition in report.conditions]
    rows = []
    for condition in report.conditions:
        for key, fit in condition.fits.items():
            rows.append((condition.name, key, fit.fitted_exponent, fit.fit_residual))
    return CommandOutcome(
        results={"ah": report.as_dict()},
        checks=tuple(checks),
        tables={"decay_fits": Table(("condition", "quantity", "exponent", "residual"), rows)},
    )
