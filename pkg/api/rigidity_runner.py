from __future__ import annotations

import math
from typing import Any, Dict, List, Tuple

import numpy as np

from api.contracts import Check, CommandOutcome, RunContext, Table, at_most, holds
from geometry.metrics import horizon_radius, hyperbolic_metric, schwarzschild_ads
from geometry.potentials import SchwarzschildLapse, SeparableScalarField, chart_potential
from rigidity.identities import (
    SectionalOdeReport,
    WangReport,
    divergence_form_check,
    gradient_geodesic,
    sectional_ode_check,
    wang_identity_check,
)
from rigidity.warped import (
    REPORT_TIMES,
    SectionalRow,
    fixture_summary,
    sectional_report,
    warped_fixture,
)

DIVERGENCE_POINT = (3.0, 1.0, 0.5)


def lapse_closed_form(m: float, r1: float, r2: float) -> float:
    """int of f |Ric + 2g|^2 over r1 < r < r2 for the n = 3 lapse: 6 m^2 r^-6 against r^2 / f."""
    return 8.0 * math.pi * m * m * (r1**-3 - r2**-3)


def _warped_checks(
    context: RunContext, results: Dict[str, Any]
) -> Tuple[List[Check], List[SectionalRow]]:
    config = context.config
    section = config.rigidity
    tolerance = config.numeric.tolerance
    fixture = warped_fixture(section.base)
    rows = sectional_report(fixture)
    hessian = fixture.hessian_residual(fixture.sample_points(REPORT_TIMES))
    results["warped"] = fixture_summary(fixture, rows)
    results["warped"]["hessian_residual"] = hessian

    half = 0.5 * section.geodesic_horizon
    start = fixture.sample_points([-half])[0]
    sample = context.stage(
        "gradient_geodesic",
        lambda: gradient_geodesic(
            fixture.metric, fixture.potential, start, section.geodesic_horizon
        ),
        summarize=lambda s: {"max_drift": float(np.max(s.drift))},
    )
    ode: SectionalOdeReport = context.stage(
        "sectional_ode_check", lambda: sectional_ode_check(fixture.metric, fixture.potential, sample)
    )
    t_coordinate = sample.positions[0, :, 0]
    rho_gap = float(np.max(np.abs(ode.rho_samples - np.tanh(t_coordinate))))
    results["sectional_ode"] = ode.as_dict()
    results["sectional_ode"]["rho_vs_tanh"] = rho_gap

    fd = config.numeric.fd_tolerance
    checks = [
        at_most("warped_hessian", hessian, tolerance),
        at_most("mixed_sectional", max(abs(row.mixed + 1.0) for row in rows), tolerance),
        at_most(
            "tangential_sectional",
            max(abs(row.tangential - row.expected_tangential) for row in rows),
            tolerance,
        ),
        at_most("rho_ode", ode.rho_residual, fd),
        at_most("curvature_ode", ode.curvature_residual, fd),
        at_most("mixed_along_geodesic", ode.mixed_residual, fd),
        at_most("rho_matches_tanh", rho_gap, section.rho_tolerance),
    ]
    return checks, rows


def _wang_checks(context: RunContext, results: Dict[str, Any]) -> List[Check]:
    config = context.config
    section = config.rigidity
    numeric = config.numeric
    sphere = context.sphere()
    checks: List[Check] = []

    b = hyperbolic_metric(3)
    V0 = chart_potential(3, 0)
    ball: List[WangReport] = []
    for radius in section.wang_radii:
        ball.append(
            context.stage(
                "wang_ball",
                lambda radius=radius: wang_identity_check(
                    b, V0, radius, radial_order=numeric.radial_order, sphere=sphere
                ),
                details={"radius": radius},
            )
        )
    results["wang_hyperbolic"] = [report.as_dict() for report in ball]
    checks.append(at_most("wang_static_gap", max(r.relative_gap for r in ball), numeric.tolerance))
    checks.append(holds("wang_static_flag", all(r.static for r in ball)))

    m = section.lapse_mass
    if m > 0.0:
        g = schwarzschild_ads(3, m)
        lapse = SeparableScalarField(3, SchwarzschildLapse(3, m), ("one", "one"), label="lapse")
        r1, r2 = section.annulus or (max(2.0, 2.0 * horizon_radius(g)), 10.0)
        annulus: WangReport = context.stage(
            "wang_annulus",
            lambda: wang_identity_check(
                g, lapse, r2, r_inner=r1, radial_order=numeric.radial_order, sphere=sphere
            ),
            summarize=lambda r: {"lhs": r.lhs, "rhs": r.rhs},
        )
        expected = lapse_closed_form(m, r1, r2)
        divergence = divergence_form_check(g, lapse, np.array(DIVERGENCE_POINT))
        results["wang_annulus"] = annulus.as_dict()
        results["wang_annulus"]["closed_form"] = expected
        results["divergence_form"] = divergence.as_dict()
        checks.append(at_most("wang_annulus_gap", annulus.relative_gap, numeric.fd_tolerance))
        checks.append(
            at_most("wang_closed_form", abs(annulus.lhs - expected) / expected, numeric.fd_tolerance)
        )
        checks.append(at_most("divergence_form", divergence.residual, numeric.fd_tolerance))
    return checks


def run_rigidity_check(context: RunContext) -> CommandOutcome:
    """Warped-product fixture, the rho and curvature ODEs, and the integral identity."""
    results: Dict[str, Any] = {}
    checks, sectional = _warped_checks(context, results)
    checks += _wang_checks(context, results)
    rows = [(row.t, row.mixed, row.tangential, row.expected_tangential) for row in sectional]
    return CommandOutcome(
        results=results,
        checks=tuple(checks),
        tables={"warped_sectional": Table(("t", "mixed", "tangential", "expected"), rows)},
    )
