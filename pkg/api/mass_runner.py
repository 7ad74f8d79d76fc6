from __future__ import annotations

from typing import Any, Dict, List

from api.contracts import Check, CommandOutcome, RunContext, Table, at_most
from geometry.metrics import is_hyperbolic
from geometry.potentials import chart_potential
from mass.flux import (
    PotentialStabilityCheck,
    RicciFluxCheck,
    mass_vector,
    potential_stability_check,
    ricci_flux_check,
    schwarzschild_mass,
)


def run_mass(context: RunContext) -> CommandOutcome:
    """Mass vector on the radius ladder with the Ricci-flux and V_0 + w cross-checks."""
    g = context.require_metric()
    config = context.config
    numeric = config.numeric
    quad = context.sphere()

    vector = context.stage(
        "mass_vector",
        lambda: mass_vector(g, numeric.radii, quad, reference=config.mass.reference),
        details={"family": g.family, "reference": config.mass.reference},
        summarize=lambda mv: {"p": list(mv.p), "flags": mv.flags},
    )
    results: Dict[str, Any] = {
        "metric": {"family": g.family, "n": g.dimension, "params": g.parameters()}
    }
    results["mass_vector"] = vector.as_dict()
    checks: List[Check] = []
    spatial = max((abs(value) for value in vector.p[1:]), default=0.0)

    if is_hyperbolic(g):
        checks.append(at_most("mass_vector_zero", max(abs(v) for v in vector.p), numeric.tolerance))
    elif g.family == "schwarzschild_ads":
        expected = schwarzschild_mass(g.dimension, float(g.parameters()["m"]))
        results["closed_form_p0"] = expected
        relative = abs(vector.p[0] - expected) / expected
        checks.append(at_most("p0_closed_form", relative, numeric.extrapolation_tolerance))
        checks.append(at_most("p_spatial_zero", spatial, config.mass.spatial_tolerance))

    rows = [
        (report.integrand_label, radius, value)
        for report in vector.reports
        for radius, value in zip(report.radii, report.values)
    ]
    tables = {"mass_flux": Table(("component", "radius", "value"), rows)}

    if config.mass.ricci_flux:
        V0 = chart_potential(g.dimension, 0)
        check: RicciFluxCheck = context.stage(
            "ricci_flux_check",
            lambda: ricci_flux_check(
                g, V0, numeric.radii, quad, tolerance=numeric.extrapolation_tolerance
            ),
            summarize=lambda c: {"lhs": c.lhs, "rhs": c.rhs, "gap": c.gap},
        )
        results["ricci_flux"] = check.as_dict()
        allowed = check.tolerance * max(abs(check.lhs), abs(check.rhs)) + 1e-8
        checks.append(Check("ricci_flux_agreement", check.gap, allowed, check.passed))
        tables["ricci_flux"] = Table(
            ("radius", "ricci", "mass"),
            list(zip(check.ricci.radii, check.ricci.values, check.mass.values)),
        )

    if config.mass.potential_stability and g.dimension == 3:
        stability: PotentialStabilityCheck = context.stage(
            "potential_stability",
            lambda: potential_stability_check(
                g, numeric.radii, quad, tolerance=numeric.tolerance, reference=config.mass.reference
            ),
            summarize=lambda c: {"gap": c.gap, "support": list(c.support)},
        )
        results["potential_stability"] = stability.as_dict()
        allowed = stability.tolerance * max(abs(stability.plain.fitted_limit), 1.0)
        checks.append(Check("potential_stability", stability.gap, allowed, stability.passed))
    return CommandOutcome(results=results, checks=tuple(checks), tables=tables)
