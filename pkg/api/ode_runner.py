from __future__ import annotations

import math
from typing import Any, Dict, List, Sequence

import numpy as np

from api.contracts import Check, CommandOutcome, RunContext, Table, at_most, holds
from core.errors import DomainError
from core.schema import CoefficientTermDocument, DichotomySection, OdeSection
from geometry.jets import ScalarField
from geometry.metrics import MetricSpec, horizon_radius, is_hyperbolic
from geometry.potentials import (
    CartesianPotential,
    CartesianRadialField,
    HorosphericalPotential,
    HyperbolicDecayingRadial,
    chart_potential,
)
from odelab.dichotomy import GrowthClassifierConfig, GrowthReport, classify_growth, seeds_with_axis
from odelab.geodesics import cartesian_form, fibonacci_directions, radial_seed, reversal_gap
from odelab.lemmas import (
    Coefficient,
    CoefficientTerm,
    FundamentalPair,
    ODEProblem,
    build_decaying_solution,
    comparison_holds,
    count_sign_changes,
    fundamental_pair,
    particular_solution,
    solve_initial_value,
)

REVERSAL_HORIZON = 4.0


def _reversal(g: MetricSpec, direction: np.ndarray) -> float:
    """Out-and-back geodesic gap from a point near the core of g."""
    target = cartesian_form(g)
    n = g.dimension
    if target.coordinates == "cartesian":
        inner = horizon_radius(g)
        start, unit = radial_seed(n, 0.5 if inner == 0.0 else 2.0 * inner, direction)
    else:
        start = np.array([1.0] + [1.0] * (n - 2) + [0.5])
        unit = np.zeros(n)
        unit[0] = 1.0
    return reversal_gap(target, start[None, :], unit[None, :], REVERSAL_HORIZON)


def _coefficient(terms: Sequence[CoefficientTermDocument]) -> Coefficient:
    return Coefficient(tuple(CoefficientTerm(t.amplitude, t.rate, t.frequency) for t in terms))


def problem_from_section(section: OdeSection, horizon: float) -> ODEProblem:
    return ODEProblem(
        P=_coefficient(section.P),
        Q=_coefficient(section.Q),
        f=_coefficient(section.f),
        shift=section.shift,
        horizon=horizon,
    )


def run_ode_verify(context: RunContext) -> CommandOutcome:
    """Fundamental pair certificates across horizons and the particular-solution remainder."""
    config = context.config
    section = config.ode
    j_max = config.numeric.j_max
    prob = problem_from_section(section, config.numeric.ode_horizon)
    homogeneous = prob.homogeneous()
    homogeneous.check_hypotheses()

    pairs: List[FundamentalPair] = []
    for horizon in sorted(section.horizons):
        pairs.append(
            context.stage(
                "fundamental_pair",
                lambda horizon=horizon: fundamental_pair(prob, horizon, j_max=j_max),
                details={"horizon": horizon},
                summarize=lambda pair: {"certificate": pair.certificate, "exhaustion_j": pair.j},
            )
        )
    certificates = [pair.certificate for pair in pairs]
    spread = (max(certificates) - min(certificates)) / min(certificates)

    growing = solve_initial_value(homogeneous, 1.0, 1.0)
    slower = solve_initial_value(homogeneous, 1.0, 0.5)
    decaying = build_decaying_solution(prob, j_max=j_max)
    checks: List[Check] = [
        holds("certificates_finite", all(math.isfinite(c) for c in certificates)),
        holds("wronskian_bound", all(pair.wronskian_bound_holds for pair in pairs)),
        at_most("certificate_horizon_spread", spread, config.numeric.extrapolation_tolerance),
        holds("growing_solution_positive", count_sign_changes(growing.u) == 0),
        holds("comparison_principle", comparison_holds(growing, slower)),
        holds("decaying_solution_positive", decaying.positive),
        holds("decaying_solution_decreasing", decaying.decreasing),
        holds("exhaustion_monotone", decaying.monotone),
    ]
    results: Dict[str, Any] = {
        "problem": prob.as_dict(),
        "pairs": [pair.as_dict() for pair in pairs],
        "certificate_spread": spread,
        "exhaustion": {
            "j": decaying.j,
            "differences": list(decaying.differences),
            "monotone": decaying.monotone,
        },
    }
    tables = {"fundamental_pair": Table(("t", "u1", "u2", "wronskian"), pairs[-1].rows())}

    if not prob.f.is_zero:
        particular = context.stage(
            "particular_solution",
            lambda: particular_solution(prob, j_max=j_max),
            summarize=lambda p: {"fitted_rate": p.fitted_rate, "tail_change": p.tail_change},
        )
        results["particular"] = particular.as_dict()
        if particular.profile_constant is not None:
            checks.append(
                at_most("remainder_profile", particular.fit_residual, section.profile_tolerance)
            )
        else:
            fitted = particular.fitted_rate if particular.fitted_rate is not None else math.nan
            relative = abs(fitted - particular.rate) / particular.rate
            checks.append(at_most("remainder_rate", relative, section.rate_tolerance))
        tables["particular"] = Table(
            ("t", "u", "remainder"),
            list(zip(particular.t, particular.u, particular.remainder)),
        )
    return CommandOutcome(results=results, checks=tuple(checks), tables=tables)


def dichotomy_potential(g: MetricSpec, section: DichotomySection) -> ScalarField:
    """The potential in the coordinates the seed geodesics run in."""
    n = g.dimension
    cartesian = cartesian_form(g).coordinates == "cartesian"
    if section.potential in ("V_0", "V_i"):
        index = 0 if section.potential == "V_0" else section.index
        if not 0 <= index <= n or (section.potential == "V_i" and index == 0):
            raise DomainError(f"potential index {index} outside 1..{n}")
        return CartesianPotential(n, index) if cartesian else chart_potential(n, index)
    if not cartesian:
        raise DomainError(f"{section.potential} needs a rotationally symmetric metric")
    if section.potential == "V_0-x_1":
        return HorosphericalPotential(n, axis=1)
    if n != 3 or not is_hyperbolic(g):
        raise DomainError("the decaying radial solution is tabulated for hyperbolic 3-space")
    return CartesianRadialField(n, HyperbolicDecayingRadial(), label="decaying")


def run_dichotomy(context: RunContext) -> CommandOutcome:
    g = context.require_metric()
    n = g.dimension
    config = context.config
    section = config.dichotomy
    V = dichotomy_potential(g, section)
    rules = GrowthClassifierConfig(
        growth_band=section.growth_band, decay_threshold=section.decay_threshold
    )
    with_axis = cartesian_form(g).coordinates == "cartesian"
    if with_axis:
        directions = seeds_with_axis(section.directions, n, 1, seed=config.numeric.seed)
    else:
        directions = fibonacci_directions(section.directions, n, config.numeric.seed)
    report: GrowthReport = context.stage(
        "classify_growth",
        lambda: classify_growth(
            g,
            V,
            directions=directions,
            horizon=section.horizon,
            config=rules,
            seed=config.numeric.seed,
        ),
        summarize=lambda r: {
            "linear_growth": r.count("linear-growth"),
            "decay": r.count("decay"),
            "max_drift": float(np.max(r.sample.drift)),
        },
    )
    axis_label = report.labels[-1].label if with_axis else None
    if section.potential in ("V_0", "V_i"):
        checks: List[Check] = [holds("linear_growth_on_some_seed", report.any_linear_growth)]
    elif section.potential == "V_0-x_1":
        checks = [holds("decay_along_axis", str(axis_label).startswith("decay"))]
    else:
        checks = [holds("decay_on_every_seed", report.all_decay)]

    gap = context.stage("reversal_gap", lambda: _reversal(g, directions[-1]))
    checks.append(at_most("geodesic_reversal", gap, section.reversal_tolerance))
    results: Dict[str, Any] = {
        "growth": report.as_dict(),
        "axis_label": axis_label,
        "reversal_gap": gap,
        "comparability": report.sample.comparability().tolist(),
    }
    return CommandOutcome(
        results=results,
        checks=tuple(checks),
        tables={"growth": Table(("seed", "t", "radius", "value"), report.rows())},
    )
