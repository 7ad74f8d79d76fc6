from odelab.dichotomy import GrowthClassifierConfig, GrowthReport, SeedLabel, classify_growth
from odelab.geodesics import (
    GeodesicSample,
    fibonacci_directions,
    integrate_geodesic,
    integrate_geodesics,
    reversal_gap,
)
from odelab.lemmas import (
    Coefficient,
    CoefficientTerm,
    DecayingSolution,
    FundamentalPair,
    ODEProblem,
    OdeSolution,
    ParticularSolution,
    build_decaying_solution,
    comparison_holds,
    count_sign_changes,
    exhaustion_member,
    fit_exponential_pair,
    fundamental_pair,
    particular_solution,
    solve_initial_value,
)

__all__ = [
    "Coefficient",
    "CoefficientTerm",
    "DecayingSolution",
    "FundamentalPair",
    "GeodesicSample",
    "GrowthClassifierConfig",
    "GrowthReport",
    "ODEProblem",
    "OdeSolution",
    "ParticularSolution",
    "SeedLabel",
    "build_decaying_solution",
    "classify_growth",
    "comparison_holds",
    "count_sign_changes",
    "exhaustion_member",
    "fibonacci_directions",
    "fit_exponential_pair",
    "fundamental_pair",
    "integrate_geodesic",
    "integrate_geodesics",
    "particular_solution",
    "reversal_gap",
    "solve_initial_value",
]
