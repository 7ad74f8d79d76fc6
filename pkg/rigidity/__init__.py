from rigidity.identities import (
    DivergenceCheck,
    RhoClassification,
    SectionalOdeReport,
    WangReport,
    boundary_flux,
    classify_rho,
    divergence_form_check,
    gradient_geodesic,
    sectional_ode_check,
    wang_identity_check,
)
from rigidity.warped import WarpedProductFixture, sectional_report, warped_fixture

__all__ = [
    "DivergenceCheck",
    "RhoClassification",
    "SectionalOdeReport",
    "WangReport",
    "WarpedProductFixture",
    "boundary_flux",
    "classify_rho",
    "divergence_form_check",
    "gradient_geodesic",
    "sectional_ode_check",
    "sectional_report",
    "wang_identity_check",
    "warped_fixture",
]
