from mass.extrapolation import FluxReport, extrapolate_limit
from mass.flux import (
    MassVector,
    RicciFluxCheck,
    flux_report,
    mass_flux_integral,
    mass_vector,
    ricci_flux,
    ricci_flux_check,
    schwarzschild_mass,
)
from mass.quadrature import SphereQuadrature

__all__ = [
    "FluxReport",
    "MassVector",
    "RicciFluxCheck",
    "SphereQuadrature",
    "extrapolate_limit",
    "flux_report",
    "mass_flux_integral",
    "mass_vector",
    "ricci_flux",
    "ricci_flux_check",
    "schwarzschild_mass",
]
