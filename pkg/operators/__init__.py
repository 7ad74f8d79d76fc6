from operators.fields import (
    PotentialField,
    SymmetricField,
    bump_pair_field,
    bump_scalar,
    conformal_direction,
    radial_scalar,
    static_potential_field,
)
from operators.functional import (
    FirstVariationReport,
    FluxFormReport,
    FunctionalValue,
    first_variation_check,
    flux_form_check,
    functional_F,
    functional_F_flux_form,
)
from operators.linearized import (
    StaticResidual,
    adjoint,
    adjoint_trace_rhs,
    hessian_rigidity_residual,
    linearized_scalar,
    static_residual,
    static_residual_profile,
    trace_identity_rhs,
)
from operators.radial import (
    DeformResult,
    EigenfunctionResult,
    RadialReduction,
    conformal_deform_radial,
    radial_eigenfunction,
)
from operators.volume import DualityReport, VolumeQuadrature, duality_residual

__all__ = [
    "DeformResult",
    "DualityReport",
    "EigenfunctionResult",
    "FirstVariationReport",
    "FluxFormReport",
    "FunctionalValue",
    "PotentialField",
    "RadialReduction",
    "StaticResidual",
    "SymmetricField",
    "VolumeQuadrature",
    "adjoint",
    "adjoint_trace_rhs",
    "bump_pair_field",
    "bump_scalar",
    "conformal_deform_radial",
    "conformal_direction",
    "duality_residual",
    "first_variation_check",
    "flux_form_check",
    "functional_F",
    "functional_F_flux_form",
    "hessian_rigidity_residual",
    "linearized_scalar",
    "radial_eigenfunction",
    "radial_scalar",
    "static_potential_field",
    "static_residual",
    "static_residual_profile",
    "trace_identity_rhs",
]
