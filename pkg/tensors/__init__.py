from tensors.calculus import divergence, gradient, hessian, laplacian, second_covariant_derivative, trace
from tensors.curvature import CurvaturePack, curvature_at, sectional_curvature

__all__ = [
    "CurvaturePack",
    "curvature_at",
    "divergence",
    "gradient",
    "hessian",
    "laplacian",
    "second_covariant_derivative",
    "sectional_curvature",
    "trace",
]
