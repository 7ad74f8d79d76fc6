from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from asymptotics.decay import DecayFit, fit_power_law
from geometry.chart import angular_grid, point_batch, shell_points
from geometry.jets import ScalarField, ScalarJet, TensorField, TensorJet
from geometry.metrics import MetricSpec
from tensors.calculus import (
    double_divergence_from_second,
    dot,
    hessian_from_jet,
    norm_squared,
    scalar_jet,
    second_covariant_derivative_from_jet,
    tensor_jet,
    trace_from_values,
    trace_laplacian_from_second,
)
from tensors.curvature import CurvaturePack, Points, curvature_at, curvature_from_jet


def _pack(g: MetricSpec, points: Points, pack: Optional[CurvaturePack]) -> CurvaturePack:
    return pack if pack is not None else curvature_at(g, points)


def linearized_scalar_from_jet(pack: CurvaturePack, h: TensorJet) -> np.ndarray:
    """L_g h = -Delta(tr h) + div div h - h . Ric."""
    D2 = second_covariant_derivative_from_jet(pack, h)
    return (
        -trace_laplacian_from_second(pack, D2)
        + double_divergence_from_second(pack, D2)
        - dot(pack, h.value, pack.ricci)
    )


def adjoint_from_jet(pack: CurvaturePack, V: ScalarJet) -> np.ndarray:
    """L_g* V = -(Delta V) g + nabla^2 V - V Ric."""
    H = hessian_from_jet(pack, V)
    lap = trace_from_values(pack, H)
    return -lap[:, None, None] * pack.metric + H - V.value[:, None, None] * pack.ricci


def linearized_scalar(
    g: MetricSpec,
    h: TensorField | TensorJet,
    points: Points,
    pack: Optional[CurvaturePack] = None,
) -> np.ndarray:
    P = _pack(g, points, pack)
    return linearized_scalar_from_jet(P, tensor_jet(h, P.points, 2))


def adjoint(
    g: MetricSpec,
    V: ScalarField | ScalarJet,
    points: Points,
    pack: Optional[CurvaturePack] = None,
) -> np.ndarray:
    P = _pack(g, points, pack)
    return adjoint_from_jet(P, scalar_jet(V, P.points, 2))


def trace_identity_rhs(
    g: MetricSpec,
    u: ScalarField | ScalarJet,
    points: Points,
    pack: Optional[CurvaturePack] = None,
) -> np.ndarray:
    """(1 - n)(Delta u + R_g u / (n - 1)), the value of L_g(u g)."""
    P = _pack(g, points, pack)
    jet = scalar_jet(u, P.points, 2)
    n = P.dimension
    lap = trace_from_values(P, hessian_from_jet(P, jet))
    return (1 - n) * (lap + P.scalar * jet.value / (n - 1))


def adjoint_trace_rhs(
    g: MetricSpec,
    V: ScalarField | ScalarJet,
    points: Points,
    pack: Optional[CurvaturePack] = None,
) -> np.ndarray:
    """-n Delta V + Delta V - V R_g, the trace of L_g* V."""
    P = _pack(g, points, pack)
    jet = scalar_jet(V, P.points, 2)
    n = P.dimension
    lap = trace_from_values(P, hessian_from_jet(P, jet))
    return -n * lap + lap - jet.value * P.scalar


def hessian_rigidity_residual(
    g: MetricSpec,
    f: ScalarField | ScalarJet,
    points: Points,
    pack: Optional[CurvaturePack] = None,
) -> np.ndarray:
    """nabla^2 f - f g."""
    P = _pack(g, points, pack)
    jet = scalar_jet(f, P.points, 2)
    return hessian_from_jet(P, jet) - jet.value[:, None, None] * P.metric


@dataclass(frozen=True)
class StaticResidual:
    """Sup over samples of |nabla^2 V - (Ric + n g) V|_g and |Delta V - n V|."""

    hessian_sup: float
    laplacian_sup: float
    samples: int
    hessian_decay: Optional[DecayFit] = None
    laplacian_decay: Optional[DecayFit] = None

    def below(self, tolerance: float) -> bool:
        return self.hessian_sup < tolerance and self.laplacian_sup < tolerance

    def as_dict(self) -> Dict[str, Any]:
        return {
            "hessian_sup": self.hessian_sup,
            "laplacian_sup": self.laplacian_sup,
            "samples": self.samples,
            "hessian_decay": None if self.hessian_decay is None else self.hessian_decay.as_dict(),
            "laplacian_decay": None
            if self.laplacian_decay is None
            else self.laplacian_decay.as_dict(),
        }


def static_residual_fields(pack: CurvaturePack, V: ScalarJet) -> tuple[np.ndarray, np.ndarray]:
    n = pack.dimension
    H = hessian_from_jet(pack, V)
    tensor = H - V.value[:, None, None] * (pack.ricci + n * pack.metric)
    scalar = trace_from_values(pack, H) - n * V.value
    return np.sqrt(np.maximum(norm_squared(pack, tensor), 0.0)), np.abs(scalar)


def static_residual(g: MetricSpec, V: ScalarField, points: Points) -> StaticResidual:
    Y = point_batch(points)
    pack = curvature_at(g, Y)
    tensor, scalar = static_residual_fields(pack, scalar_jet(V, Y, 2))
    return StaticResidual(float(np.max(tensor)), float(np.max(scalar)), int(Y.shape[0]))


def static_residual_profile(
    g: MetricSpec,
    V: ScalarField,
    radii: Sequence[float],
    *,
    per_angle: int = 8,
    zero_tolerance: float = 1e-12,
) -> StaticResidual:
    """Per-shell sups on a radius ladder with their fitted decay rates."""
    angles = angular_grid(g.dimension, per_angle)
    hessian_sups = []
    laplacian_sups = []
    for radius in radii:
        points = shell_points(float(radius), angles)
        pack = curvature_from_jet(points, g.jet(points, 2))
        tensor, scalar = static_residual_fields(pack, V.jet(points, 2))
        hessian_sups.append(float(np.max(tensor)))
        laplacian_sups.append(float(np.max(scalar)))
    return StaticResidual(
        hessian_sup=max(hessian_sups),
        laplacian_sup=max(laplacian_sups),
        samples=len(radii) * angles.shape[0],
        hessian_decay=fit_power_law(radii, hessian_sups, zero_tolerance=zero_tolerance),
        laplacian_decay=fit_power_law(radii, laplacian_sups, zero_tolerance=zero_tolerance),
    )
