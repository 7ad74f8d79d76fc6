from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np

from core.errors import DomainError
from geometry.metrics import MetricSpec
from mass.quadrature import SphereQuadrature, line_nodes, pairwise_sum
from operators.fields import PotentialField, SymmetricField
from operators.linearized import adjoint_from_jet, linearized_scalar_from_jet, trace_identity_rhs
from tensors.calculus import dot
from tensors.curvature import CurvaturePack, curvature_from_jet

CHUNK = 4096

Density = Callable[[np.ndarray, CurvaturePack], np.ndarray]


@dataclass(frozen=True)
class VolumeQuadrature:
    """Gauss-Legendre in r on [r_inner, r_outer] times the sphere rule; n = 3."""

    r_inner: float
    r_outer: float
    radial_order: int = 64
    polar: int = 48
    azimuth: int = 96

    def __post_init__(self) -> None:
        if not 0.0 < self.r_inner < self.r_outer:
            raise DomainError("volume quadrature needs 0 < r_inner < r_outer")
        SphereQuadrature(self.polar, self.azimuth)

    def contains(self, support: Tuple[float, float]) -> bool:
        return self.r_inner <= support[0] and support[1] <= self.r_outer

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Chart points (N, 3) and coordinate weights for dr dtheta_1 dtheta_2."""
        r, w_r = line_nodes(self.r_inner, self.r_outer, self.radial_order)
        angles, w_omega = SphereQuadrature(self.polar, self.azimuth).nodes()
        # the sphere weights carry sin(theta_1); coordinate measure divides it back out
        w_angles = w_omega / np.sin(angles[:, 0])
        count = r.size * angles.shape[0]
        points = np.empty((count, 3))
        points[:, 0] = np.repeat(r, angles.shape[0])
        points[:, 1:] = np.tile(angles, (r.size, 1))
        weights = np.repeat(w_r, angles.shape[0]) * np.tile(w_angles, r.size)
        return points, weights

    def chunks(self) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        points, weights = self.nodes()
        for start in range(0, points.shape[0], CHUNK):
            yield points[start : start + CHUNK], weights[start : start + CHUNK]

    def integrate(self, g: MetricSpec, density: Density) -> float:
        """Integral of density dmu_g; density receives the points and the curvature of g."""
        if g.dimension != 3:
            raise DomainError("volume quadrature is implemented for n = 3 only")
        partial = []
        for points, weights in self.chunks():
            pack = curvature_from_jet(points, g.jet(points, 2))
            volume = np.sqrt(np.linalg.det(pack.metric))
            partial.append(density(points, pack) * volume * weights)
        return pairwise_sum(np.concatenate(partial))

    def as_dict(self) -> Dict[str, Any]:
        return {
            "r_inner": self.r_inner,
            "r_outer": self.r_outer,
            "radial_order": self.radial_order,
            "polar": self.polar,
            "azimuth": self.azimuth,
        }


@dataclass(frozen=True)
class DualityReport:
    lhs: float
    rhs: float
    scale: float
    residual: float
    trace_identity: Optional[float] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "scale": self.scale,
            "residual": self.residual,
            "trace_identity": self.trace_identity,
        }


def duality_residual(
    g: MetricSpec,
    h: SymmetricField,
    u: PotentialField,
    quad: VolumeQuadrature,
    *,
    trace_direction: bool = False,
) -> DualityReport:
    """|<u, L_g h> - <h, L_g* u>| relative to the sum of the absolute integrands."""
    for name, support in (("h", h.support), ("u", u.support)):
        if support is None or not quad.contains(support):
            raise DomainError(f"support of {name} is not contained in the quadrature annulus")

    totals: Dict[str, List[np.ndarray]] = {
        key: [] for key in ("lhs", "rhs", "abs_lhs", "abs_rhs", "trace")
    }
    for points, weights in quad.chunks():
        pack = curvature_from_jet(points, g.jet(points, 2))
        measure = np.sqrt(np.linalg.det(pack.metric)) * weights
        u_jet = u.jet(points, 2)
        h_jet = h.jet(points, 2)
        left = u_jet.value * linearized_scalar_from_jet(pack, h_jet)
        right = dot(pack, h_jet.value, adjoint_from_jet(pack, u_jet))
        totals["lhs"].append(left * measure)
        totals["rhs"].append(right * measure)
        totals["abs_lhs"].append(np.abs(left) * measure)
        totals["abs_rhs"].append(np.abs(right) * measure)
        if trace_direction:
            third = u_jet.value * trace_identity_rhs(g, u_jet, points, pack)
            totals["trace"].append(third * measure)

    lhs = pairwise_sum(np.concatenate(totals["lhs"]))
    rhs = pairwise_sum(np.concatenate(totals["rhs"]))
    scale = pairwise_sum(np.concatenate(totals["abs_lhs"])) + pairwise_sum(
        np.concatenate(totals["abs_rhs"])
    )
    residual = 0.0 if scale == 0.0 else abs(lhs - rhs) / scale
    trace_value = pairwise_sum(np.concatenate(totals["trace"])) if trace_direction else None
    return DualityReport(lhs, rhs, scale, residual, trace_value)
