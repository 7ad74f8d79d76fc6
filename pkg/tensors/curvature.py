from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from core.errors import DomainError, NumericalFailure
from geometry.chart import ChartPoint, point_batch
from geometry.jets import TensorJet, cartesian_step_rule, chart_step_rule
from geometry.metrics import MetricSpec
from geometry.tensor_fields import TabulatedTensorField

Points = Union[ChartPoint, np.ndarray]

# analytic families assert at this level; finite-difference jets at the looser one
ANALYTIC_TOLERANCE = 1e-8
FINITE_DIFFERENCE_TOLERANCE = 1e-5


def tolerance_for(g: MetricSpec) -> float:
    return ANALYTIC_TOLERANCE if g.derivative_mode == "analytic" else FINITE_DIFFERENCE_TOLERANCE


def inverse_metric(values: np.ndarray) -> np.ndarray:
    eigenvalues = np.linalg.eigvalsh(0.5 * (values + np.swapaxes(values, -1, -2)))
    if np.any(eigenvalues[..., 0] <= 0.0):
        raise NumericalFailure("metric is not positive definite at an evaluation point")
    return np.linalg.inv(values)


def christoffel_from_jet(
    jet: TensorJet,
) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """(g^-1, Gamma[N,k,i,j] = Gamma^k_ij, dGamma[N,m,k,i,j] = d_m Gamma^k_ij or None)."""
    jet.require(1)
    assert jet.grad is not None
    g_inv = inverse_metric(jet.value)
    dg = jet.grad
    lower = 0.5 * (
        np.einsum("nilj->nlij", dg) + np.einsum("njli->nlij", dg) - dg
    )
    gamma = np.einsum("nkl,nlij->nkij", g_inv, lower)
    if jet.hess is None:
        return g_inv, gamma, None
    ddg = jet.hess
    d_lower = 0.5 * (
        np.einsum("nmilj->nmlij", ddg) + np.einsum("nmjli->nmlij", ddg) - ddg
    )
    d_inv = -np.einsum("nka,nmab,nbl->nmkl", g_inv, dg, g_inv)
    d_gamma = np.einsum("nmkl,nlij->nmkij", d_inv, lower) + np.einsum(
        "nkl,nmlij->nmkij", g_inv, d_lower
    )
    return g_inv, gamma, d_gamma


@dataclass(frozen=True)
class CurvaturePack:
    """Curvature of g on a batch of chart points.

    riemann[N,k,j,l,i] = g(R(d_k, d_j) d_l, d_i) with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
    """

    points: np.ndarray
    metric: np.ndarray
    inverse: np.ndarray
    christoffel: np.ndarray
    christoffel_derivative: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray

    @property
    def dimension(self) -> int:
        return int(self.points.shape[1])

    def traceless_ricci_shift(self) -> np.ndarray:
        """S = Ric + (n-1) g."""
        return self.ricci + (self.dimension - 1) * self.metric


def curvature_from_jet(points: np.ndarray, jet: TensorJet) -> CurvaturePack:
    jet.require(2)
    g_inv, gamma, d_gamma = christoffel_from_jet(jet)
    assert d_gamma is not None
    # R(d_k, d_j) d_l = Rup[m, l, k, j] d_m
    r_up = (
        np.einsum("nkmjl->nmlkj", d_gamma)
        - np.einsum("njmkl->nmlkj", d_gamma)
        + np.einsum("npjl,nmkp->nmlkj", gamma, gamma)
        - np.einsum("npkl,nmjp->nmlkj", gamma, gamma)
    )
    riemann = np.einsum("nim,nmlkj->nkjli", jet.value, r_up)
    ricci = np.einsum("nklkj->njl", r_up)
    ricci = 0.5 * (ricci + np.swapaxes(ricci, 1, 2))
    scalar = np.einsum("nij,nij->n", g_inv, ricci)
    return CurvaturePack(
        points=points,
        metric=jet.value,
        inverse=g_inv,
        christoffel=gamma,
        christoffel_derivative=d_gamma,
        riemann=riemann,
        ricci=ricci,
        scalar=scalar,
    )


def curvature_at(g: MetricSpec, points: Points) -> CurvaturePack:
    Y = point_batch(points)
    if Y.shape[1] != g.dimension:
        raise DomainError(f"points have dimension {Y.shape[1]}, metric has {g.dimension}")
    g.check_domain(Y)
    return curvature_from_jet(Y, g.jet(Y, 2))


def sectional_curvature(pack: CurvaturePack, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """K(X, Y) = R(X,Y,Y,X) / (|X|^2 |Y|^2 - <X,Y>^2) for chart vectors X[N,n], Y[N,n]."""
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    numerator = np.einsum("nkjli,nk,nj,nl,ni->n", pack.riemann, X, Y, Y, X)
    xx = np.einsum("nij,ni,nj->n", pack.metric, X, X)
    yy = np.einsum("nij,ni,nj->n", pack.metric, Y, Y)
    xy = np.einsum("nij,ni,nj->n", pack.metric, X, Y)
    area = xx * yy - xy * xy
    if np.any(area <= 0.0):
        raise DomainError("sectional curvature needs linearly independent vectors")
    return numerator / area


def symmetry_defects(pack: CurvaturePack) -> dict[str, float]:
    """Largest violations of the algebraic Riemann symmetries and of Ricci symmetry."""
    R = pack.riemann
    scale = max(1.0, float(np.max(np.abs(R))))
    first_pair = R + np.swapaxes(R, 1, 2)
    last_pair = R + np.swapaxes(R, 3, 4)
    bianchi = R + np.einsum("njlki->nkjli", R) + np.einsum("nlkji->nkjli", R)
    return {
        "first_pair": float(np.max(np.abs(first_pair))) / scale,
        "last_pair": float(np.max(np.abs(last_pair))) / scale,
        "bianchi": float(np.max(np.abs(bianchi))) / scale,
        "ricci_symmetry": float(
            np.max(np.abs(pack.ricci - np.swapaxes(pack.ricci, 1, 2)))
        ),
    }


def einstein_field(g: MetricSpec) -> TabulatedTensorField:
    """Ric - R g / 2 as a tensor field with finite-difference derivatives."""

    def components(points: np.ndarray) -> np.ndarray:
        pack = curvature_from_jet(points, g.jet(points, 2))
        return pack.ricci - 0.5 * pack.scalar[:, None, None] * pack.metric

    step_rule = cartesian_step_rule if g.coordinates == "cartesian" else chart_step_rule
    return TabulatedTensorField(g.dimension, components, label="einstein", step_rule=step_rule)
