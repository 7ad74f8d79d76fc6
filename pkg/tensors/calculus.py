from __future__ import annotations

from typing import Optional, Union

import numpy as np

from geometry.jets import ScalarField, ScalarJet, TensorField, TensorJet
from geometry.metrics import MetricSpec
from tensors.curvature import CurvaturePack, Points, curvature_at

ScalarInput = Union[ScalarField, ScalarJet]
TensorInput = Union[TensorField, TensorJet]


def _pack(g: MetricSpec, points: Points, pack: Optional[CurvaturePack]) -> CurvaturePack:
    return pack if pack is not None else curvature_at(g, points)


def scalar_jet(V: ScalarInput, points: np.ndarray, order: int = 2) -> ScalarJet:
    if isinstance(V, ScalarJet):
        return V.require(order)
    return V.jet(points, order).require(order)


def tensor_jet(T: TensorInput, points: np.ndarray, order: int = 2) -> TensorJet:
    if isinstance(T, TensorJet):
        return T.require(order)
    return T.jet(points, order).require(order)


# ---------------------------------------------------------------- jet-level kernels


def hessian_from_jet(pack: CurvaturePack, V: ScalarJet) -> np.ndarray:
    """nabla^2 V_ij = d_i d_j V - Gamma^k_ij d_k V."""
    assert V.grad is not None and V.hess is not None
    H = V.hess - np.einsum("nkij,nk->nij", pack.christoffel, V.grad)
    return 0.5 * (H + np.swapaxes(H, 1, 2))


def covariant_derivative_from_jet(pack: CurvaturePack, h: TensorJet) -> np.ndarray:
    """Dh[N,b,i,j] = nabla_b h_ij."""
    assert h.grad is not None
    G = pack.christoffel
    return (
        h.grad
        - np.einsum("npbi,npj->nbij", G, h.value)
        - np.einsum("npbj,nip->nbij", G, h.value)
    )


def second_covariant_derivative_from_jet(pack: CurvaturePack, h: TensorJet) -> np.ndarray:
    """D2[N,a,b,i,j] = nabla_a nabla_b h_ij."""
    assert h.grad is not None and h.hess is not None
    G = pack.christoffel
    dG = pack.christoffel_derivative
    Dh = covariant_derivative_from_jet(pack, h)
    d_Dh = (
        h.hess
        - np.einsum("napbi,npj->nabij", dG, h.value)
        - np.einsum("npbi,napj->nabij", G, h.grad)
        - np.einsum("napbj,nip->nabij", dG, h.value)
        - np.einsum("npbj,naip->nabij", G, h.grad)
    )
    return (
        d_Dh
        - np.einsum("npab,npij->nabij", G, Dh)
        - np.einsum("npai,nbpj->nabij", G, Dh)
        - np.einsum("npaj,nbip->nabij", G, Dh)
    )


def trace_from_values(pack: CurvaturePack, T: np.ndarray) -> np.ndarray:
    return np.einsum("nij,nij->n", pack.inverse, T)


def divergence_from_jet(pack: CurvaturePack, h: TensorJet) -> np.ndarray:
    """(div h)_j = g^{bi} nabla_b h_ij."""
    return np.einsum("nbi,nbij->nj", pack.inverse, covariant_derivative_from_jet(pack, h))


def double_divergence_from_second(pack: CurvaturePack, D2: np.ndarray) -> np.ndarray:
    return np.einsum("nai,nbj,nabij->n", pack.inverse, pack.inverse, D2)


def trace_laplacian_from_second(pack: CurvaturePack, D2: np.ndarray) -> np.ndarray:
    """Delta(tr h) = g^{ab} g^{ij} nabla_a nabla_b h_ij since the metric is parallel."""
    return np.einsum("nab,nij,nabij->n", pack.inverse, pack.inverse, D2)


def dot(pack: CurvaturePack, S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """S . T = g^{ia} g^{jb} S_ij T_ab."""
    return np.einsum("nia,njb,nij,nab->n", pack.inverse, pack.inverse, S, T)


def raise_index(pack: CurvaturePack, omega: np.ndarray) -> np.ndarray:
    return np.einsum("nij,nj->ni", pack.inverse, omega)


# ---------------------------------------------------------------- public operations


def hessian(
    g: MetricSpec, V: ScalarInput, points: Points, pack: Optional[CurvaturePack] = None
) -> np.ndarray:
    P = _pack(g, points, pack)
    return hessian_from_jet(P, scalar_jet(V, P.points))


def laplacian(
    g: MetricSpec, V: ScalarInput, points: Points, pack: Optional[CurvaturePack] = None
) -> np.ndarray:
    P = _pack(g, points, pack)
    return trace_from_values(P, hessian_from_jet(P, scalar_jet(V, P.points)))


def gradient(
    g: MetricSpec, V: ScalarInput, points: Points, pack: Optional[CurvaturePack] = None
) -> np.ndarray:
    """(nabla V)^i in chart components."""
    P = _pack(g, points, pack)
    jet = scalar_jet(V, P.points, 1)
    assert jet.grad is not None
    return raise_index(P, jet.grad)


def trace(
    g: MetricSpec, T: TensorInput, points: Points, pack: Optional[CurvaturePack] = None
) -> np.ndarray:
    P = _pack(g, points, pack)
    return trace_from_values(P, tensor_jet(T, P.points, 0).value)


def divergence(
    g: MetricSpec, T: TensorInput, points: Points, pack: Optional[CurvaturePack] = None
) -> np.ndarray:
    P = _pack(g, points, pack)
    return divergence_from_jet(P, tensor_jet(T, P.points, 1))


def second_covariant_derivative(
    g: MetricSpec, T: TensorInput, points: Points, pack: Optional[CurvaturePack] = None
) -> np.ndarray:
    P = _pack(g, points, pack)
    return second_covariant_derivative_from_jet(P, tensor_jet(T, P.points, 2))


def norm_squared(pack: CurvaturePack, T: np.ndarray) -> np.ndarray:
    return dot(pack, T, T)
