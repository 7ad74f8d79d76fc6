from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from core.errors import DomainError

MIN_NODES = 4


def pairwise_sum(values: np.ndarray) -> float:
    """Fixed pairwise-tree reduction; the order depends only on the length."""
    work = np.asarray(values, dtype=float).ravel()
    if work.size == 0:
        return 0.0
    while work.size > 1:
        if work.size % 2:
            work = np.append(work, 0.0)
        work = work[0::2] + work[1::2]
    return float(work[0])


@dataclass(frozen=True)
class SphereQuadrature:
    """Product rule on the unit 2-sphere: Gauss-Legendre in cos(theta_1) x trapezoid in theta_2.

    The weights integrate against the round measure d(omega) (total 4 pi).
    """

    polar: int = 48
    azimuth: int = 96

    def __post_init__(self) -> None:
        if self.polar < MIN_NODES or self.azimuth < MIN_NODES:
            raise DomainError(f"quadrature needs at least {MIN_NODES} nodes per angle")

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Angles (M, 2) and weights (M,) in a fixed node ordering."""
        x, w = leggauss(self.polar)
        theta1 = np.arccos(x[::-1])
        w1 = w[::-1]
        theta2 = 2.0 * math.pi * np.arange(self.azimuth) / self.azimuth
        w2 = np.full(self.azimuth, 2.0 * math.pi / self.azimuth)
        t1, t2 = np.meshgrid(theta1, theta2, indexing="ij")
        weights = np.outer(w1, w2).ravel()
        return np.column_stack([t1.ravel(), t2.ravel()]), weights

    def refined(self) -> "SphereQuadrature":
        return SphereQuadrature(2 * self.polar, 2 * self.azimuth)

    def integrate(self, values: np.ndarray, weights: np.ndarray) -> float:
        return pairwise_sum(np.asarray(values) * weights)


def line_nodes(a: float, b: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b]."""
    if order < MIN_NODES:
        raise DomainError(f"radial quadrature needs at least {MIN_NODES} nodes")
    if not b > a:
        raise DomainError("empty integration interval")
    x, w = leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w
