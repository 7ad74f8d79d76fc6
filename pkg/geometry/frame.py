from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from geometry.chart import ChartPoint, as_batch
from geometry.metrics import MetricSpec, hyperbolic_metric


def frame_matrix(points: np.ndarray) -> np.ndarray:
    """Background orthonormal frame, Y[N, a, mu] = chart component mu of e_a.

    e_1 = sqrt(1+r^2) d_r and e_{j+1} = d_{theta_j} / (r sqrt(s_j)), s_j = prod_{c<j} sin^2(theta_c).
    """
    Y = as_batch(points)
    count, n = Y.shape
    r = Y[:, 0]
    frame = np.zeros((count, n, n))
    frame[:, 0, 0] = np.sqrt(1.0 + r * r)
    sine_product = np.ones(count)
    for j in range(n - 1):
        frame[:, j + 1, j + 1] = 1.0 / (r * sine_product)
        sine_product = sine_product * np.abs(np.sin(Y[:, j + 1]))
    return frame


def frame_components(tensor: np.ndarray, points: np.ndarray) -> np.ndarray:
    """kappa(e_a, e_b) for chart components tensor[N, mu, nu]."""
    frame = frame_matrix(points)
    T = np.asarray(tensor, dtype=float)
    if T.ndim == 2:
        T = T[None]
    return np.einsum("nam,nmv,nbv->nab", frame, T, frame)


def frame_vector_components(covector: np.ndarray, points: np.ndarray) -> np.ndarray:
    """omega(e_a) for chart components omega[N, mu]."""
    return np.einsum("nam,nm->na", frame_matrix(points), np.atleast_2d(covector))


@dataclass(frozen=True)
class FramePoint:
    point: ChartPoint
    frame: np.ndarray
    g_values: np.ndarray
    b_values: np.ndarray

    def orthonormality_error(self) -> float:
        gram = self.frame @ self.b_values @ self.frame.T
        return float(np.max(np.abs(gram - np.eye(self.point.n))))


def frame_at(point: ChartPoint, g: Optional[MetricSpec] = None) -> FramePoint:
    coords = point.coords()[None, :]
    b = hyperbolic_metric(point.n).jet(coords, 0).value[0]
    g_values = b if g is None else g.jet(coords, 0).value[0]
    return FramePoint(
        point=point,
        frame=frame_matrix(coords)[0],
        g_values=np.array(g_values, copy=True),
        b_values=np.array(b, copy=True),
    )
