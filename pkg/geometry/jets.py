from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Protocol

import numpy as np

FD_RELATIVE_STEP = 1e-5

ArrayFn = Callable[[np.ndarray], np.ndarray]
StepRule = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScalarJet:
    """Scalar field with coordinate derivatives on a batch: (N,), (N, n), (N, n, n)."""

    value: np.ndarray
    grad: Optional[np.ndarray] = None
    hess: Optional[np.ndarray] = None

    def require(self, order: int) -> "ScalarJet":
        if order >= 1 and self.grad is None:
            raise ValueError("scalar jet lacks first derivatives")
        if order >= 2 and self.hess is None:
            raise ValueError("scalar jet lacks second derivatives")
        return self


@dataclass(frozen=True)
class TensorJet:
    """Symmetric 2-tensor with derivatives: value[N,i,j], grad[N,m,i,j], hess[N,a,b,i,j]."""

    value: np.ndarray
    grad: Optional[np.ndarray] = None
    hess: Optional[np.ndarray] = None

    def require(self, order: int) -> "TensorJet":
        if order >= 1 and self.grad is None:
            raise ValueError("tensor jet lacks first derivatives")
        if order >= 2 and self.hess is None:
            raise ValueError("tensor jet lacks second derivatives")
        return self

    def __add__(self, other: "TensorJet") -> "TensorJet":
        return TensorJet(
            value=self.value + other.value,
            grad=_add_optional(self.grad, other.grad),
            hess=_add_optional(self.hess, other.hess),
        )

    def __sub__(self, other: "TensorJet") -> "TensorJet":
        return TensorJet(
            value=self.value - other.value,
            grad=_sub_optional(self.grad, other.grad),
            hess=_sub_optional(self.hess, other.hess),
        )

    def scaled(self, factor: float) -> "TensorJet":
        return TensorJet(
            value=factor * self.value,
            grad=None if self.grad is None else factor * self.grad,
            hess=None if self.hess is None else factor * self.hess,
        )


def _add_optional(a: Optional[np.ndarray], b: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if a is None or b is None:
        return None
    return a + b


def _sub_optional(a: Optional[np.ndarray], b: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if a is None or b is None:
        return None
    return a - b


class ScalarField(Protocol):
    dimension: int
    label: str

    def jet(self, points: np.ndarray, order: int = 2) -> ScalarJet:
        """Value and coordinate derivatives up to ``order`` on a batch of points."""


class TensorField(Protocol):
    dimension: int
    label: str
    derivative_mode: str

    def jet(self, points: np.ndarray, order: int = 2) -> TensorJet:
        """Components and coordinate derivatives up to ``order`` on a batch of points."""


def chart_step_rule(points: np.ndarray) -> np.ndarray:
    """delta = 1e-5 (1 + r) along the radial coordinate and 1e-5 along angles."""
    steps = np.full(points.shape, FD_RELATIVE_STEP)
    steps[:, 0] = FD_RELATIVE_STEP * (1.0 + np.abs(points[:, 0]))
    return steps


def cartesian_step_rule(points: np.ndarray) -> np.ndarray:
    radius = np.linalg.norm(points, axis=1, keepdims=True)
    return np.broadcast_to(FD_RELATIVE_STEP * (1.0 + radius), points.shape).copy()


def finite_difference_jet(
    fn: ArrayFn,
    points: np.ndarray,
    *,
    order: int = 2,
    step_rule: StepRule = chart_step_rule,
) -> tuple[np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
    """Central differences for any array-valued fn(points) -> (N, ...).

    Returns (value, grad, hess) with derivative axes inserted after the batch axis.
    All shifted points go through ``fn`` in one batched call.
    """
    Y = np.asarray(points, dtype=float)
    count, n = Y.shape
    steps = step_rule(Y)
    shifts = [np.zeros_like(Y)]
    if order >= 1:
        for m in range(n):
            for sign in (1.0, -1.0):
                shift = np.zeros_like(Y)
                shift[:, m] = sign * steps[:, m]
                shifts.append(shift)
    pairs = []
    if order >= 2:
        for a in range(n):
            for b in range(a + 1, n):
                pairs.append((a, b))
                for sa, sb in ((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)):
                    shift = np.zeros_like(Y)
                    shift[:, a] = sa * steps[:, a]
                    shift[:, b] = sb * steps[:, b]
                    shifts.append(shift)
    stacked = np.concatenate([Y + shift for shift in shifts], axis=0)
    evaluated = np.asarray(fn(stacked), dtype=float)
    blocks = evaluated.reshape((len(shifts), count) + evaluated.shape[1:])
    value = blocks[0]
    if order < 1:
        return value, None, None

    tail_shape = value.shape[1:]
    expand = (slice(None),) + (None,) * len(tail_shape)
    grad = np.empty((count, n) + tail_shape)
    second_diag = np.empty((count, n) + tail_shape)
    for m in range(n):
        plus = blocks[1 + 2 * m]
        minus = blocks[2 + 2 * m]
        delta = steps[:, m][expand]
        grad[:, m] = (plus - minus) / (2.0 * delta)
        second_diag[:, m] = (plus - 2.0 * value + minus) / (delta * delta)
    if order < 2:
        return value, grad, None

    hess = np.empty((count, n, n) + tail_shape)
    for m in range(n):
        hess[:, m, m] = second_diag[:, m]
    base = 1 + 2 * n
    for index, (a, b) in enumerate(pairs):
        pp, pm, mp, mm = (blocks[base + 4 * index + k] for k in range(4))
        delta_a = steps[:, a][expand]
        delta_b = steps[:, b][expand]
        mixed = (pp - pm - mp + mm) / (4.0 * delta_a * delta_b)
        hess[:, a, b] = mixed
        hess[:, b, a] = mixed
    return value, grad, hess
