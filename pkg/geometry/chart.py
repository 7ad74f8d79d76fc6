from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.errors import DomainError

POLE_BAND = 1e-3
TWO_PI = 2.0 * math.pi


def as_batch(points: np.ndarray) -> np.ndarray:
    array = np.asarray(points, dtype=float)
    if array.ndim == 1:
        array = array[None, :]
    if array.ndim != 2:
        raise DomainError(f"expected a batch of points with shape (N, n), got {array.shape}")
    return array


@dataclass(frozen=True)
class ChartPoint:
    """Point of the hyperboloid chart: y = (r, theta_1, ..., theta_{n-1})."""

    r: float
    angles: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.angles) < 2:
            raise DomainError("dimension must be at least 3 (two or more angles)")
        if not self.r > 0.0 or not math.isfinite(self.r):
            raise DomainError(f"radial coordinate must be positive, got {self.r}")
        for index, theta in enumerate(self.angles[:-1], start=1):
            if not 0.0 <= theta <= math.pi:
                raise DomainError(f"theta_{index}={theta} outside [0, pi]")
        last = self.angles[-1]
        if not 0.0 <= last < TWO_PI:
            raise DomainError(f"theta_{len(self.angles)}={last} outside [0, 2pi)")

    @property
    def n(self) -> int:
        return len(self.angles) + 1

    def coords(self) -> np.ndarray:
        return np.array((self.r,) + tuple(self.angles), dtype=float)

    def cartesian(self) -> np.ndarray:
        return spherical_to_cartesian(self.coords())[0]

    def is_off_pole(self, band: float = POLE_BAND) -> bool:
        return bool(off_pole_mask(self.coords(), band)[0])

    @classmethod
    def from_coords(cls, coords: np.ndarray) -> "ChartPoint":
        values = np.asarray(coords, dtype=float).ravel()
        return cls(r=float(values[0]), angles=tuple(float(v) for v in values[1:]))

    @classmethod
    def from_cartesian(cls, x: np.ndarray) -> "ChartPoint":
        return cls.from_coords(cartesian_to_spherical(np.asarray(x, dtype=float))[0])


def unit_direction_factors(angles: np.ndarray) -> np.ndarray:
    """x_hat components as products of sines and cosines, shape (N, n)."""
    theta = np.atleast_2d(np.asarray(angles, dtype=float))
    count, dim_minus_one = theta.shape
    n = dim_minus_one + 1
    factors = np.ones((count, n))
    running = np.ones(count)
    for k in range(n - 1):
        factors[:, k] = running * np.cos(theta[:, k])
        running = running * np.sin(theta[:, k])
    factors[:, n - 1] = running
    return factors


def spherical_to_cartesian(points: np.ndarray) -> np.ndarray:
    Y = as_batch(points)
    return Y[:, :1] * unit_direction_factors(Y[:, 1:])


def cartesian_to_spherical(points: np.ndarray) -> np.ndarray:
    X = as_batch(points)
    count, n = X.shape
    if n < 3:
        raise DomainError("dimension must be at least 3")
    Y = np.empty_like(X)
    Y[:, 0] = np.linalg.norm(X, axis=1)
    for k in range(n - 2):
        tail = np.linalg.norm(X[:, k + 1 :], axis=1)
        Y[:, k + 1] = np.arctan2(tail, X[:, k])
    Y[:, n - 1] = np.mod(np.arctan2(X[:, n - 1], X[:, n - 2]), TWO_PI)
    return Y


def chart_jacobian(points: np.ndarray) -> np.ndarray:
    """dx/dy for the spherical chart; J[:, i, mu] = d x_i / d y_mu."""
    Y = as_batch(points)
    count, n = Y.shape
    r = Y[:, 0]
    theta = Y[:, 1:]
    sines = np.sin(theta)
    cosines = np.cos(theta)
    J = np.zeros((count, n, n))
    J[:, :, 0] = unit_direction_factors(theta)
    for i in range(n):
        # x_i = r * prod_{c<i} sin(theta_c) * (cos(theta_i) if i < n-1 else 1)
        for k in range(min(i + 1, n - 1)):
            product = r.copy()
            for c in range(i):
                product = product * (cosines[:, c] if c == k else sines[:, c])
            if i < n - 1:
                product = product * (-sines[:, i] if i == k else cosines[:, i])
            J[:, i, k + 1] = product
    return J


def off_pole_mask(points: np.ndarray, band: float = POLE_BAND) -> np.ndarray:
    Y = as_batch(points)
    polar = Y[:, 1:-1]
    if polar.shape[1] == 0:
        return np.ones(Y.shape[0], dtype=bool)
    return np.all((polar > band) & (polar < math.pi - band), axis=1)


def angular_grid(n: int, per_angle: int = 32, band: float = POLE_BAND) -> np.ndarray:
    """Fixed off-pole angular sample grid with per_angle**(n-1) directions, shape (M, n-1)."""
    if n < 3:
        raise DomainError("dimension must be at least 3")
    if per_angle < 2:
        raise DomainError("angular grid needs at least 2 samples per angle")
    polar = band + (math.pi - 2.0 * band) * (np.arange(per_angle) + 0.5) / per_angle
    azimuth = TWO_PI * np.arange(per_angle) / per_angle
    axes = [polar] * (n - 2) + [azimuth]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([axis.ravel() for axis in mesh], axis=1)


def shell_points(radius: float, angles: np.ndarray) -> np.ndarray:
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    return np.column_stack([np.full(angles.shape[0], float(radius)), angles])


def random_chart_points(
    rng: np.random.Generator,
    n: int,
    count: int,
    *,
    r_range: Tuple[float, float] = (0.2, 10.0),
    band: float = POLE_BAND,
) -> np.ndarray:
    """Uniform in r and in angles, restricted off the pole band."""
    if n < 3:
        raise DomainError("dimension must be at least 3")
    r = rng.uniform(r_range[0], r_range[1], size=count)
    polar = rng.uniform(band, math.pi - band, size=(count, n - 2))
    azimuth = rng.uniform(0.0, TWO_PI, size=(count, 1))
    return np.column_stack([r, polar, azimuth])


def point_batch(points: "ChartPoint | np.ndarray") -> np.ndarray:
    """Accept a ChartPoint or an (N, n) array."""
    if isinstance(points, ChartPoint):
        return points.coords()[None, :]
    return as_batch(points)
