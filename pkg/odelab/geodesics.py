from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from core.errors import DomainError, NumericalFailure
from geometry.chart import ChartPoint, cartesian_to_spherical, chart_jacobian, off_pole_mask
from geometry.metrics import MetricSpec, SeparableDiagonalMetric
from tensors.curvature import christoffel_from_jet

SEGMENT = 0.1
RTOL = 1e-12
ATOL = 1e-13
DRIFT_LIMIT = 1e-8


def _inner(g_values: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("bij,bi,bj->b", g_values, a, b)


def _orthonormalize(g_values: np.ndarray, velocity: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """Gram-Schmidt of the frame vectors against the unit velocity and each other."""
    out = frame.copy()
    for a in range(out.shape[1]):
        vec = out[:, a]
        vec = vec - _inner(g_values, vec, velocity)[:, None] * velocity
        for c in range(a):
            vec = vec - _inner(g_values, vec, out[:, c])[:, None] * out[:, c]
        out[:, a] = vec / np.sqrt(_inner(g_values, vec, vec))[:, None]
    return out


@dataclass(frozen=True)
class GeodesicSample:
    """Batched arc-length geodesics; arrays are indexed [seed, time, ...]."""

    metric_label: str
    coordinates: str
    t: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    frames: Optional[np.ndarray]
    drift: np.ndarray

    @property
    def seeds(self) -> int:
        return int(self.positions.shape[0])

    def radius(self) -> np.ndarray:
        if self.coordinates == "cartesian":
            return np.linalg.norm(self.positions, axis=2)
        return self.positions[:, :, 0]

    def comparability(self, start: float = 1.0) -> np.ndarray:
        """Per seed, the smallest C with C^-1 e^t <= |gamma(t)| <= C e^t for t >= start."""
        late = self.t >= start
        r = self.radius()[:, late]
        growth = np.exp(self.t[late])[None, :]
        return np.maximum(np.max(r / growth, axis=1), np.max(growth / r, axis=1))

    def arcsinh_offset(self) -> np.ndarray:
        """asinh|gamma(t)| - t; constant along hyperbolic radial rays."""
        return np.arcsinh(self.radius()) - self.t[None, :]

    def as_dict(self) -> Dict[str, Any]:
        offsets = self.arcsinh_offset()
        return {
            "metric": self.metric_label,
            "coordinates": self.coordinates,
            "seeds": self.seeds,
            "horizon": float(self.t[-1]),
            "max_drift": float(np.max(self.drift)),
            "comparability": self.comparability().tolist(),
            "offset_spread": (np.max(offsets, axis=1) - np.min(offsets, axis=1)).tolist(),
        }


def integrate_geodesics(
    g: MetricSpec,
    starts: np.ndarray,
    directions: np.ndarray,
    horizon: float,
    *,
    frames: Optional[np.ndarray] = None,
    segment: float = SEGMENT,
    drift_limit: float = DRIFT_LIMIT,
) -> GeodesicSample:
    """Unit-speed geodesics in g's own coordinates, optionally parallel-transporting frames[B, m, n].

    Integration runs in segments; after each one the velocity is renormalized in g
    and the frame is re-orthonormalized. A renormalization larger than drift_limit fails.
    """
    X0 = np.atleast_2d(np.asarray(starts, dtype=float))
    V0 = np.atleast_2d(np.asarray(directions, dtype=float))
    B, n = X0.shape
    if V0.shape != (B, n):
        raise DomainError("one direction per start point is required")
    if horizon <= 0.0:
        raise DomainError("geodesic horizon must be positive")
    g.check_domain(X0)
    g0 = g.jet(X0, 0).value
    V0 = V0 / np.sqrt(_inner(g0, V0, V0))[:, None]
    m = 0 if frames is None else frames.shape[1]
    F0 = None if frames is None else _orthonormalize(g0, V0, np.asarray(frames, dtype=float))

    def rhs(_: float, y: np.ndarray) -> np.ndarray:
        state = y.reshape(B, 2 + m, n)
        x, v = state[:, 0], state[:, 1]
        g.check_domain(x)
        _, gamma, _ = christoffel_from_jet(g.jet(x, 1))
        out = np.empty_like(state)
        out[:, 0] = v
        out[:, 1] = -np.einsum("bkij,bi,bj->bk", gamma, v, v)
        for a in range(m):
            out[:, 2 + a] = -np.einsum("bkij,bi,bj->bk", gamma, v, state[:, 2 + a])
        return out.ravel()

    steps = max(1, int(math.ceil(horizon / segment - 1e-12)))
    t = np.linspace(0.0, horizon, steps + 1)
    positions = np.empty((B, steps + 1, n))
    velocities = np.empty((B, steps + 1, n))
    transported = None if m == 0 else np.empty((B, steps + 1, m, n))
    drift = np.zeros(B)

    x, v, frame = X0, V0, F0
    positions[:, 0], velocities[:, 0] = x, v
    if transported is not None and frame is not None:
        transported[:, 0] = frame
    for k in range(steps):
        state = np.concatenate(
            [x[:, None], v[:, None]] + ([frame] if frame is not None else []), axis=1
        )
        result = solve_ivp(
            rhs, (t[k], t[k + 1]), state.ravel(), method="DOP853", rtol=RTOL, atol=ATOL
        )
        if result.status == -1:
            raise NumericalFailure(f"geodesic integration failed: {result.message}")
        end = result.y[:, -1].reshape(B, 2 + m, n)
        x, v = end[:, 0], end[:, 1]
        g_end = g.jet(x, 0).value
        speed = np.sqrt(_inner(g_end, v, v))
        drift = np.maximum(drift, np.abs(speed - 1.0))
        v = v / speed[:, None]
        positions[:, k + 1], velocities[:, k + 1] = x, v
        if m:
            frame = _orthonormalize(g_end, v, end[:, 2:])
            assert transported is not None
            transported[:, k + 1] = frame
    if np.any(drift > drift_limit):
        raise NumericalFailure(f"unit-speed drift {float(np.max(drift)):.3g} exceeds {drift_limit:g}")
    return GeodesicSample(
        metric_label=g.label,
        coordinates=g.coordinates,
        t=t,
        positions=positions,
        velocities=velocities,
        frames=transported,
        drift=drift,
    )


def cartesian_form(g: MetricSpec) -> MetricSpec:
    """The pole-free Cartesian view for rotationally symmetric families, else g itself."""
    if isinstance(g, SeparableDiagonalMetric) and g.rotationally_symmetric:
        return g.cartesian_view()
    return g


def integrate_geodesic(
    g: MetricSpec,
    p: ChartPoint,
    direction: np.ndarray,
    horizon: float,
    *,
    segment: float = SEGMENT,
) -> GeodesicSample:
    """Single geodesic from a chart point with a chart-coordinate direction."""
    target = cartesian_form(g)
    y = p.coords()[None, :]
    d = np.asarray(direction, dtype=float)[None, :]
    if target.coordinates == "cartesian":
        J = chart_jacobian(y)
        return integrate_geodesics(
            target, p.cartesian()[None, :], np.einsum("bim,bm->bi", J, d), horizon, segment=segment
        )
    return integrate_geodesics(target, y, d, horizon, segment=segment)


def chart_seeds(starts: np.ndarray, directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Cartesian start points and directions expressed in the hyperboloid chart."""
    X = np.atleast_2d(np.asarray(starts, dtype=float))
    D = np.atleast_2d(np.asarray(directions, dtype=float))
    Y = cartesian_to_spherical(X)
    if not np.all(off_pole_mask(Y)):
        raise DomainError("seed lies on the polar axis of the hyperboloid chart")
    velocities = np.linalg.solve(chart_jacobian(Y), D[:, :, None])[:, :, 0]
    return Y, velocities


def radial_seed(n: int, radius: float, direction: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Cartesian start radius * u and outward direction u for a unit vector u."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    if u.shape != (n,):
        raise DomainError(f"direction must have {n} components")
    return radius * u, u


def fibonacci_directions(count: int, n: int = 3, seed: int = 0) -> np.ndarray:
    """Nearly uniform unit vectors: a Fibonacci spiral on S^2, seeded Gaussian draws otherwise."""
    if count < 1:
        raise DomainError("at least one direction is required")
    if n != 3:
        rng = np.random.default_rng(seed)
        draws = rng.standard_normal((count, n))
        return draws / np.linalg.norm(draws, axis=1)[:, None]
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    phi = math.pi * (3.0 - math.sqrt(5.0)) * k
    rho = np.sqrt(1.0 - z * z)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def reversal_gap(g: MetricSpec, start: np.ndarray, direction: np.ndarray, horizon: float) -> float:
    """Distance (coordinate sup norm) between the start and the result of going out and back."""
    forward = integrate_geodesics(g, start, direction, horizon)
    end = forward.positions[:, -1]
    back = integrate_geodesics(g, end, -forward.velocities[:, -1], horizon)
    return float(np.max(np.abs(back.positions[:, -1] - np.atleast_2d(start))))

