from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_bvp, solve_ivp

from asymptotics.decay import DecayFit, fit_power_law
from core.errors import DomainError, NumericalFailure
from core.schema import default_radii
from geometry.metrics import (
    ConformalMetric,
    MetricSpec,
    SeparableDiagonalMetric,
    horizon_radius,
    is_hyperbolic,
)
from geometry.potentials import (
    RadialFunction,
    RadialTriple,
    SeparableScalarField,
    SqrtOnePlusSquare,
    SumRadial,
)
from geometry.tensor_fields import MetricTensorField, ScaledTensorField
from operators.fields import PotentialField
from operators.linearized import linearized_scalar
from tensors.curvature import curvature_at

ArrayMap = Callable[[np.ndarray], np.ndarray]

REGULAR_INNER_RADIUS = 0.1
DEFAULT_OUTER_RADIUS = 400.0
BVP_TOLERANCE = 1e-10
BVP_MAX_NODES = 100_000
INITIAL_MESH = 400


def _require_radial(g: MetricSpec) -> SeparableDiagonalMetric:
    if not isinstance(g, SeparableDiagonalMetric) or not g.rotationally_symmetric:
        raise DomainError(f"{g.label} is not a rotationally symmetric family")
    return g


def inner_radius(g: MetricSpec) -> float:
    """0.1 for smooth centres; twice the horizon radius otherwise."""
    horizon = horizon_radius(g)
    return REGULAR_INNER_RADIUS if horizon == 0.0 else 2.0 * horizon


@dataclass(frozen=True)
class RadialReduction:
    """Delta v = a(r) v'' + c(r) v' for radial v on A dr^2 + B (round sphere)."""

    metric: SeparableDiagonalMetric

    @property
    def n(self) -> int:
        return self.metric.dimension

    def coefficients(self, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        A, dA, _, B, dB, _ = self.metric.profile.evaluate(r)
        a = 1.0 / A
        c = (self.n - 1) * dB / (2.0 * A * B) - dA / (2.0 * A * A)
        return a, c

    def laplacian(self, r: np.ndarray, triple: RadialTriple) -> np.ndarray:
        v, dv, ddv = triple
        a, c = self.coefficients(r)
        return a * ddv + c * dv

    def scalar_curvature(self, r: np.ndarray) -> np.ndarray:
        """R of A dr^2 + psi^2 (round sphere) with psi = sqrt(B)."""
        n = self.n
        A, dA, _, B, dB, ddB = self.metric.profile.evaluate(r)
        psi = np.sqrt(B)
        psi_r = dB / (2.0 * psi)
        psi_rr = ddB / (2.0 * psi) - dB * dB / (4.0 * psi**3)
        psi_rho = psi_r / np.sqrt(A)
        psi_rhorho = (psi_rr - psi_r * dA / (2.0 * A)) / A
        return -2.0 * (n - 1) * psi_rhorho / psi + (n - 1) * (n - 2) * (1.0 - psi_rho**2) / psi**2


@dataclass
class RadialSolution:
    """Collocation solution of a radial problem in s = asinh(r); evaluates (v, v_r, v_rr)."""

    r_min: float
    r_max: float
    solution: Any
    nodes: int
    zero: bool = False

    def _check(self, r: np.ndarray) -> None:
        if np.any(r < self.r_min * (1.0 - 1e-12)) or np.any(r > self.r_max * (1.0 + 1e-12)):
            raise DomainError(
                f"radial solution evaluated outside [{self.r_min:g}, {self.r_max:g}]"
            )

    def evaluate(self, r: np.ndarray) -> RadialTriple:
        r = np.asarray(r, dtype=float)
        if self.zero:
            zeros = np.zeros_like(r)
            return zeros, zeros.copy(), zeros.copy()
        self._check(r)
        s = np.arcsinh(r)
        y = self.solution.sol(s)
        dy = self.solution.sol.derivative()(s)
        v, v_s = y[0], y[1]
        v_ss = dy[1]
        C = np.sqrt(1.0 + r * r)
        return v, v_s / C, v_ss / (C * C) - v_s * r / C**3

    @classmethod
    def zero_solution(cls, r_min: float, r_max: float) -> "RadialSolution":
        return cls(r_min, r_max, None, 0, zero=True)


def solve_radial_bvp(
    reduction_a: ArrayMap,
    reduction_c: ArrayMap,
    k: ArrayMap,
    rhs: ArrayMap,
    *,
    r_min: float,
    r_max: float,
    robin_rate: float,
    tolerance: float = BVP_TOLERANCE,
) -> RadialSolution:
    """a v'' + c v' + k v = rhs, v'(r_min) = 0, r v'(r_max) + sigma v(r_max) = 0."""
    s_min, s_max = math.asinh(r_min), math.asinh(r_max)

    def system(s: np.ndarray, y: np.ndarray) -> np.ndarray:
        r = np.sinh(s)
        C = np.cosh(s)
        a = reduction_a(r)
        a_tilde = a / (C * C)
        b_tilde = reduction_c(r) / C - a * r / C**3
        v, v_s = y
        return np.vstack([v_s, (rhs(r) - k(r) * v - b_tilde * v_s) / a_tilde])

    def boundary(ya: np.ndarray, yb: np.ndarray) -> np.ndarray:
        return np.array(
            [ya[1], r_max * yb[1] / math.sqrt(1.0 + r_max * r_max) + robin_rate * yb[0]]
        )

    mesh = np.linspace(s_min, s_max, INITIAL_MESH)
    result = solve_bvp(
        system,
        boundary,
        mesh,
        np.zeros((2, mesh.size)),
        tol=tolerance,
        bc_tol=tolerance,
        max_nodes=BVP_MAX_NODES,
    )
    if not result.success:
        raise NumericalFailure(f"radial collocation did not converge: {result.message}")
    return RadialSolution(r_min, r_max, result, int(result.x.size))


def shooting_solve(
    reduction_a: ArrayMap,
    reduction_c: ArrayMap,
    k: ArrayMap,
    rhs: ArrayMap,
    *,
    r_min: float,
    r_max: float,
    robin_rate: float,
    check_radii: np.ndarray,
) -> np.ndarray:
    """Independent solve: backward integration from r_max, particular plus homogeneous."""
    s_min, s_max = math.asinh(r_min), math.asinh(r_max)

    def system(s: float, y: np.ndarray, forcing: float) -> np.ndarray:
        r = np.array([math.sinh(s)])
        C = math.cosh(s)
        a = float(reduction_a(r)[0])
        a_tilde = a / (C * C)
        b_tilde = float(reduction_c(r)[0]) / C - a * r[0] / C**3
        value = forcing * float(rhs(r)[0]) - float(k(r)[0]) * y[0] - b_tilde * y[1]
        return np.array([y[1], value / a_tilde])

    targets = np.sort(np.arcsinh(np.asarray(check_radii, dtype=float)))[::-1]
    evaluation = np.concatenate([[s_max], targets[targets < s_max], [s_min]])
    evaluation = np.unique(evaluation)[::-1]
    robin_slope = -robin_rate * math.sqrt(1.0 + r_max * r_max) / r_max

    def run(initial: Sequence[float], forcing: float) -> Any:
        result = solve_ivp(
            system,
            (s_max, s_min),
            np.asarray(initial, dtype=float),
            method="DOP853",
            rtol=1e-12,
            atol=1e-15,
            t_eval=evaluation,
            args=(forcing,),
        )
        if result.status != 0:
            raise NumericalFailure(f"shooting integration failed: {result.message}")
        return result

    particular = run((0.0, 0.0), 1.0)
    homogeneous = run((1.0, robin_slope), 0.0)
    scale = -particular.y[1, -1] / homogeneous.y[1, -1]
    combined = particular.y[0] + scale * homogeneous.y[0]
    lookup = dict(zip(np.round(evaluation, 14), combined))
    return np.array([lookup[round(float(s), 14)] for s in np.arcsinh(np.asarray(check_radii))])


# ---------------------------------------------------------------- eigenfunction


@dataclass(frozen=True)
class EigenfunctionResult:
    potential: PotentialField
    correction: RadialSolution
    r_min: float
    r_max: float
    residual_sup: float
    correction_decay: DecayFit
    shooting_gap: float
    positive: bool
    flags: List[str] = field(default_factory=list)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "r_min": self.r_min,
            "r_max": self.r_max,
            "residual_sup": self.residual_sup,
            "correction_decay": self.correction_decay.as_dict(),
            "shooting_gap": self.shooting_gap,
            "positive": self.positive,
            "nodes": self.correction.nodes,
            "flags": list(self.flags),
        }


def radial_eigenfunction(
    g: MetricSpec,
    which: int = 0,
    *,
    r_max: float = DEFAULT_OUTER_RADIUS,
    check_range: Tuple[float, float] = (5.0, 150.0),
    decay_radii: Optional[Sequence[float]] = None,
) -> EigenfunctionResult:
    """f_0 = sqrt(1+r^2) + v with Delta f_0 = n f_0 and v decaying at rate q - 1."""
    if which != 0:
        raise DomainError("only the radial eigenfunction f_0 is supported")
    metric = _require_radial(g)
    reduction = RadialReduction(metric)
    n = metric.dimension
    q = metric.decay_rate if metric.decay_rate is not None else float(n)
    r_min = inner_radius(metric)
    base = SqrtOnePlusSquare()

    def forcing(r: np.ndarray) -> np.ndarray:
        v0 = base.evaluate(r)
        return -(reduction.laplacian(r, v0) - n * v0[0])

    if is_hyperbolic(metric):
        correction = RadialSolution.zero_solution(r_min, r_max)
    else:
        correction = solve_radial_bvp(
            lambda r: reduction.coefficients(r)[0],
            lambda r: reduction.coefficients(r)[1],
            lambda r: np.full_like(r, -float(n)),
            forcing,
            r_min=r_min,
            r_max=r_max,
            robin_rate=q - 1.0,
        )

    profile = SumRadial((base, correction))
    f0 = SeparableScalarField(n, profile, ("one",) * (n - 1), label="f_0")
    coefficients = (1.0,) + (0.0,) * n
    potential = PotentialField(f0, "linear_growth", coefficients)

    check = np.geomspace(check_range[0], check_range[1], 64)
    triple = profile.evaluate(check)
    residual = np.abs(reduction.laplacian(check, triple) - n * triple[0])
    radii = list(decay_radii) if decay_radii is not None else default_radii()
    decay = fit_power_law(radii, correction.evaluate(np.asarray(radii))[0])

    if correction.zero:
        gap = 0.0
    else:
        shot = shooting_solve(
            lambda r: reduction.coefficients(r)[0],
            lambda r: reduction.coefficients(r)[1],
            lambda r: np.full_like(r, -float(n)),
            forcing,
            r_min=r_min,
            r_max=r_max,
            robin_rate=q - 1.0,
            check_radii=check,
        )
        gap = float(np.max(np.abs(shot - correction.evaluate(check)[0])))

    domain = np.geomspace(r_min, r_max, 512)
    positive = bool(np.all(profile.evaluate(domain)[0] > 0.0))
    flags: List[str] = []
    if decay.fitted_exponent is not None and decay.fitted_exponent < q - 1.0 - 0.1:
        flags.append("correction-decays-slower-than-q-1")
    return EigenfunctionResult(
        potential=potential,
        correction=correction,
        r_min=r_min,
        r_max=r_max,
        residual_sup=float(np.max(residual)),
        correction_decay=decay,
        shooting_gap=gap,
        positive=positive,
        flags=flags,
    )


# ---------------------------------------------------------------- conformal deformation


@dataclass(frozen=True)
class ConformalFactor:
    """e^{2w} for a radial w, so that (1 + u) g = e^{2w} g."""

    w: RadialFunction

    def evaluate(self, r: np.ndarray) -> RadialTriple:
        w, dw, ddw = self.w.evaluate(r)
        e = np.exp(2.0 * w)
        return e, 2.0 * dw * e, (2.0 * ddw + 4.0 * dw * dw) * e


@dataclass(frozen=True)
class DeformResult:
    u: SeparableScalarField
    decay_target: float
    linear_residual: float
    u_decay: Optional[DecayFit]
    newton_residuals: Tuple[float, ...]
    curvature_crosscheck: Optional[float]
    r_min: float
    r_max: float

    @property
    def contractions(self) -> Tuple[float, ...]:
        res = self.newton_residuals
        return tuple(
            (res[k] / res[k + 1]) if res[k + 1] > 0.0 else math.inf for k in range(len(res) - 1)
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "decay_target": self.decay_target,
            "linear_residual": self.linear_residual,
            "u_decay": None if self.u_decay is None else self.u_decay.as_dict(),
            "newton_residuals": list(self.newton_residuals),
            "contractions": list(self.contractions),
            "curvature_crosscheck": self.curvature_crosscheck,
            "r_min": self.r_min,
            "r_max": self.r_max,
        }


def _ray_points(n: int, r: np.ndarray) -> np.ndarray:
    angles = [0.5 * math.pi] * (n - 2) + [0.25 * math.pi]
    return np.column_stack([r] + [np.full_like(r, a) for a in angles])


def conformal_deform_radial(
    g: MetricSpec,
    phi: RadialFunction,
    *,
    decay: Optional[float] = None,
    newton_steps: int = 3,
    r_max: float = DEFAULT_OUTER_RADIUS,
    fit_radii: Optional[Sequence[float]] = None,
    check_range: Tuple[float, float] = (1.0, 100.0),
) -> DeformResult:
    """Solve (1-n)(Delta u + R u/(n-1)) = phi for decaying radial u, then Newton on R(e^{2w} g)."""
    metric = _require_radial(g)
    reduction = RadialReduction(metric)
    n = metric.dimension
    r_min = inner_radius(metric)
    radii = list(fit_radii) if fit_radii is not None else default_radii()
    phi_samples = phi.evaluate(np.asarray(radii, dtype=float))[0]
    target_fit = fit_power_law(radii, phi_samples)
    if target_fit.exact_zero:
        zero = SeparableScalarField(
            n, RadialSolution.zero_solution(r_min, r_max), ("one",) * (n - 1), label="u"
        )
        return DeformResult(zero, 0.0, 0.0, None, (0.0,) * (newton_steps + 1), 0.0, r_min, r_max)
    s = float(decay) if decay is not None else float(target_fit.fitted_exponent or 0.0)
    if not -1.0 < s < n:
        raise DomainError(f"target decay s={s:g} outside (-1, {n})")

    def a_of(r: np.ndarray) -> np.ndarray:
        return reduction.coefficients(r)[0]

    def c_of(r: np.ndarray) -> np.ndarray:
        return reduction.coefficients(r)[1]

    def curvature_of(r: np.ndarray) -> np.ndarray:
        return reduction.scalar_curvature(r)

    linear = solve_radial_bvp(
        a_of,
        c_of,
        lambda r: curvature_of(r) / (n - 1),
        lambda r: -phi.evaluate(r)[0] / (n - 1),
        r_min=r_min,
        r_max=r_max,
        robin_rate=s,
    )
    u = SeparableScalarField(n, linear, ("one",) * (n - 1), label="u")

    check = np.geomspace(max(check_range[0], r_min), min(check_range[1], r_max), 48)
    points = _ray_points(n, check)
    h = ScaledTensorField(u, MetricTensorField(metric), label="u*g")
    linear_residual = float(
        np.max(np.abs(linearized_scalar(metric, h, points) - phi.evaluate(check)[0]))
    )
    u_decay = fit_power_law(radii, linear.evaluate(np.asarray(radii))[0])

    grid = np.geomspace(r_min, r_max, 600)

    def nonlinear(w: RadialFunction, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(N(w), R_gamma) with N = R(e^{2w} g) - R_g - phi."""
        triple = w.evaluate(r)
        a, _ = reduction.coefficients(r)
        R = curvature_of(r)
        lap = reduction.laplacian(r, triple)
        r_gamma = np.exp(-2.0 * triple[0]) * (
            R - 2.0 * (n - 1) * lap - (n - 1) * (n - 2) * a * triple[1] ** 2
        )
        return r_gamma - R - phi.evaluate(r)[0], r_gamma

    terms: List[RadialSolution] = []
    residuals: List[float] = []
    for _ in range(newton_steps):
        current = SumRadial(tuple(terms))
        residuals.append(float(np.max(np.abs(nonlinear(current, grid)[0]))))

        def k_step(r: np.ndarray, current: SumRadial = current) -> np.ndarray:
            w = current.evaluate(r)[0]
            return nonlinear(current, r)[1] * np.exp(2.0 * w) / (n - 1)

        def c_step(r: np.ndarray, current: SumRadial = current) -> np.ndarray:
            a, c = reduction.coefficients(r)
            return c + (n - 2) * a * current.evaluate(r)[1]

        def rhs_step(r: np.ndarray, current: SumRadial = current) -> np.ndarray:
            w = current.evaluate(r)[0]
            return nonlinear(current, r)[0] * np.exp(2.0 * w) / (2.0 * (n - 1))

        terms.append(
            solve_radial_bvp(a_of, c_step, k_step, rhs_step, r_min=r_min, r_max=r_max, robin_rate=s)
        )
    final = SumRadial(tuple(terms))
    residuals.append(float(np.max(np.abs(nonlinear(final, grid)[0]))))

    crosscheck: Optional[float] = None
    if newton_steps > 0:
        factor = SeparableScalarField(n, ConformalFactor(final), ("one",) * (n - 1), label="1+u")
        deformed = ConformalMetric(metric, factor)
        scalar = curvature_at(deformed, points).scalar
        crosscheck = float(
            np.max(np.abs(scalar - curvature_of(check) - phi.evaluate(check)[0]))
        )
    return DeformResult(
        u=u,
        decay_target=s,
        linear_residual=linear_residual,
        u_decay=u_decay,
        newton_residuals=tuple(residuals),
        curvature_crosscheck=crosscheck,
        r_min=r_min,
        r_max=r_max,
    )
