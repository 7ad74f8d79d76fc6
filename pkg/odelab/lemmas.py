from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

from core.errors import DomainError, NumericalFailure

GRID_STEP = 0.05
RTOL = 1e-12
ATOL = 1e-14
EXHAUSTION_TOLERANCE = 1e-10
DEFAULT_J_MAX = 40
TAIL_PAD = (8.0, 10.0)


@dataclass(frozen=True)
class CoefficientTerm:
    """amplitude * exp(-rate t) * cos(frequency t)."""

    amplitude: float
    rate: float = 0.0
    frequency: float = 0.0

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        return self.amplitude * np.exp(-self.rate * t) * np.cos(self.frequency * t)


@dataclass(frozen=True)
class Coefficient:
    terms: Tuple[CoefficientTerm, ...] = ()

    @classmethod
    def of(cls, *terms: Tuple[float, float, float]) -> "Coefficient":
        return cls(tuple(CoefficientTerm(*term) for term in terms))

    @property
    def is_zero(self) -> bool:
        return all(term.amplitude == 0.0 for term in self.terms)

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for term in self.terms:
            total = total + term.evaluate(t)
        return total

    def bound(self) -> Tuple[float, float]:
        """(C_0, d) with |coefficient| <= C_0 exp(-d t); d = inf for the zero coefficient."""
        active = [term for term in self.terms if term.amplitude != 0.0]
        if not active:
            return 0.0, math.inf
        return sum(abs(term.amplitude) for term in active), min(term.rate for term in active)


@dataclass(frozen=True)
class ODEProblem:
    """u'' = P u' + (shift + Q) u + f on [0, horizon]."""

    P: Coefficient = field(default_factory=Coefficient)
    Q: Coefficient = field(default_factory=Coefficient)
    f: Coefficient = field(default_factory=Coefficient)
    shift: float = 1.0
    horizon: float = 20.0

    def __post_init__(self) -> None:
        if self.horizon <= 0.0:
            raise DomainError("ODE horizon must be positive")

    def grid(self, horizon: Optional[float] = None) -> np.ndarray:
        T = self.horizon if horizon is None else horizon
        return GRID_STEP * np.arange(int(round(T / GRID_STEP)) + 1)

    def homogeneous(self) -> "ODEProblem":
        return replace(self, f=Coefficient())

    def with_horizon(self, horizon: float) -> "ODEProblem":
        return replace(self, horizon=horizon)

    def bounds(self) -> Tuple[float, float]:
        """(C_0, d) covering P, Q and f together."""
        parts = [c.bound() for c in (self.P, self.Q, self.f)]
        return max(p[0] for p in parts), min(p[1] for p in parts)

    def check_hypotheses(self, horizon: Optional[float] = None) -> None:
        t = self.grid(horizon)
        if np.any(self.shift + self.Q.evaluate(t) <= 0.0):
            raise DomainError("shift + Q must stay positive on the grid")
        C0, d = self.bounds()
        if math.isfinite(d):
            envelope = C0 * np.exp(-d * t) * (1.0 + 1e-12)
            for name, coefficient in (("P", self.P), ("Q", self.Q), ("f", self.f)):
                if np.any(np.abs(coefficient.evaluate(t)) > envelope):
                    raise DomainError(f"claimed bound fails for {name}")

    def rhs(self, t: float, y: np.ndarray, forcing: float = 1.0) -> np.ndarray:
        tt = np.array([t])
        u, du = y
        ddu = (
            self.P.evaluate(tt)[0] * du
            + (self.shift + self.Q.evaluate(tt)[0]) * u
            + forcing * self.f.evaluate(tt)[0]
        )
        return np.array([du, ddu])

    def as_dict(self) -> Dict[str, Any]:
        def terms(c: Coefficient) -> List[Dict[str, float]]:
            return [
                {"amplitude": x.amplitude, "rate": x.rate, "frequency": x.frequency}
                for x in c.terms
            ]

        C0, d = self.bounds()
        return {
            "P": terms(self.P),
            "Q": terms(self.Q),
            "f": terms(self.f),
            "shift": self.shift,
            "horizon": self.horizon,
            "bounds": {"C0": C0, "d": d if math.isfinite(d) else None},
        }


@dataclass(frozen=True)
class OdeSolution:
    t: np.ndarray
    u: np.ndarray
    du: np.ndarray

    def scaled(self, factor: float) -> "OdeSolution":
        return OdeSolution(self.t, self.u * factor, self.du * factor)


def _integrate(
    prob: ODEProblem, span: Tuple[float, float], y0: Sequence[float], t_eval: np.ndarray, forcing: float
) -> Any:
    result = solve_ivp(
        prob.rhs,
        span,
        np.asarray(y0, dtype=float),
        method="DOP853",
        rtol=RTOL,
        atol=ATOL,
        t_eval=t_eval,
        args=(forcing,),
    )
    if result.status == -1:
        raise NumericalFailure(f"ODE integration failed: {result.message}")
    return result


def solve_initial_value(
    prob: ODEProblem, u0: float, du0: float, horizon: Optional[float] = None
) -> OdeSolution:
    t = prob.grid(horizon)
    result = _integrate(prob, (0.0, float(t[-1])), (u0, du0), t, 1.0)
    return OdeSolution(result.t, result.y[0], result.y[1])


def exhaustion_member(prob: ODEProblem, j: float, horizon: Optional[float] = None) -> OdeSolution:
    """Homogeneous solution with u(j) = 0, u'(j) = -1, rescaled to u(0) = 1 on [0, horizon]."""
    T = min(prob.horizon if horizon is None else horizon, j)
    t = prob.grid(T)
    homogeneous = prob.homogeneous()
    ordered = np.concatenate([[float(j)], t[::-1]]) if t[-1] < j else t[::-1]
    result = _integrate(homogeneous, (float(j), 0.0), (0.0, -1.0), ordered, 0.0)
    u = result.y[0][::-1][: t.size]
    du = result.y[1][::-1][: t.size]
    if u[0] <= 0.0:
        raise NumericalFailure(f"exhaustion member j={j:g} is not positive at t=0")
    return OdeSolution(t, u / u[0], du / u[0])


@dataclass(frozen=True)
class DecayingSolution:
    solution: OdeSolution
    j: int
    differences: Tuple[float, ...]
    monotone: bool = True

    @property
    def positive(self) -> bool:
        return bool(np.all(self.solution.u > 0.0))

    @property
    def decreasing(self) -> bool:
        return bool(np.all(self.solution.du < 0.0))


def build_decaying_solution(
    prob: ODEProblem,
    horizon: Optional[float] = None,
    *,
    j_max: int = DEFAULT_J_MAX,
    tolerance: float = EXHAUSTION_TOLERANCE,
) -> DecayingSolution:
    """Limit of the two-point solutions u_j(0) = 1, u_j(j) = 0 as j grows.

    Each u_j is integrated backward from (u, u') = (0, -1) at t = j and rescaled, which solves
    the two-point problem without a shooting search. monotone records u_j <= u_{j+1} on the
    grid up to the exhaustion tolerance.
    """
    T = prob.horizon if horizon is None else horizon
    prob.homogeneous().check_hypotheses(T)
    j = int(math.ceil(T)) + 1
    if j_max <= j:
        raise DomainError(f"j_max={j_max} leaves no room beyond the horizon {T:g}")
    previous = exhaustion_member(prob, j, T)
    differences: List[float] = []
    monotone = True
    for j in range(j + 1, j_max + 1):
        current = exhaustion_member(prob, j, T)
        signed = (current.u - previous.u) / np.abs(current.u)
        monotone = monotone and bool(np.min(signed) > -tolerance)
        gap = float(np.max(np.abs(signed)))
        differences.append(gap)
        if gap < tolerance:
            return DecayingSolution(current, j, tuple(differences), monotone)
        previous = current
    raise NumericalFailure(f"exhaustion did not settle below {tolerance:g} by j={j_max}")


@dataclass(frozen=True)
class FundamentalPair:
    t: np.ndarray
    u1: np.ndarray
    du1: np.ndarray
    u2: np.ndarray
    du2: np.ndarray
    certificate: float
    j: int

    @property
    def wronskian(self) -> np.ndarray:
        return self.u1 * self.du2 - self.u2 * self.du1

    @property
    def wronskian_bound_holds(self) -> bool:
        bound = -2.0 / self.certificate**2
        return bool(np.all(self.wronskian <= bound + 1e-9 * abs(bound)))

    def rows(self) -> List[Tuple[float, float, float, float]]:
        W = self.wronskian
        return [
            (float(a), float(b), float(c), float(d))
            for a, b, c, d in zip(self.t, self.u1, self.u2, W)
        ]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "horizon": float(self.t[-1]),
            "certificate": self.certificate,
            "wronskian_max": float(np.max(self.wronskian)),
            "wronskian_bound": -2.0 / self.certificate**2,
            "wronskian_bound_holds": self.wronskian_bound_holds,
            "exhaustion_j": self.j,
        }


def fundamental_pair(
    prob: ODEProblem, horizon: Optional[float] = None, *, j_max: int = DEFAULT_J_MAX
) -> FundamentalPair:
    """u_1 growing from (1, 1), u_2 the decaying solution; C the smallest two-sided grid bound."""
    T = prob.horizon if horizon is None else horizon
    homogeneous = prob.homogeneous()
    homogeneous.check_hypotheses(T)
    first = solve_initial_value(homogeneous, 1.0, 1.0, T)
    decaying = build_decaying_solution(prob, T, j_max=j_max)
    t = first.t
    growth = np.exp(t)
    u1, u2 = first.u, decaying.solution.u
    if np.any(u1 <= 0.0) or np.any(u2 <= 0.0):
        raise NumericalFailure("fundamental solutions must stay positive")
    ratios = np.concatenate([u1 / growth, growth / u1, u2 * growth, 1.0 / (u2 * growth)])
    return FundamentalPair(
        t=t,
        u1=u1,
        du1=first.du,
        u2=u2,
        du2=decaying.solution.du,
        certificate=float(np.max(ratios)),
        j=decaying.j,
    )


@dataclass(frozen=True)
class ParticularSolution:
    t: np.ndarray
    u: np.ndarray
    c1: float
    c2: float
    remainder: np.ndarray
    rate: float
    fitted_rate: Optional[float]
    profile_constant: Optional[float]
    fit_residual: float
    tail_change: float

    def as_dict(self) -> Dict[str, Any]:
        return {
            "c1": self.c1,
            "c2": self.c2,
            "rate": self.rate if math.isfinite(self.rate) else None,
            "fitted_rate": self.fitted_rate,
            "profile_constant": self.profile_constant,
            "fit_residual": self.fit_residual,
            "tail_change": self.tail_change,
        }


def _tail_integral(t: np.ndarray, values: np.ndarray) -> np.ndarray:
    """int_t^end of sampled values, accumulated from the far end."""
    segments = 0.5 * (values[1:] + values[:-1]) * np.diff(t)
    return np.concatenate([np.cumsum(segments[::-1])[::-1], [0.0]])


def _variation_of_parameters(prob: ODEProblem, horizon: float, j_max: int) -> Tuple[np.ndarray, ...]:
    pair = fundamental_pair(prob, horizon, j_max=j_max)
    t = pair.t
    W = pair.wronskian
    forcing = prob.f.evaluate(t)
    alpha1 = _tail_integral(t, pair.u2 * forcing / W)
    alpha2 = cumulative_trapezoid(pair.u1 * forcing / W, t, initial=0.0)
    beyond = _tail_integral(t, pair.u1 * forcing / W)
    return t, pair.u1, pair.u2, alpha1, alpha2, beyond


def particular_solution(
    prob: ODEProblem, *, j_max: int = DEFAULT_J_MAX, tail_tolerance: float = 1e-6
) -> ParticularSolution:
    """u_p = u_1 a_1 + u_2 a_2 by variation of parameters; remainder after removing c_1 u_1 + c_2 u_2.

    a_1 is the tail integral from infinity, so u_p carries no growing mode and c_1 = 0.
    """
    T = prob.horizon
    t = prob.grid()
    if prob.f.is_zero:
        zeros = np.zeros_like(t)
        return ParticularSolution(t, zeros, 0.0, 0.0, zeros.copy(), math.inf, None, None, 0.0, 0.0)

    _, d = prob.f.bound()
    solutions = []
    for pad in TAIL_PAD:
        H = T + pad
        budget = max(j_max, int(math.ceil(H)) + 20)
        solutions.append(_variation_of_parameters(prob, H, budget))

    count = t.size
    t_full, u1, u2, alpha1, alpha2, beyond = solutions[-1]
    coarse_alpha1 = solutions[0][3][:count]
    scale = float(np.max(np.abs(alpha1[:count]))) or 1.0
    tail_change = float(np.max(np.abs(alpha1[:count] - coarse_alpha1))) / scale
    if tail_change > tail_tolerance:
        raise NumericalFailure(f"tail quadrature has not converged (relative change {tail_change:.3g})")

    u1, u2 = u1[:count], u2[:count]
    alpha1, alpha2, beyond = alpha1[:count], alpha2[:count], beyond[:count]
    u_p = u1 * alpha1 + u2 * alpha2
    c1 = 0.0
    if d > 1.0:
        c2 = float(alpha2[-1] + beyond[-1])
        remainder = u1 * alpha1 - u2 * beyond
    else:
        c2 = 0.0
        remainder = u_p.copy()

    half = t >= 0.5 * T
    tail_t, tail_r = t[half], remainder[half]
    fitted_rate: Optional[float] = None
    profile_constant: Optional[float] = None
    if math.isclose(d, 1.0):
        ratio = tail_r / (tail_t * np.exp(-tail_t))
        profile_constant = float(ratio[-1])
        residual = float((np.max(ratio) - np.min(ratio)) / abs(profile_constant))
    else:
        slope, intercept = np.polyfit(tail_t, np.log(np.abs(tail_r)), 1)
        fitted_rate = float(-slope)
        fitted = slope * tail_t + intercept
        residual = float(np.sqrt(np.mean((np.log(np.abs(tail_r)) - fitted) ** 2)))
    return ParticularSolution(
        t=t,
        u=u_p,
        c1=c1,
        c2=c2,
        remainder=remainder,
        rate=d,
        fitted_rate=fitted_rate,
        profile_constant=profile_constant,
        fit_residual=residual,
        tail_change=tail_change,
    )


def count_sign_changes(u: np.ndarray, *, floor: float = 0.0) -> int:
    """Sign changes along the samples, ignoring entries with |u| <= floor."""
    signs = np.sign(np.asarray(u, dtype=float))
    signs = signs[np.abs(u) > floor]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def comparison_holds(first: OdeSolution, second: OdeSolution) -> bool:
    """first > second and first' > second' at every grid time t > 0."""
    later = first.t > 0.0
    return bool(
        np.all(first.u[later] > second.u[later]) and np.all(first.du[later] > second.du[later])
    )


@dataclass(frozen=True)
class ExponentialFit:
    C1: float
    C2: float
    residual: float

    def as_dict(self) -> Dict[str, float]:
        return {"C1": self.C1, "C2": self.C2, "residual": self.residual}


def fit_exponential_pair(t: np.ndarray, u: np.ndarray) -> ExponentialFit:
    """Least squares u ~ C_1 e^t + C_2 e^-t; residual relative to max |u|."""
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    basis = np.column_stack([np.exp(t), np.exp(-t)])
    coefficients, *_ = np.linalg.lstsq(basis, u, rcond=None)
    misfit = u - basis @ coefficients
    scale = float(np.max(np.abs(u))) or 1.0
    return ExponentialFit(
        float(coefficients[0]), float(coefficients[1]), float(np.max(np.abs(misfit))) / scale
    )
