from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from asymptotics.decay import check_ladder

MIN_EXPONENT = 0.5


@dataclass(frozen=True)
class FluxReport:
    """I(r) on a ladder with the fitted limit of I_inf + c (r / r_last)^-beta."""

    integrand_label: str
    radii: Tuple[float, ...]
    values: Tuple[float, ...]
    fitted_limit: float
    fit_exponent: float
    fit_residual: float
    status: str

    @property
    def extrapolated(self) -> bool:
        return self.status == "extrapolated"

    def as_dict(self) -> Dict[str, Any]:
        return {
            "integrand_label": self.integrand_label,
            "radii": list(self.radii),
            "values": list(self.values),
            "fitted_limit": self.fitted_limit,
            "fit_exponent": self.fit_exponent,
            "fit_residual": self.fit_residual,
            "status": self.status,
        }


def extrapolate_limit(
    label: str,
    radii: Sequence[float],
    values: Sequence[float],
    *,
    beta_initial: float,
    beta_max: float,
) -> FluxReport:
    r = check_ladder(radii)
    v = np.asarray(values, dtype=float)
    if v.shape != r.shape:
        raise ValueError("one value per radius is required")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite flux values for {label}")
    radii_t = tuple(r.tolist())
    values_t = tuple(v.tolist())
    if np.all(v == v[0]):
        return FluxReport(label, radii_t, values_t, float(v[0]), 0.0, 0.0, "exact")

    scaled = r / r[-1]
    beta0 = float(np.clip(beta_initial, MIN_EXPONENT, beta_max))
    c0 = float((v[0] - v[-1]) / (scaled[0] ** (-beta0) - 1.0))
    p0 = (float(v[-1]) - c0, c0, beta0)

    def model(x: np.ndarray, limit: float, c: float, beta: float) -> np.ndarray:
        return limit + c * x ** (-beta)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", OptimizeWarning)
            params, _ = curve_fit(
                model,
                scaled,
                v,
                p0=p0,
                bounds=([-np.inf, -np.inf, MIN_EXPONENT], [np.inf, np.inf, beta_max]),
                method="trf",
                x_scale="jac",
                ftol=1e-15,
                xtol=1e-15,
                gtol=1e-15,
                max_nfev=20000,
            )
    except (RuntimeError, ValueError, OptimizeWarning):
        return FluxReport(
            label, radii_t, values_t, float(v[-1]), float("nan"), float("nan"), "no-extrapolation"
        )
    if not np.all(np.isfinite(params)):
        return FluxReport(
            label, radii_t, values_t, float(v[-1]), float("nan"), float("nan"), "no-extrapolation"
        )
    limit, c, beta = (float(p) for p in params)
    residual = float(np.sqrt(np.mean((model(scaled, limit, c, beta) - v) ** 2)))
    return FluxReport(label, radii_t, values_t, limit, beta, residual, "extrapolated")
