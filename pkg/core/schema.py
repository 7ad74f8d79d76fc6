from __future__ import annotations

import math
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

COMMANDS = (
    "mass",
    "curvature",
    "verify-ah",
    "duality-check",
    "eigenfunction",
    "deform",
    "first-variation",
    "ode-verify",
    "dichotomy",
    "rigidity-check",
)
CommandName = Literal[
    "mass",
    "curvature",
    "verify-ah",
    "duality-check",
    "eigenfunction",
    "deform",
    "first-variation",
    "ode-verify",
    "dichotomy",
    "rigidity-check",
]


def default_radii() -> List[float]:
    return [float(20.0 * 10.0 ** (k / 7.0)) for k in range(8)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# ---------------------------------------------------------------- scalar fields


class PotentialDocument(_Strict):
    kind: Literal["potential"] = "potential"
    index: int = Field(ge=0)


class ScalarBumpDocument(_Strict):
    kind: Literal["bump"] = "bump"
    center: float = Field(gt=0.0)
    width: float = Field(gt=0.0)
    amplitude: float = 1.0
    power: int = Field(default=4, ge=3)


class TailDocument(_Strict):
    """amplitude * (1 + r^2)^(-exponent/2)."""

    kind: Literal["power"] = "power"
    amplitude: float = 1.0
    exponent: float


class ConstantDocument(_Strict):
    kind: Literal["constant"] = "constant"
    value: float


class LapseDocument(_Strict):
    kind: Literal["lapse"] = "lapse"
    m: float = Field(ge=0.0)


class SumDocument(_Strict):
    kind: Literal["sum"] = "sum"
    terms: List["ScalarFieldDocument"] = Field(min_length=1)


ScalarFieldDocument = Annotated[
    Union[
        PotentialDocument,
        ScalarBumpDocument,
        TailDocument,
        ConstantDocument,
        LapseDocument,
        SumDocument,
    ],
    Field(discriminator="kind"),
]
SumDocument.model_rebuild()


# ---------------------------------------------------------------- symmetric fields


class FramePowerDocument(_Strict):
    """kappa(e_1, e_1) = amplitude * r^-exponent * (c_0 + c . x_hat)."""

    kind: Literal["frame_power"] = "frame_power"
    amplitude: float
    exponent: float = Field(gt=0.0)
    angular: Optional[List[float]] = None


class TensorBumpDocument(_Strict):
    kind: Literal["bump"] = "bump"
    component: Tuple[int, int] = (0, 0)
    center: float = Field(gt=0.0)
    width: float = Field(gt=0.0)
    amplitude: float = 1.0
    power: int = Field(default=4, ge=3)


class ZeroTensorDocument(_Strict):
    kind: Literal["zero"] = "zero"


SymmetricFieldDocument = Annotated[
    Union[FramePowerDocument, TensorBumpDocument, ZeroTensorDocument],
    Field(discriminator="kind"),
]


# ---------------------------------------------------------------- metrics

MetricFamily = Literal["hyperbolic", "schwarzschild_ads", "conformal", "perturbed"]


class HyperbolicParams(_Strict):
    pass


class SchwarzschildParams(_Strict):
    m: float = Field(ge=0.0)


class ConformalParams(_Strict):
    base: "MetricDocument"
    u: ScalarFieldDocument


class PerturbedParams(_Strict):
    base: "MetricDocument"
    h: SymmetricFieldDocument


_PARAM_MODELS: Dict[str, type[_Strict]] = {
    "hyperbolic": HyperbolicParams,
    "schwarzschild_ads": SchwarzschildParams,
    "conformal": ConformalParams,
    "perturbed": PerturbedParams,
}


class MetricDocument(_Strict):
    """{"family", "n", "params"} with params checked against the family."""

    family: MetricFamily
    n: int = Field(ge=3)
    params: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_params(self) -> "MetricDocument":
        typed = self.typed_params()
        base = getattr(typed, "base", None)
        if base is not None and base.n != self.n:
            raise ValueError("base metric dimension must match n")
        return self

    def typed_params(self) -> _Strict:
        return _PARAM_MODELS[self.family].model_validate(self.params)


ConformalParams.model_rebuild()
PerturbedParams.model_rebuild()


# ---------------------------------------------------------------- numerics


class NumericConfig(_Strict):
    radii: List[float] = Field(default_factory=default_radii)
    quad_polar: int = Field(default=48, ge=4)
    quad_azimuth: int = Field(default=96, ge=4)
    radial_order: int = Field(default=64, ge=4)
    angular_samples: int = Field(default=32, ge=2)
    tolerance: float = 1e-8
    fd_tolerance: float = 1e-5
    extrapolation_tolerance: float = 1e-2
    ode_horizon: float = 20.0
    seed: int = 0
    j_max: int = Field(default=40, ge=2)

    @field_validator("tolerance", "fd_tolerance", "extrapolation_tolerance", "ode_horizon")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0.0 or not math.isfinite(value):
            raise ValueError("tolerances and horizons must be positive and finite")
        return value

    @field_validator("radii")
    @classmethod
    def _ladder(cls, value: List[float]) -> List[float]:
        if len(value) < 3:
            raise ValueError("radius ladder needs at least 3 radii")
        if any(r <= 0.0 for r in value):
            raise ValueError("radii must be positive")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("radii must be strictly increasing")
        return value


# ---------------------------------------------------------------- command sections


class MassSection(_Strict):
    reference: Literal["b", "g"] = "b"
    ricci_flux: bool = True
    potential_stability: bool = True
    spatial_tolerance: float = Field(default=1e-4, gt=0.0)


class CurvatureSection(_Strict):
    points: int = Field(default=200, ge=1)
    r_range: Tuple[float, float] = (0.5, 20.0)


class VerifyAhSection(_Strict):
    q_claimed: float = Field(gt=0.0)
    radii: Optional[List[float]] = None


class DualitySection(_Strict):
    pairs: int = Field(default=50, ge=1)
    support: Tuple[float, float] = (2.0, 6.0)
    tolerance: float = Field(default=1e-6, gt=0.0)


class EigenfunctionSection(_Strict):
    r_max: float = Field(default=400.0, gt=0.0)
    check_range: Tuple[float, float] = (5.0, 150.0)


class DeformSection(_Strict):
    target: ScalarFieldDocument = Field(
        default_factory=lambda: TailDocument(amplitude=0.1, exponent=2.0)
    )
    decay: Optional[float] = None
    newton_steps: int = Field(default=3, ge=0)
    r_max: float = Field(default=400.0, gt=0.0)
    linear_tolerance: float = Field(default=1e-6, gt=0.0)
    min_contraction: float = Field(default=10.0, gt=1.0)


class FirstVariationSection(_Strict):
    potential: Literal["V_0", "eigenfunction"] = "V_0"
    h: SymmetricFieldDocument = Field(
        default_factory=lambda: TensorBumpDocument(center=4.0, width=2.0, amplitude=0.1)
    )
    epsilons: List[float] = Field(default_factory=lambda: [2e-2, 1e-2, 5e-3, 2.5e-3])
    min_order: float = 0.9


class CoefficientTermDocument(_Strict):
    """amplitude * exp(-rate t) * cos(frequency t)."""

    amplitude: float
    rate: float = Field(default=0.0, ge=0.0)
    frequency: float = 0.0


class OdeSection(_Strict):
    P: List[CoefficientTermDocument] = Field(default_factory=list)
    Q: List[CoefficientTermDocument] = Field(default_factory=list)
    f: List[CoefficientTermDocument] = Field(default_factory=list)
    shift: float = 1.0
    horizons: List[float] = Field(default_factory=lambda: [10.0, 15.0, 20.0, 25.0])
    rate_tolerance: float = Field(default=0.1, gt=0.0)
    profile_tolerance: float = Field(default=0.05, gt=0.0)


class DichotomySection(_Strict):
    potential: Literal["V_0", "V_i", "V_0-x_1", "decaying"] = "V_i"
    index: int = Field(default=1, ge=0)
    directions: int = Field(default=64, ge=1)
    horizon: float = Field(default=12.0, gt=0.0)
    growth_band: Tuple[float, float] = (0.8, 1.2)
    decay_threshold: float = -0.1
    reversal_tolerance: float = Field(default=1e-6, gt=0.0)


class RigiditySection(_Strict):
    base: Literal["sphere", "hyperbolic"] = "sphere"
    wang_radii: List[float] = Field(default_factory=lambda: [5.0, 10.0, 20.0])
    annulus: Optional[Tuple[float, float]] = None
    geodesic_horizon: float = Field(default=4.0, gt=0.0)
    lapse_mass: float = Field(default=0.5, ge=0.0)
    rho_tolerance: float = Field(default=1e-6, gt=0.0)


class RunConfig(_Strict):
    command: CommandName
    metric: Optional[str] = None
    numeric: NumericConfig = Field(default_factory=NumericConfig)
    output: str = "runs/latest"
    mass: MassSection = Field(default_factory=MassSection)
    curvature: CurvatureSection = Field(default_factory=CurvatureSection)
    verify_ah: Optional[VerifyAhSection] = None
    duality: DualitySection = Field(default_factory=DualitySection)
    eigenfunction: EigenfunctionSection = Field(default_factory=EigenfunctionSection)
    deform: DeformSection = Field(default_factory=DeformSection)
    first_variation: FirstVariationSection = Field(default_factory=FirstVariationSection)
    ode: OdeSection = Field(default_factory=OdeSection)
    dichotomy: DichotomySection = Field(default_factory=DichotomySection)
    rigidity: RigiditySection = Field(default_factory=RigiditySection)

    @model_validator(mode="after")
    def _metric_required(self) -> "RunConfig":
        if self.command not in ("ode-verify", "rigidity-check") and self.metric is None:
            raise ValueError(f"command {self.command!r} requires a metric document path")
        if self.command == "verify-ah" and self.verify_ah is None:
            raise ValueError("verify-ah requires a verify_ah section with q_claimed")
        return self

    def with_overrides(
        self,
        *,
        out: Optional[str] = None,
        quad_order: Optional[int] = None,
        tol: Optional[float] = None,
        seed: Optional[int] = None,
    ) -> "RunConfig":
        """Apply CLI flags and re-validate the result."""
        numeric = self.numeric.model_dump()
        if quad_order is not None:
            numeric["quad_polar"] = quad_order
            numeric["quad_azimuth"] = 2 * quad_order
        if tol is not None:
            numeric["tolerance"] = tol
        if seed is not None:
            numeric["seed"] = seed
        payload = self.model_dump()
        payload["numeric"] = numeric
        if out is not None:
            payload["output"] = out
        return RunConfig.model_validate(payload)
