"""Pydantic models for cavityq parameters, Q-functions, and reports."""

import math
from enum import Enum
from typing_extensions import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

NORMALIZATION_TOL = 1e-12


class FrozenModel(BaseModel):
    """Immutable value type shared by every model below."""

    model_config = ConfigDict(frozen=True)


class SteadyState(str, Enum):
    """Explicit marker for the t -> infinity limit."""

    STEADY = "steady"


STEADY = SteadyState.STEADY

Time = float | SteadyState


class Regime(str, Enum):
    """Pump regime relative to the oscillation threshold kappa = 2*gamma."""

    SUBTHRESHOLD = "subthreshold"
    AT_THRESHOLD = "at_threshold"
    ABOVE_THRESHOLD = "above_threshold"


class SystemParams(FrozenModel):
    """The physical triple shared by every module.

    Fields are stored as given; ``cavityq.params.validate`` enforces the
    physical constraints so raw inputs can be classified and rejected with
    precise errors.
    """

    kappa: float
    gamma: float = 0.0
    epsilon: float = 0.0


class ThresholdClass(FrozenModel):
    """Threshold classification with its relative margin (kappa - 2*gamma)/kappa."""

    regime: Regime
    margin: float


class CoherentSolution(FrozenModel):
    """Decay factor p(t) and displacement q(t) of the driven cavity."""

    p: float = Field(ge=0.0, le=1.0)
    q: float = Field(ge=0.0)


class ModeMoments(FrozenModel):
    """First, second and selected fourth moments of a two-mode field."""

    mean_a: float
    mean_b: float
    n_a: float
    n_b: float
    ab: float
    a_dag_b: float
    a_sq: float
    b_sq: float
    a_dag2_a2: float | None = None

    def fluctuation(self) -> "ModeMoments":
        """Centered (primed) moments, e.g. <a'+a'> = <a+a> - |<a>|^2."""
        return ModeMoments(
            mean_a=0.0,
            mean_b=0.0,
            n_a=self.n_a - self.mean_a**2,
            n_b=self.n_b - self.mean_b**2,
            ab=self.ab - self.mean_a * self.mean_b,
            a_dag_b=self.a_dag_b - self.mean_a * self.mean_b,
            a_sq=self.a_sq - self.mean_a**2,
            b_sq=self.b_sq - self.mean_b**2,
        )


class SubharmonicMoments(FrozenModel):
    """Steady-state moments of the subharmonic generator."""

    n_a: float = Field(ge=0.0)
    m_ab: float = Field(le=0.0)
    cross: float = 0.0
    sq_a: float = 0.0


class QCoefficients(FrozenModel):
    """Characteristic-function coefficients (a, b) and Q exponent coefficients (u, v)."""

    a_coef: float
    b_coef: float
    u: float
    v: float

    @model_validator(mode="after")
    def check_ordering(self) -> Self:
        """Require a > |b| and u > v >= 0."""
        if not self.a_coef > abs(self.b_coef):
            raise ValueError("a_coef must exceed |b_coef|")
        if not self.u > self.v >= 0.0:
            raise ValueError("u > v >= 0 required")
        return self


class GaussianQ(FrozenModel):
    """Symmetric two-mode Gaussian Q-function.

    Q(alpha, beta) = prefactor * exp(-U(|alpha|^2 + |beta|^2)
    - V(alpha beta + alpha* beta*) + L(alpha + alpha* + beta + beta*) + C)

    Every instance is normalized: prefactor = (U^2 - V^2)/pi^2 and
    C = -2 L^2/(U + V).
    """

    prefactor: float = Field(gt=0.0)
    U: float
    V: float
    L: float = 0.0
    C: float = 0.0

    @model_validator(mode="after")
    def check_normalized(self) -> Self:
        """Reject non-integrable or unnormalized coefficient sets."""
        if not self.U > abs(self.V):
            raise ValueError(f"U must exceed |V| (U={self.U}, V={self.V})")
        expected_prefactor = (self.U**2 - self.V**2) / math.pi**2
        if not math.isclose(self.prefactor, expected_prefactor, rel_tol=NORMALIZATION_TOL):
            raise ValueError(
                f"prefactor {self.prefactor} != (U^2 - V^2)/pi^2 = {expected_prefactor}"
            )
        expected_c = -2.0 * self.L**2 / (self.U + self.V)
        if abs(self.C - expected_c) > NORMALIZATION_TOL * max(1.0, abs(expected_c)):
            raise ValueError(f"C {self.C} != -2L^2/(U+V) = {expected_c}")
        return self

    @classmethod
    def normalized(cls, U: float, V: float, L: float = 0.0) -> "GaussianQ":
        """Build the normalized member of the family for (U, V, L)."""
        return cls(
            prefactor=(U**2 - V**2) / math.pi**2,
            U=U,
            V=V,
            L=L,
            C=-2.0 * L**2 / (U + V),
        )

    @property
    def peak(self) -> float:
        """Location alpha = beta of the maximum on the real diagonal."""
        return self.L / (self.U + self.V)

    def normalization(self) -> float:
        """Closed-form integral over both complex planes."""
        return (
            self.prefactor
            * math.pi**2
            / (self.U**2 - self.V**2)
            * math.exp(self.C + 2.0 * self.L**2 / (self.U + self.V))
        )

    def evaluate(self, alpha: ArrayLike, beta: ArrayLike) -> NDArray[np.float64]:
        """Evaluate Q pointwise (broadcasts over array arguments)."""
        a = np.asarray(alpha, dtype=np.complex128)
        b = np.asarray(beta, dtype=np.complex128)
        exponent = (
            -self.U * (np.abs(a) ** 2 + np.abs(b) ** 2)
            - self.V * 2.0 * (a * b).real
            + self.L * 2.0 * (a.real + b.real)
            + self.C
        )
        values: NDArray[np.float64] = self.prefactor * np.exp(exponent)
        return values


class MarginalGaussianQ(FrozenModel):
    """Single-mode Q(alpha) = (w/pi) exp(-w |alpha - d|^2)."""

    w: float = Field(gt=0.0)
    d: float = 0.0

    def evaluate(self, alpha: ArrayLike) -> NDArray[np.float64]:
        """Evaluate the marginal pointwise."""
        a = np.asarray(alpha, dtype=np.complex128)
        values: NDArray[np.float64] = self.w / math.pi * np.exp(-self.w * np.abs(a - self.d) ** 2)
        return values


class PhotonStatistics(FrozenModel):
    """Mean and variance of the photon number of the superposed field."""

    mean: float = Field(ge=0.0)
    variance: float = Field(ge=0.0)


class QuadratureReport(FrozenModel):
    """Quadrature variances of c+ = c+ + c and c- = i(c+ - c), and the squeezing S."""

    plus_var: float
    minus_var: float
    squeezing: float = Field(ge=0.0, le=0.25)
    minus_divergent: bool = False


class EntanglementReport(FrozenModel):
    """Second-order correlations, Cauchy-Schwarz sides and EPR fluctuation sum."""

    g2_a: float
    g2_b: float
    g2_ab: float
    cs_lhs: float
    cs_rhs: float
    cs_satisfied: bool
    epr_sum: float
    entangled: bool
    degree: float


class Observable(str, Enum):
    """Observables emitted by stats and sweep."""

    MEAN_PHOTON = "mean_photon"
    PHOTON_VARIANCE = "photon_variance"
    PLUS_VAR = "plus_var"
    MINUS_VAR = "minus_var"
    SQUEEZING = "squeezing"
    G2_A = "g2_a"
    G2_B = "g2_b"
    G2_AB = "g2_ab"
    EPR_SUM = "epr_sum"
    DEGREE = "degree"


DEFAULT_SWEEP_OBSERVABLES = (Observable.PLUS_VAR, Observable.SQUEEZING, Observable.EPR_SUM)


class SweepSpec(FrozenModel):
    """Evenly spaced gamma sweep at fixed kappa and epsilon."""

    kappa: float = Field(gt=0.0, allow_inf_nan=False)
    epsilon: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    gamma_min: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    gamma_max: float = Field(allow_inf_nan=False)
    steps: int = Field(default=101, ge=2)
    observables: tuple[Observable, ...] = Field(default=DEFAULT_SWEEP_OBSERVABLES, min_length=1)
    workers: int = Field(default=1, ge=1, le=64)

    @model_validator(mode="after")
    def check_range(self) -> Self:
        """Require 0 <= gamma_min < gamma_max <= kappa/2."""
        if not self.gamma_min < self.gamma_max:
            raise ValueError("gamma_min must be < gamma_max")
        if self.gamma_max > self.kappa / 2.0 * (1.0 + 1e-12):
            raise ValueError("gamma_max must be <= kappa/2 (threshold)")
        return self

    def gammas(self) -> NDArray[np.float64]:
        """Grid points, endpoints inclusive."""
        return np.linspace(self.gamma_min, self.gamma_max, self.steps)


class IntegrationConfig(FrozenModel):
    """Fixed-step integration and steady-state detection settings for the oracles."""

    dt: float | None = Field(default=None, gt=0.0)
    t_end: float = Field(default=500.0, gt=0.0)
    steady: bool = True
    drift_tol: float = Field(default=1e-10, gt=0.0)
    truncation: int = Field(default=15, ge=2)
    population_tol: float = Field(default=1e-8, gt=0.0)
    check_interval: float = Field(default=0.5, gt=0.0)
    sample_stride: int = Field(default=100, ge=1)
    max_truncation_attempts: int = Field(default=4, ge=1)
