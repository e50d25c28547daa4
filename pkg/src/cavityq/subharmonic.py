"""Steady-state solution of the two-mode subharmonic generator.

The pump is a fixed classical amplitude folded into gamma; all results
below are steady-state values and exist only below threshold.
"""

import math

from cavityq.models import GaussianQ, QCoefficients, SubharmonicMoments, SystemParams
from cavityq.params import lambda_pm, require_regime, require_time


def _denominator(params: SystemParams) -> float:
    return params.kappa**2 - 4.0 * params.gamma**2


def steady_moments(params: SystemParams) -> SubharmonicMoments:
    """n = 2 gamma^2/(kappa^2 - 4 gamma^2), m = <ab> = -kappa gamma/(kappa^2 - 4 gamma^2).

    Raises:
        ThresholdDivergenceError: If 2*gamma >= kappa.
    """
    require_regime(params, "steady_moments")
    denominator = _denominator(params)
    return SubharmonicMoments(
        n_a=2.0 * params.gamma**2 / denominator,
        m_ab=-params.kappa * params.gamma / denominator,
    )


def char_coefficients(params: SystemParams) -> QCoefficients:
    """Coefficients of the antinormal characteristic function and of the Q exponent.

    a = (kappa^2 - 2 gamma^2)/D and b = kappa gamma/D with D = kappa^2 - 4 gamma^2;
    u = a/(a^2 - b^2), v = b/(a^2 - b^2).
    """
    require_regime(params, "char_coefficients")
    denominator = _denominator(params)
    a_coef = (params.kappa**2 - 2.0 * params.gamma**2) / denominator
    b_coef = params.kappa * params.gamma / denominator
    det = a_coef**2 - b_coef**2
    return QCoefficients(a_coef=a_coef, b_coef=b_coef, u=a_coef / det, v=b_coef / det)


def subharmonic_qfunction(params: SystemParams) -> GaussianQ:
    """Centered two-mode Gaussian Q with U = u and V = v."""
    coefficients = char_coefficients(params)
    return GaussianQ.normalized(U=coefficients.u, V=coefficients.v)


def mixing_factors(params: SystemParams, t: float) -> tuple[float, float]:
    """E+- = (exp(-lambda+ t/2) +- exp(-lambda- t/2))/2 of the transient solution.

    Raises:
        NegativeTimeError: If t < 0.
    """
    lambda_plus, lambda_minus = lambda_pm(params)
    require_time(t)
    fast = math.exp(-lambda_plus * t / 2.0)
    slow = math.exp(-lambda_minus * t / 2.0)
    return 0.5 * (fast + slow), 0.5 * (fast - slow)
