"""Parameter validation and threshold classification."""

import math

from cavityq.errors import (
    NegativeRateError,
    NegativeTimeError,
    NonFiniteError,
    NonPositiveKappaError,
    ThresholdDivergenceError,
)
from cavityq.models import Regime, SteadyState, SystemParams, ThresholdClass, Time

# Relative band around kappa = 2*gamma treated as exactly at threshold.
THRESHOLD_TOL = 1e-12


def validate(params: SystemParams) -> ThresholdClass:
    """Check the physical constraints and classify the pump regime.

    Args:
        params: Raw parameter triple.

    Returns:
        ThresholdClass with the regime and margin (kappa - 2*gamma)/kappa.

    Raises:
        NonFiniteError: If any field is NaN or infinite.
        NonPositiveKappaError: If kappa <= 0.
        NegativeRateError: If gamma or epsilon is negative.
    """
    for name in ("kappa", "gamma", "epsilon"):
        value = getattr(params, name)
        if not math.isfinite(value):
            raise NonFiniteError(name, value)
    if params.kappa <= 0.0:
        raise NonPositiveKappaError(params.kappa)
    if params.gamma < 0.0:
        raise NegativeRateError("gamma", params.gamma)
    if params.epsilon < 0.0:
        raise NegativeRateError("epsilon", params.epsilon)

    gap = params.kappa - 2.0 * params.gamma
    if abs(gap) <= THRESHOLD_TOL * params.kappa:
        return ThresholdClass(regime=Regime.AT_THRESHOLD, margin=0.0)
    regime = Regime.SUBTHRESHOLD if gap > 0.0 else Regime.ABOVE_THRESHOLD
    return ThresholdClass(regime=regime, margin=gap / params.kappa)


def lambda_pm(params: SystemParams) -> tuple[float, float]:
    """Eigen-decay rates lambda+- = kappa +- 2*gamma of the parametric pair."""
    validate(params)
    return params.kappa + 2.0 * params.gamma, params.kappa - 2.0 * params.gamma


def require_regime(
    params: SystemParams, observable: str, *, allow_threshold: bool = False
) -> Regime:
    """Validate and reject regimes where the named steady-state quantity diverges.

    Raises:
        ThresholdDivergenceError: Above threshold, or at threshold unless allowed.
    """
    regime = validate(params).regime
    if regime is Regime.ABOVE_THRESHOLD or (
        regime is Regime.AT_THRESHOLD and not allow_threshold
    ):
        raise ThresholdDivergenceError(observable, params.kappa, params.gamma)
    return regime


def require_time(t: Time) -> Time:
    """Reject negative or NaN evaluation times; SteadyState passes through."""
    if isinstance(t, SteadyState):
        return t
    if math.isnan(t):
        raise NonFiniteError("t", t)
    if t < 0.0:
        raise NegativeTimeError(t)
    return t
