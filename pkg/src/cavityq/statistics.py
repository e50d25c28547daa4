"""Photon statistics, quadrature squeezing, correlations and EPR entanglement.

The superposed field is c = a + b with a = a1 + a2 and b = b1 + b2, so that
[c, c+] = 4 and [a, a+] = 2. Time arguments only enter through the coherent
displacement q(t); the subharmonic contribution is always its steady value.
At threshold, correlations and the EPR sum use their reduced limits.
"""

from cavityq.coherent import displacement
from cavityq.errors import UndefinedCorrelationError
from cavityq.models import (
    STEADY,
    EntanglementReport,
    PhotonStatistics,
    QuadratureReport,
    Regime,
    SystemParams,
    Time,
)
from cavityq.params import require_regime, require_time
from cavityq.subharmonic import steady_moments
from cavityq.superposition import composite_fluctuation_moments

VACUUM_QUADRATURE_VARIANCE = 4.0
THRESHOLD_PLUS_VARIANCE = 3.0
THRESHOLD_SQUEEZING = 0.25
THRESHOLD_G2 = 2.0


def mean_photon(params: SystemParams, t: Time = STEADY) -> float:
    """n = 4 gamma^2/(kappa^2 - 4 gamma^2) + (16 epsilon^2/kappa^2)(1 - exp(-kappa t/2))^2.

    Raises:
        ThresholdDivergenceError: If 2*gamma >= kappa.
        NegativeTimeError: If t < 0.
    """
    moments = steady_moments(params)
    q = displacement(params, require_time(t))
    return 2.0 * moments.n_a + 4.0 * q * q


def photon_variance(params: SystemParams, t: Time = STEADY) -> float:
    """Closed-form photon-number variance in terms of kappa, gamma and q(t)."""
    require_regime(params, "photon_variance")
    q = displacement(params, require_time(t))
    kappa, gamma = params.kappa, params.gamma
    denominator = kappa**2 - 4.0 * gamma**2
    q2 = q * q
    return (
        16.0 * gamma**4 / denominator**2
        + 4.0 * kappa**2 * gamma**2 / denominator**2
        + 16.0 * gamma**2 / denominator
        + 16.0 * q2 * (2.0 * gamma**2 - kappa * gamma) / denominator
        + 16.0 * q2
    )


def photon_variance_assembled(params: SystemParams, t: Time = STEADY) -> float:
    """Photon-number variance assembled from fluctuation moments and the mean.

    With c = 2q + c' and Gaussian c':
    (dn)^2 = |<c'^2>|^2 + <c'+c'>^2 + 2 (2q)^2 (<c'+c'> + <c'^2>) + 4 n.
    """
    fluct_n, fluct_sq, _ = composite_fluctuation_moments(params)
    q = displacement(params, require_time(t))
    coherent_intensity = 4.0 * q * q
    return (
        fluct_sq**2
        + fluct_n**2
        + 2.0 * coherent_intensity * (fluct_n + fluct_sq)
        + 4.0 * mean_photon(params, t)
    )


def photon_statistics(params: SystemParams, t: Time = STEADY) -> PhotonStatistics:
    """Mean and variance of the photon number at time t."""
    return PhotonStatistics(mean=mean_photon(params, t), variance=photon_variance(params, t))


def quadrature_report(params: SystemParams) -> QuadratureReport:
    """Plus/minus quadrature variances and squeezing S = gamma/(kappa + 2 gamma).

    At threshold the minus variance is reported as infinite and flagged.
    """
    regime = require_regime(params, "quadrature_report", allow_threshold=True)
    if regime is Regime.AT_THRESHOLD:
        return QuadratureReport(
            plus_var=THRESHOLD_PLUS_VARIANCE,
            minus_var=float("inf"),
            squeezing=THRESHOLD_SQUEEZING,
            minus_divergent=True,
        )
    kappa, gamma = params.kappa, params.gamma
    return QuadratureReport(
        plus_var=VACUUM_QUADRATURE_VARIANCE - 4.0 * gamma / (kappa + 2.0 * gamma),
        minus_var=VACUUM_QUADRATURE_VARIANCE + 4.0 * gamma / (kappa - 2.0 * gamma),
        squeezing=gamma / (kappa + 2.0 * gamma),
    )


def _steady_intensity(params: SystemParams, observable: str) -> tuple[float, float, float]:
    """Return (q^2, <a2+a2>, <a2 b2>) and reject the vacuum."""
    moments = steady_moments(params)
    q = displacement(params, STEADY)
    q2 = q * q
    if q2 + moments.n_a == 0.0:
        raise UndefinedCorrelationError(observable)
    return q2, moments.n_a, moments.m_ab


def g2_single(params: SystemParams) -> float:
    """Steady g2 of one superposed mode: 1 + (n^2 + 2 q^2 n)/(q^2 + n)^2.

    Raises:
        UndefinedCorrelationError: For the vacuum (gamma = epsilon = 0).
    """
    if require_regime(params, "g2_a", allow_threshold=True) is Regime.AT_THRESHOLD:
        return THRESHOLD_G2
    q2, n, _ = _steady_intensity(params, "g2_a")
    return 1.0 + (n * n + 2.0 * q2 * n) / (q2 + n) ** 2


def g2_cross(params: SystemParams) -> float:
    """Steady cross correlation 1 + (2 q^2 m + m^2)/(q^2 + n)^2."""
    if require_regime(params, "g2_ab", allow_threshold=True) is Regime.AT_THRESHOLD:
        return THRESHOLD_G2
    q2, n, m = _steady_intensity(params, "g2_ab")
    return 1.0 + (2.0 * q2 * m + m * m) / (q2 + n) ** 2


def epr_deficit(params: SystemParams) -> float:
    """Amount 4 gamma/(kappa + 2 gamma) by which the EPR sum falls below 4."""
    require_regime(params, "epr_sum", allow_threshold=True)
    return 4.0 * params.gamma / (params.kappa + 2.0 * params.gamma)


def epr_sum(params: SystemParams) -> float:
    """(du)^2 + (dv)^2 = 4 - 4 gamma/(kappa + 2 gamma); equals the plus quadrature variance."""
    return quadrature_report(params).plus_var


def epr_report(params: SystemParams) -> EntanglementReport:
    """Correlations, the Cauchy-Schwarz pair, and the EPR entanglement criterion.

    Raises:
        UndefinedCorrelationError: For the vacuum.
    """
    g2_a = g2_single(params)
    g2_ab = g2_cross(params)
    fluctuation_sum = epr_sum(params)
    cs_lhs = g2_a * g2_a
    cs_rhs = g2_ab * g2_ab
    return EntanglementReport(
        g2_a=g2_a,
        g2_b=g2_a,
        g2_ab=g2_ab,
        cs_lhs=cs_lhs,
        cs_rhs=cs_rhs,
        cs_satisfied=cs_lhs >= cs_rhs,
        epr_sum=fluctuation_sum,
        entangled=epr_deficit(params) > 0.0,
        degree=fluctuation_sum / 4.0,
    )
