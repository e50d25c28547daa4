"""Superposition of Gaussian Q-functions, marginals, and antinormal moment extraction.

Moments are read off the Q-function with the antinormal rule
<a a+> = integral of |alpha|^2 Q, then reordered with a unit commutator.
"""

from cavityq.errors import MalformedInputError
from cavityq.models import GaussianQ, MarginalGaussianQ, SystemParams
from cavityq.subharmonic import steady_moments

__all__ = [
    "GaussianQ",
    "MarginalGaussianQ",
    "composite_fluctuation_moments",
    "marginal",
    "q_cross_moments",
    "q_mean_photon_single",
    "q_normal_fourth_moment_single",
    "superpose",
]

FAMILY_TOL = 1e-12


def _require_gaussian(q: object, role: str) -> GaussianQ:
    if not isinstance(q, GaussianQ):
        raise MalformedInputError(f"{role} must be a GaussianQ, got {type(q).__name__}")
    return q


def superpose(q_coh: GaussianQ, q_sub: GaussianQ) -> GaussianQ:
    """Convolve a coherent Q (U=1, V=0) with a centered subharmonic Q (L=0, C=0).

    The result has U = u, V = v and L = q(u + v), C = -2 q^2 (u + v).

    Raises:
        MalformedInputError: If either argument is outside its family.
    """
    q_coh = _require_gaussian(q_coh, "q_coh")
    q_sub = _require_gaussian(q_sub, "q_sub")
    if abs(q_coh.U - 1.0) > FAMILY_TOL or abs(q_coh.V) > FAMILY_TOL:
        raise MalformedInputError(
            f"q_coh must have U=1, V=0 (coherent family), got U={q_coh.U}, V={q_coh.V}"
        )
    if abs(q_sub.L) > FAMILY_TOL or abs(q_sub.C) > FAMILY_TOL:
        raise MalformedInputError(
            f"q_sub must be centered (L=0, C=0), got L={q_sub.L}, C={q_sub.C}"
        )
    q = q_coh.L
    if q == 0.0:
        return q_sub
    return GaussianQ.normalized(U=q_sub.U, V=q_sub.V, L=q * (q_sub.U + q_sub.V))


def marginal(q: GaussianQ) -> MarginalGaussianQ:
    """Integrate out beta: w = (U^2 - V^2)/U and displacement d = L/(U + V)."""
    q = _require_gaussian(q, "q")
    return MarginalGaussianQ(w=(q.U**2 - q.V**2) / q.U, d=q.L / (q.U + q.V))


def q_mean_photon_single(q: GaussianQ) -> float:
    """<a+a> of one mode: integral of |alpha|^2 Q minus 1."""
    single = marginal(q)
    return 1.0 / single.w + single.d**2 - 1.0


def q_cross_moments(q: GaussianQ) -> tuple[float, float]:
    """Return (<a+b>, <a2 b2>): the cross moment d^2 and the fluctuation anomalous moment.

    <a2 b2> = -V/(U^2 - V^2) is the alpha-beta covariance of the Gaussian.
    """
    q = _require_gaussian(q, "q")
    d = q.peak
    return d * d, -q.V / (q.U**2 - q.V**2)


def q_normal_fourth_moment_single(q: GaussianQ) -> float:
    """<a+^2 a^2> of one mode from the marginal fourth moment.

    integral |alpha|^4 Q = <a^2 a+^2> = <a+^2 a^2> + 4<a+a> + 2 for a unit commutator.
    """
    single = marginal(q)
    s = 1.0 / single.w
    d2 = single.d**2
    antinormal = d2 * d2 + 4.0 * d2 * s + 2.0 * s * s
    return antinormal - 4.0 * q_mean_photon_single(q) - 2.0


def composite_fluctuation_moments(params: SystemParams) -> tuple[float, float, float]:
    """Steady (<c'+c'>, <c'^2>, <c'+^2>) of c' = a2 + b2, the fluctuation part of c.

    Raises:
        ThresholdDivergenceError: If 2*gamma >= kappa.
    """
    moments = steady_moments(params)
    anomalous = 2.0 * moments.m_ab
    return 2.0 * moments.n_a, anomalous, anomalous
