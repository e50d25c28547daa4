"""Closed-form solution of the coherently driven two-mode cavity."""

import math

from cavityq.models import CoherentSolution, GaussianQ, ModeMoments, SteadyState, SystemParams, Time
from cavityq.params import require_time, validate


def decay_factor(params: SystemParams, t: Time) -> float:
    """p(t) = exp(-kappa t / 2); zero in the steady state.

    Raises:
        NegativeTimeError: If t < 0.
    """
    validate(params)
    t = require_time(t)
    if isinstance(t, SteadyState):
        return 0.0
    return math.exp(-params.kappa * t / 2.0)


def displacement(params: SystemParams, t: Time) -> float:
    """q(t) = (2 epsilon/kappa)(1 - p(t)), the real coherent amplitude of each mode."""
    validate(params)
    t = require_time(t)
    steady_q = 2.0 * params.epsilon / params.kappa
    if isinstance(t, SteadyState):
        return steady_q
    # -expm1 keeps small-t displacements accurate
    return steady_q * -math.expm1(-params.kappa * t / 2.0)


def coherent_solution(params: SystemParams, t: Time) -> CoherentSolution:
    """Bundle p(t) and q(t)."""
    return CoherentSolution(p=decay_factor(params, t), q=displacement(params, t))


def coherent_moments(params: SystemParams, t: Time) -> ModeMoments:
    """Moments of the coherent state |q, q>; every fluctuation moment vanishes."""
    q = displacement(params, t)
    q2 = q * q
    return ModeMoments(
        mean_a=q,
        mean_b=q,
        n_a=q2,
        n_b=q2,
        ab=q2,
        a_dag_b=q2,
        a_sq=q2,
        b_sq=q2,
        a_dag2_a2=q2 * q2,
    )


def coherent_qfunction(params: SystemParams, t: Time) -> GaussianQ:
    """Q(alpha, beta) = exp(-|alpha - q|^2 - |beta - q|^2)/pi^2 in canonical form."""
    q = displacement(params, t)
    return GaussianQ.normalized(U=1.0, V=0.0, L=q)
