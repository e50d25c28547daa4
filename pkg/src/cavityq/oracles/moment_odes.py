"""Moment-equation oracle: RK4 integration of the closed first/second moment systems.

Both cavities give linear equations for the nine tracked moments (with
complex conjugates), integrated from the two-mode vacuum.
"""

import math
import time
from collections.abc import Callable
from dataclasses import astuple, dataclass, fields

import numpy as np
from numpy.typing import NDArray

from cavityq.errors import NoConvergenceError, StepSizeTooLargeError
from cavityq.logging import get_logger
from cavityq.metrics import record_integration
from cavityq.models import IntegrationConfig, SystemParams
from cavityq.oracles.integrator import affine_propagator, linearize_affine
from cavityq.params import lambda_pm, validate

logger = get_logger(__name__)

STEP_GUARD = 0.1
MOMENT_COUNT = 9

ComplexRhs = Callable[[NDArray[np.complex128]], NDArray[np.complex128]]


@dataclass(frozen=True)
class MomentVector:
    """Tracked expectations at one instant."""

    time: float
    a: complex = 0j
    b: complex = 0j
    a_dag_a: complex = 0j
    b_dag_b: complex = 0j
    ab: complex = 0j
    a_dag_b: complex = 0j
    a_sq: complex = 0j
    b_sq: complex = 0j
    a_dag_b_dag: complex = 0j

    @classmethod
    def from_array(cls, t: float, values: NDArray[np.complex128]) -> "MomentVector":
        """Build from the nine moments in field order."""
        return cls(t, *(complex(v) for v in values))

    def to_array(self) -> NDArray[np.complex128]:
        """The nine moments in field order."""
        return np.array(astuple(self)[1:], dtype=np.complex128)

    def max_abs_difference(self, other: "MomentVector") -> float:
        """Largest absolute deviation over the nine moments."""
        return float(np.max(np.abs(self.to_array() - other.to_array())))


MOMENT_NAMES = tuple(f.name for f in fields(MomentVector))[1:]


@dataclass(frozen=True)
class MomentTrajectory:
    """Sampled integration result."""

    samples: tuple[MomentVector, ...]
    steps: int
    converged: bool

    @property
    def final(self) -> MomentVector:
        """Last sample (always the end of the integration)."""
        return self.samples[-1]


def default_ode_step(params: SystemParams) -> float:
    """dt = min(1e-2/kappa, 1e-2/lambda+)."""
    lambda_plus, _ = lambda_pm(params)
    return min(1e-2 / params.kappa, 1e-2 / lambda_plus)


def coherent_rhs(params: SystemParams) -> ComplexRhs:
    """Moment derivatives of the driven cavity, da/dt = epsilon - kappa a/2."""
    kappa, eps = params.kappa, params.epsilon

    def rhs(m: NDArray[np.complex128]) -> NDArray[np.complex128]:
        a, b, n_a, n_b, ab, a_dag_b, a_sq, b_sq, a_dag_b_dag = m
        return np.array(
            [
                eps - kappa / 2 * a,
                eps - kappa / 2 * b,
                eps * (a + a.conjugate()) - kappa * n_a,
                eps * (b + b.conjugate()) - kappa * n_b,
                eps * (a + b) - kappa * ab,
                eps * (b + a.conjugate()) - kappa * a_dag_b,
                2 * eps * a - kappa * a_sq,
                2 * eps * b - kappa * b_sq,
                eps * (a.conjugate() + b.conjugate()) - kappa * a_dag_b_dag,
            ]
        )

    return rhs


def subharmonic_rhs(params: SystemParams) -> ComplexRhs:
    """Moment derivatives of the parametric pair, da/dt = -kappa a/2 - gamma b+.

    The vacuum reservoir enters through the -gamma source term of d<ab>/dt.
    """
    kappa, gamma = params.kappa, params.gamma

    def rhs(m: NDArray[np.complex128]) -> NDArray[np.complex128]:
        a, b, n_a, n_b, ab, a_dag_b, a_sq, b_sq, a_dag_b_dag = m
        return np.array(
            [
                -kappa / 2 * a - gamma * b.conjugate(),
                -kappa / 2 * b - gamma * a.conjugate(),
                -kappa * n_a - gamma * (ab + a_dag_b_dag),
                -kappa * n_b - gamma * (ab + a_dag_b_dag),
                -kappa * ab - gamma * (n_a + n_b + 1),
                -kappa * a_dag_b - gamma * (b_sq + a_sq.conjugate()),
                -kappa * a_sq - 2 * gamma * a_dag_b.conjugate(),
                -kappa * b_sq - 2 * gamma * a_dag_b,
                -kappa * a_dag_b_dag - gamma * (n_a + n_b + 1),
            ]
        )

    return rhs


def _as_real(rhs: ComplexRhs) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
    """View a conjugate-linear complex system as a real one on [Re m, Im m]."""

    def real_rhs(y: NDArray[np.float64]) -> NDArray[np.float64]:
        derivative = rhs(y[:MOMENT_COUNT] + 1j * y[MOMENT_COUNT:])
        return np.concatenate([derivative.real, derivative.imag])

    return real_rhs


def _to_moments(t: float, y: NDArray[np.float64]) -> MomentVector:
    return MomentVector.from_array(t, y[:MOMENT_COUNT] + 1j * y[MOMENT_COUNT:])


def _integrate(
    label: str,
    rhs: ComplexRhs,
    rate: float,
    params: SystemParams,
    config: IntegrationConfig,
) -> MomentTrajectory:
    dt = config.dt if config.dt is not None else default_ode_step(params)
    if dt * rate > STEP_GUARD:
        raise StepSizeTooLargeError(dt, rate, STEP_GUARD)

    matrix, source = linearize_affine(_as_real(rhs), 2 * MOMENT_COUNT)
    if config.steady:
        h, max_steps = dt, math.ceil(config.t_end / dt)
    else:
        max_steps = math.ceil(config.t_end / dt - 1e-9)
        h = config.t_end / max_steps
    propagator, offset = affine_propagator(matrix, source, h)

    started = time.perf_counter()
    y = np.zeros(2 * MOMENT_COUNT)
    samples = [_to_moments(0.0, y)]
    steps = 0
    drift = float(np.max(np.abs(matrix @ y + source)))
    converged = config.steady and drift < config.drift_tol
    while not converged and steps < max_steps:
        y = propagator @ y + offset
        steps += 1
        if steps % config.sample_stride == 0:
            samples.append(_to_moments(steps * h, y))
        if config.steady:
            drift = float(np.max(np.abs(matrix @ y + source)))
            converged = drift < config.drift_tol
    if steps % config.sample_stride != 0:
        samples.append(_to_moments(steps * h, y))
    record_integration(label, steps, time.perf_counter() - started)

    if config.steady and not converged:
        logger.warning("moment_odes_no_convergence", system=label, t_end=config.t_end, drift=drift)
        raise NoConvergenceError(config.t_end, drift)
    logger.debug("moment_odes_finished", system=label, t=steps * h, steps=steps, drift=drift)
    return MomentTrajectory(samples=tuple(samples), steps=steps, converged=converged)


def integrate_coherent_odes(
    params: SystemParams,
    config: IntegrationConfig | None = None,
) -> MomentTrajectory:
    """Integrate the driven-cavity moment equations from vacuum.

    Raises:
        StepSizeTooLargeError: If dt * kappa > 0.1.
        NoConvergenceError: In steady mode, if the drift stays above drift_tol.
    """
    validate(params)
    config = config or IntegrationConfig()
    return _integrate("coherent_odes", coherent_rhs(params), params.kappa, params, config)


def integrate_subharmonic_odes(
    params: SystemParams,
    config: IntegrationConfig | None = None,
) -> MomentTrajectory:
    """Integrate the parametric-pair moment equations from vacuum.

    Raises:
        StepSizeTooLargeError: If dt * lambda+ > 0.1.
        NoConvergenceError: In steady mode, if no steady state is reached by t_end
            (always the case at threshold, where lambda- = 0).
    """
    lambda_plus, _ = lambda_pm(params)
    config = config or IntegrationConfig()
    return _integrate("subharmonic_odes", subharmonic_rhs(params), lambda_plus, params, config)
