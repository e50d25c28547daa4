"""Truncated-Fock master-equation oracle.

The two-mode density matrix lives on pairs (n_a, n_b) with 0 <= n <= N,
flattened as n_a * (N + 1) + n_b. The vacuum-reservoir master equation

    drho/dt = -i[H, rho] + kappa sum_k (L_k rho L_k+ - {L_k+ L_k, rho}/2)

with L_k in {a, b} is integrated by fixed-step RK4 from the vacuum until the
tracked moments stop drifting.
"""

import functools
import itertools
import math
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from scipy.sparse import csgraph
from tenacity import RetryCallState, Retrying, retry_if_exception_type, stop_after_attempt

from cavityq.errors import NoConvergenceError, StepSizeTooLargeError, TruncationTooSmallError
from cavityq.logging import get_logger
from cavityq.metrics import record_fock_truncation, record_integration
from cavityq.models import IntegrationConfig, SystemParams
from cavityq.oracles.integrator import rk4_step
from cavityq.oracles.moment_odes import MomentVector
from cavityq.oracles.tables import MomentTable, check_order, words_up_to
from cavityq.params import require_regime, validate

logger = get_logger(__name__)

STABILITY_LIMIT = 2.5
DEFAULT_STEP = 2.0
TRUNCATION_GROWTH = 3

SparseOperator = sparse.csr_matrix


class OracleSystem(str, Enum):
    """Which cavity the master equation describes."""

    COHERENT = "coherent"
    SUBHARMONIC = "subharmonic"


class Mode(str, Enum):
    """Cavity mode selector."""

    A = "a"
    B = "b"


@dataclass(frozen=True)
class TwoModeDensityMatrix:
    """Density matrix on the truncated two-mode Fock space."""

    truncation: int
    elements: NDArray[np.complex128]

    def __post_init__(self) -> None:
        size = (self.truncation + 1) ** 2
        if self.elements.shape != (size, size):
            raise ValueError(
                f"elements must be {size}x{size} for N={self.truncation}, "
                f"got {self.elements.shape}"
            )
        frozen = np.array(self.elements, dtype=np.complex128)
        frozen.flags.writeable = False
        object.__setattr__(self, "elements", frozen)

    @classmethod
    def vacuum(cls, truncation: int) -> "TwoModeDensityMatrix":
        """|0, 0><0, 0|."""
        size = (truncation + 1) ** 2
        elements = np.zeros((size, size), dtype=np.complex128)
        elements[0, 0] = 1.0
        return cls(truncation, elements)

    @property
    def levels(self) -> int:
        """Fock levels per mode, N + 1."""
        return self.truncation + 1

    def trace(self) -> float:
        """Re Tr(rho)."""
        return float(np.trace(self.elements).real)

    def hermiticity_error(self) -> float:
        """max |rho - rho+|."""
        return float(np.max(np.abs(self.elements - self.elements.conj().T)))

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the Hermitian part."""
        hermitian = (self.elements + self.elements.conj().T) / 2
        return float(np.linalg.eigvalsh(hermitian)[0])

    def purity(self) -> float:
        """Tr(rho^2)."""
        return float(np.real(np.sum(self.elements * self.elements.T)))

    def populations(self) -> NDArray[np.float64]:
        """Diagonal populations reshaped to (n_a, n_b)."""
        return np.real(np.diag(self.elements)).reshape(self.levels, self.levels)

    def top_population(self, mode: Mode) -> float:
        """Total population of the two highest Fock levels of one mode."""
        populations = self.populations()
        top = populations[-2:, :] if mode is Mode.A else populations[:, -2:]
        return float(np.sum(top))

    def reduced(self, mode: Mode) -> NDArray[np.complex128]:
        """Single-mode density matrix with the other mode traced out."""
        tensor = self.elements.reshape((self.levels,) * 4)
        pattern = "ijkj->ik" if mode is Mode.A else "ijil->jl"
        reduced: NDArray[np.complex128] = np.einsum(pattern, tensor)
        return reduced

    def expectation(self, operator: SparseOperator) -> complex:
        """Tr(operator rho)."""
        coo = operator.tocoo()
        return complex(np.sum(coo.data * self.elements[coo.col, coo.row]))


@functools.lru_cache(maxsize=16)
def ladder_operators(truncation: int) -> tuple[SparseOperator, SparseOperator]:
    """Annihilation operators (a, b) on the truncated two-mode space."""
    levels = truncation + 1
    destroy = sparse.diags(np.sqrt(np.arange(1, levels, dtype=np.float64)), offsets=1)
    identity = sparse.identity(levels)
    a = sparse.csr_matrix(sparse.kron(destroy, identity), dtype=np.complex128)
    b = sparse.csr_matrix(sparse.kron(identity, destroy), dtype=np.complex128)
    return a, b


def _dag(operator: SparseOperator) -> SparseOperator:
    return sparse.csr_matrix(operator.conj().T)


def _power(operator: SparseOperator, exponent: int) -> SparseOperator:
    result = sparse.identity(operator.shape[0], dtype=np.complex128, format="csr")
    for _ in range(exponent):
        result = result @ operator
    return sparse.csr_matrix(result)


@functools.lru_cache(maxsize=512)
def normally_ordered(truncation: int, p: int, q: int, r: int, s: int) -> SparseOperator:
    """a+^p a^q b+^r b^s."""
    a, b = ladder_operators(truncation)
    return sparse.csr_matrix(
        _power(_dag(a), p) @ _power(a, q) @ _power(_dag(b), r) @ _power(b, s)
    )


def hamiltonian(params: SystemParams, which: OracleSystem, truncation: int) -> SparseOperator:
    """Interaction-picture Hamiltonian of either cavity.

    Coherent drive: H = i epsilon (a+ - a + b+ - b).
    Parametric pair: H = i gamma (a b - a+ b+).
    """
    a, b = ladder_operators(truncation)
    a_dag, b_dag = _dag(a), _dag(b)
    if which is OracleSystem.COHERENT:
        return sparse.csr_matrix(1j * params.epsilon * (a_dag - a + b_dag - b))
    return sparse.csr_matrix(1j * params.gamma * (a @ b - a_dag @ b_dag))


def generator_bound(params: SystemParams, which: OracleSystem, truncation: int) -> float:
    """Upper estimate of the spectral radius of the truncated Liouvillian."""
    if which is OracleSystem.COHERENT:
        return 2 * truncation * params.kappa + 4 * params.epsilon * math.sqrt(truncation + 1)
    return 2 * truncation * (params.kappa + 2 * params.gamma)


def liouvillian(params: SystemParams, which: OracleSystem, truncation: int) -> SparseOperator:
    """Superoperator L with vec(drho/dt) = L vec(rho), vec flattening rho row by row.

    Row-major flattening turns A rho B into (A kron B^T) vec(rho). With the
    effective Hamiltonian K = H - i kappa (a+a + b+b)/2,

        L = -i K kron 1 + i 1 kron K* + kappa sum_k L_k kron L_k*.
    """
    a, b = ladder_operators(truncation)
    identity = sparse.identity(a.shape[0], dtype=np.complex128, format="csr")
    number = _dag(a) @ a + _dag(b) @ b
    effective = sparse.csr_matrix(
        hamiltonian(params, which, truncation) - 0.5j * params.kappa * number
    )
    generator = -1j * sparse.kron(effective, identity) + 1j * sparse.kron(
        identity, effective.conj()
    )
    for jump in (a, b):
        generator = generator + params.kappa * sparse.kron(jump, jump.conj())
    liouville = sparse.csr_matrix(generator)
    liouville.eliminate_zeros()
    return liouville


def reachable_elements(generator: SparseOperator, start: int = 0) -> NDArray[np.int64]:
    """Sorted vec(rho) indices the generator can feed from element ``start``.

    Every other element of a state starting at ``start`` stays exactly zero.
    """
    feeds = sparse.csr_matrix(abs(generator.T))
    order = csgraph.breadth_first_order(
        feeds, start, directed=True, return_predecessors=False
    )
    return np.sort(np.asarray(order, dtype=np.int64))


def _density_from_support(
    truncation: int, support: NDArray[np.int64], state: NDArray[np.complex128]
) -> TwoModeDensityMatrix:
    """Scatter a restricted vec(rho) back into a Hermitian density matrix."""
    size = (truncation + 1) ** 2
    flat = np.zeros(size * size, dtype=np.complex128)
    flat[support] = state
    elements = flat.reshape(size, size)
    return TwoModeDensityMatrix(truncation, (elements + elements.conj().T) / 2)


@functools.lru_cache(maxsize=16)
def _tracked_operators(truncation: int) -> tuple[SparseOperator, ...]:
    """Operators of the nine MomentVector fields, in field order."""
    return tuple(
        normally_ordered(truncation, *word)
        for word in (
            (0, 1, 0, 0),
            (0, 0, 0, 1),
            (1, 1, 0, 0),
            (0, 0, 1, 1),
            (0, 1, 0, 1),
            (1, 0, 0, 1),
            (0, 2, 0, 0),
            (0, 0, 0, 2),
            (1, 0, 1, 0),
        )
    )


def tracked_moments(rho: TwoModeDensityMatrix, t: float = 0.0) -> MomentVector:
    """The nine first/second moments of rho as a MomentVector."""
    values = np.array([rho.expectation(op) for op in _tracked_operators(rho.truncation)])
    return MomentVector.from_array(t, values)


def fock_steady_state(
    params: SystemParams,
    which: OracleSystem,
    config: IntegrationConfig | None = None,
) -> TwoModeDensityMatrix:
    """Integrate the master equation from vacuum to its steady state.

    Raises:
        ThresholdDivergenceError: For the subharmonic system at or above threshold.
        StepSizeTooLargeError: If dt exceeds the RK4 stability bound.
        TruncationTooSmallError: If the top two Fock levels of either mode hold
            more than config.population_tol.
        NoConvergenceError: If the moment drift stays above config.drift_tol.
    """
    validate(params)
    if which is OracleSystem.SUBHARMONIC:
        require_regime(params, "fock_steady_state")
    config = config or IntegrationConfig()
    truncation = config.truncation
    bound = generator_bound(params, which, truncation)
    dt = config.dt if config.dt is not None else DEFAULT_STEP / bound
    if dt * bound > STABILITY_LIMIT:
        raise StepSizeTooLargeError(dt, bound, STABILITY_LIMIT)

    generator = liouvillian(params, which, truncation)
    support = reachable_elements(generator)
    restricted = sparse.csr_matrix(generator[support, :][:, support])

    def rhs(_t: float, state: NDArray[np.complex128]) -> NDArray[np.complex128]:
        derivative: NDArray[np.complex128] = restricted @ state
        return derivative

    steps_per_check = max(1, round(config.check_interval / dt))
    interval = steps_per_check * dt
    log = logger.bind(system=which.value, truncation=truncation, elements=len(support))

    started = time.perf_counter()
    rho = TwoModeDensityMatrix.vacuum(truncation)
    state = rho.elements.reshape(-1)[support]
    previous = tracked_moments(rho)
    t, steps, drift = 0.0, 0, math.inf
    while t < config.t_end:
        for _ in range(steps_per_check):
            state = rk4_step(rhs, t, state, dt)
            t += dt
        steps += steps_per_check
        rho = _density_from_support(truncation, support, state)
        state = rho.elements.reshape(-1)[support]

        population = max(rho.top_population(Mode.A), rho.top_population(Mode.B))
        if population > config.population_tol:
            record_integration("fock", steps, time.perf_counter() - started)
            log.warning("fock_truncation_too_small", t=t, population=population)
            raise TruncationTooSmallError(truncation, population)

        current = tracked_moments(rho, t)
        drift = current.max_abs_difference(previous) / interval
        previous = current
        if drift < config.drift_tol:
            record_integration("fock", steps, time.perf_counter() - started)
            record_fock_truncation(which.value, truncation)
            log.info("fock_converged", t=round(t, 6), steps=steps, drift=drift)
            return rho

    record_integration("fock", steps, time.perf_counter() - started)
    log.warning("fock_no_convergence", t_end=config.t_end, drift=drift)
    raise NoConvergenceError(config.t_end, drift)


def _log_truncation_retry(retry_state: RetryCallState) -> None:
    error = retry_state.outcome.exception() if retry_state.outcome else None
    logger.info(
        "fock_truncation_grown",
        attempt=retry_state.attempt_number,
        previous=getattr(error, "truncation", None),
        population=getattr(error, "population", None),
    )


def create_truncation_retrying(max_attempts: int) -> Retrying:
    """Retry policy for TruncationTooSmallError (no waiting between attempts)."""
    return Retrying(
        stop=stop_after_attempt(max_attempts),
        retry=retry_if_exception_type(TruncationTooSmallError),
        before_sleep=_log_truncation_retry,
        reraise=True,
    )


def fock_steady_state_adaptive(
    params: SystemParams,
    which: OracleSystem,
    config: IntegrationConfig | None = None,
) -> TwoModeDensityMatrix:
    """fock_steady_state, growing the cutoff by 3 per failed truncation test."""
    config = config or IntegrationConfig()
    cutoffs = itertools.count(config.truncation, TRUNCATION_GROWTH)
    retrying = create_truncation_retrying(config.max_truncation_attempts)
    return retrying(
        lambda: fock_steady_state(
            params, which, config.model_copy(update={"truncation": next(cutoffs)})
        )
    )


def fock_truncation_study(
    params: SystemParams,
    which: OracleSystem,
    rho: TwoModeDensityMatrix,
    tol: float,
    config: IntegrationConfig | None = None,
) -> tuple[TwoModeDensityMatrix, TwoModeDensityMatrix]:
    """Steady states at cutoffs N and N + 3 whose tracked moments agree to tol.

    The pair starts at rho's cutoff and moves up by 3 while the change between
    its members exceeds tol, for at most config.max_truncation_attempts pairs.
    The last pair is returned even when it has not converged.
    """
    config = config or IntegrationConfig()

    def steady_at(truncation: int) -> TwoModeDensityMatrix:
        return fock_steady_state(
            params, which, config.model_copy(update={"truncation": truncation})
        )

    smaller, larger = rho, steady_at(rho.truncation + TRUNCATION_GROWTH)
    for _ in range(config.max_truncation_attempts - 1):
        change = tracked_moments(smaller).max_abs_difference(tracked_moments(larger))
        if change <= tol:
            break
        logger.info(
            "fock_truncation_study_grown",
            system=which.value,
            truncation=smaller.truncation,
            change=change,
            tolerance=tol,
        )
        smaller, larger = larger, steady_at(larger.truncation + TRUNCATION_GROWTH)
    return smaller, larger


def density_moments(rho: TwoModeDensityMatrix, order: int = 4) -> MomentTable:
    """All normally ordered moments <a+^p a^q b+^r b^s> with p + q + r + s <= order.

    Raises:
        OrderTooHighError: If order > 4.
    """
    check_order(order)
    return MomentTable(
        order=order,
        values={
            word: rho.expectation(normally_ordered(rho.truncation, *word))
            for word in words_up_to(order)
        },
    )
