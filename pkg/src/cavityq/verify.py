"""Oracle-versus-closed-form verification suite behind ``cavityq verify``.

Each check reports the measured deviation and its tolerance. Fock states are
built once and shared by every check that needs them.
"""

import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from cavityq.coherent import coherent_moments, coherent_qfunction, displacement
from cavityq.logging import get_logger
from cavityq.metrics import record_check
from cavityq.models import STEADY, IntegrationConfig, ModeMoments, SystemParams
from cavityq.oracles.composite import (
    composite_observables,
    fluctuation_factorization_residual,
    superposed_moment,
)
from cavityq.oracles.fock import (
    Mode,
    OracleSystem,
    TwoModeDensityMatrix,
    density_moments,
    fock_steady_state,
    fock_steady_state_adaptive,
    fock_truncation_study,
    tracked_moments,
)
from cavityq.oracles.moment_odes import (
    MomentVector,
    integrate_coherent_odes,
    integrate_subharmonic_odes,
)
from cavityq.oracles.quadrature import (
    gaussian_integral_identity,
    gaussian_integral_quadrature,
    integrate_plane,
    marginal_moments_by_quadrature,
    numeric_marginal_qfunction,
    numeric_qfunction,
    plane_grid,
)
from cavityq.params import require_regime
from cavityq.statistics import (
    epr_sum,
    g2_cross,
    g2_single,
    mean_photon,
    photon_variance,
    photon_variance_assembled,
    quadrature_report,
)
from cavityq.subharmonic import char_coefficients, steady_moments, subharmonic_qfunction
from cavityq.superposition import (
    marginal,
    q_mean_photon_single,
    q_normal_fourth_moment_single,
    superpose,
)

logger = get_logger(__name__)

ALGEBRA_TOL = 1e-12
IDENTITY_TOL = 1e-8
ODE_TOL = 1e-8
FOCK_TOL = 1e-6
TRACE_TOL = 1e-9
HERMITICITY_TOL = 1e-12
POSITIVITY_TOL = 1e-8
TRUNCATION_STUDY_TOL = 1e-8
TRUNCATION_STUDY_MAX_RATIO = 0.3
NORMALIZATION_TOL = 1e-6
QUADRATURE_MEAN_TOL = 1e-3
NUMERIC_NORMALIZATION_TOL = 1e-4
COHERENT_TRUNCATION = 8
TRUNCATION_STEP = 3

GAUSSIAN_CASES = (
    (1.0, 0.0, 0.0, 0.0, 0.0),
    (1.0, 0.5, 0.3, 0.0, 0.0),
    (2.0, 0.0, 0.0, 0.3, 0.3),
    (1.5, 0.2 + 0.1j, 0.4 - 0.2j, 0.1 + 0.05j, 0.2),
)
LATTICE_GAMMA_FRACTIONS = (0.0, 0.1, 0.2, 0.3, 0.45)
LATTICE_EPSILON_FRACTIONS = (0.0, 0.05, 0.1, 0.2)


@dataclass(frozen=True)
class CheckResult:
    """One verification line."""

    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        """Deviation within tolerance (NaN never passes)."""
        return self.measured <= self.tolerance

    def line(self) -> str:
        """``CHECK <name> <measured> <tolerance> PASS|FAIL``."""
        verdict = "PASS" if self.passed else "FAIL"
        return f"CHECK {self.name} {self.measured!r} {self.tolerance!r} {verdict}"


@dataclass
class VerificationReport:
    """Checks in the order they ran."""

    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True iff every check passed."""
        return all(check.passed for check in self.checks)

    def add(self, name: str, measured: float, tolerance: float) -> None:
        """Record a check, its metric, and a warning when it fails."""
        result = CheckResult(name, float(measured), tolerance)
        self.checks.append(result)
        record_check(result.passed)
        if not result.passed:
            logger.warning("check_failed", name=name, measured=measured, tolerance=tolerance)

    def lines(self) -> Iterator[str]:
        """Report lines."""
        return (check.line() for check in self.checks)


def relative_deviation(measured: complex, expected: complex) -> float:
    """|measured - expected| / max(1, |expected|)."""
    return abs(measured - expected) / max(1.0, abs(expected))


def _moment_deviation(measured: MomentVector, expected: MomentVector) -> float:
    deviations = np.abs(measured.to_array() - expected.to_array())
    scale = np.maximum(1.0, np.abs(expected.to_array()))
    return float(np.max(deviations / scale))


def expected_subharmonic_moments(params: SystemParams) -> MomentVector:
    """Closed-form steady moments of the parametric pair as a MomentVector."""
    moments = steady_moments(params)
    return MomentVector(
        time=math.inf,
        a_dag_a=moments.n_a,
        b_dag_b=moments.n_a,
        ab=moments.m_ab,
        a_dag_b_dag=moments.m_ab,
    )


def expected_coherent_moments(params: SystemParams) -> MomentVector:
    """Closed-form steady moments of the driven cavity as a MomentVector."""
    m = coherent_moments(params, STEADY)
    return MomentVector(
        time=math.inf,
        a=m.mean_a,
        b=m.mean_b,
        a_dag_a=m.n_a,
        b_dag_b=m.n_b,
        ab=m.ab,
        a_dag_b=m.a_dag_b,
        a_sq=m.a_sq,
        b_sq=m.b_sq,
        a_dag_b_dag=m.ab,
    )


def _real_mode_moments(moments: MomentVector) -> ModeMoments:
    return ModeMoments(
        mean_a=moments.a.real,
        mean_b=moments.b.real,
        n_a=moments.a_dag_a.real,
        n_b=moments.b_dag_b.real,
        ab=moments.ab.real,
        a_dag_b=moments.a_dag_b.real,
        a_sq=moments.a_sq.real,
        b_sq=moments.b_sq.real,
    )


def _lattice(params: SystemParams) -> Iterator[SystemParams]:
    kappa = params.kappa
    for gamma, epsilon in product(LATTICE_GAMMA_FRACTIONS, LATTICE_EPSILON_FRACTIONS):
        yield SystemParams(kappa=kappa, gamma=gamma * kappa, epsilon=epsilon * kappa)


def check_algebra(report: VerificationReport, params: SystemParams) -> None:
    """Internal consistency of the closed forms over a 20-point lattice around kappa."""
    assembly = uncertainty = epr = characteristic = 0.0
    for point in _lattice(params):
        assembly = max(
            assembly,
            relative_deviation(photon_variance(point), photon_variance_assembled(point)),
        )
        quadratures = quadrature_report(point)
        kappa, gamma = point.kappa, point.gamma
        expected_product = 16.0 * (kappa**2 - gamma**2) / (kappa**2 - 4.0 * gamma**2)
        uncertainty = max(
            uncertainty,
            relative_deviation(quadratures.plus_var * quadratures.minus_var, expected_product),
        )
        epr = max(epr, abs(epr_sum(point) - quadratures.plus_var))
        coefficients = char_coefficients(point)
        characteristic = max(
            characteristic,
            relative_deviation(coefficients.a_coef - 1.0, steady_moments(point).n_a),
        )
    report.add("algebra.variance_assembly", assembly, ALGEBRA_TOL)
    report.add("algebra.uncertainty_product", uncertainty, ALGEBRA_TOL)
    report.add("algebra.epr_equals_plus_var", epr, ALGEBRA_TOL)
    report.add("algebra.characteristic_a_minus_one", characteristic, ALGEBRA_TOL)


def check_gaussian_identity(report: VerificationReport) -> None:
    """Closed-form Gaussian integral against plane quadrature."""
    for index, (a, b, c, big_a, big_b) in enumerate(GAUSSIAN_CASES):
        closed = gaussian_integral_identity(a, b, c, big_a, big_b)
        numeric = gaussian_integral_quadrature(a, b, c, big_a, big_b)
        report.add(f"gaussian_identity.case{index}", abs(closed - numeric), IDENTITY_TOL)


def check_superposed_q(report: VerificationReport, params: SystemParams) -> None:
    """Superposed Q: marginal normalization and antinormal mean by quadrature."""
    q_sup = superpose(coherent_qfunction(params, STEADY), subharmonic_qfunction(params))
    single = marginal(q_sup)
    extent = max(6.0, abs(single.d) + 7.0 / math.sqrt(single.w))
    norm, mean = marginal_moments_by_quadrature(single, extent=extent)
    q = displacement(params, STEADY)
    expected_mean = steady_moments(params).n_a + q * q
    report.add("superposed_q.marginal_normalization", abs(norm - 1.0), NORMALIZATION_TOL)
    report.add(
        "superposed_q.mean_photon_quadrature", abs(mean - expected_mean), QUADRATURE_MEAN_TOL
    )
    report.add(
        "superposed_q.mean_photon_closed_form",
        relative_deviation(q_mean_photon_single(q_sup), expected_mean),
        ALGEBRA_TOL,
    )

    coherent_marginal = marginal(coherent_qfunction(params, STEADY))
    _, coherent_mean = marginal_moments_by_quadrature(
        coherent_marginal, extent=max(6.0, abs(coherent_marginal.d) + 7.0)
    )
    report.add("coherent_q.antinormal_mean", abs(coherent_mean - q * q), IDENTITY_TOL)


def check_moment_odes(report: VerificationReport, params: SystemParams) -> MomentVector:
    """Moment-equation oracles against the closed forms; returns the subharmonic steady vector."""
    subharmonic = integrate_subharmonic_odes(params).final
    report.add(
        "moment_odes.subharmonic_steady",
        _moment_deviation(subharmonic, expected_subharmonic_moments(params)),
        ODE_TOL,
    )
    coherent = integrate_coherent_odes(params).final
    report.add(
        "moment_odes.coherent_steady",
        _moment_deviation(coherent, expected_coherent_moments(params)),
        ODE_TOL,
    )
    transient = integrate_coherent_odes(params, IntegrationConfig(t_end=1.0, steady=False)).final
    report.add(
        "moment_odes.coherent_transient_t1",
        abs(transient.a - displacement(params, 1.0)),
        ODE_TOL,
    )
    return subharmonic


def _density_invariants(report: VerificationReport, label: str, rho: TwoModeDensityMatrix) -> None:
    report.add(f"{label}.trace", abs(rho.trace() - 1.0), TRACE_TOL)
    report.add(f"{label}.hermiticity", rho.hermiticity_error(), HERMITICITY_TOL)
    report.add(f"{label}.positivity", max(0.0, -rho.min_eigenvalue()), POSITIVITY_TOL)


def check_fock(
    report: VerificationReport,
    params: SystemParams,
    subharmonic_rho: TwoModeDensityMatrix,
    study_pair: tuple[TwoModeDensityMatrix, TwoModeDensityMatrix],
    study_tol: float,
    coherent_rho: TwoModeDensityMatrix,
    ode_steady: MomentVector,
) -> None:
    """Master-equation states: invariants, closed forms, moment ODEs, and the truncation study."""
    _density_invariants(report, "fock.subharmonic", subharmonic_rho)
    fock_moments = tracked_moments(subharmonic_rho)
    report.add(
        "fock.subharmonic_moments",
        _moment_deviation(fock_moments, expected_subharmonic_moments(params)),
        FOCK_TOL,
    )
    report.add("fock.subharmonic_vs_odes", fock_moments.max_abs_difference(ode_steady), FOCK_TOL)
    smaller, larger = study_pair
    report.add(
        f"fock.truncation_{smaller.truncation}_vs_{larger.truncation}",
        tracked_moments(smaller).max_abs_difference(tracked_moments(larger)),
        study_tol,
    )

    _density_invariants(report, "fock.coherent", coherent_rho)
    report.add(
        "fock.coherent_moments",
        _moment_deviation(tracked_moments(coherent_rho), expected_coherent_moments(params)),
        FOCK_TOL,
    )
    report.add("fock.coherent_purity", abs(coherent_rho.purity() - 1.0), FOCK_TOL)
    primed = _real_mode_moments(tracked_moments(coherent_rho)).fluctuation()
    report.add(
        "fock.coherent_fluctuations",
        max(abs(primed.n_a), abs(primed.n_b), abs(primed.ab), abs(primed.a_sq)),
        FOCK_TOL,
    )
    q = displacement(params, STEADY)
    fourth = density_moments(coherent_rho)[(2, 2, 0, 0)]
    report.add("fock.coherent_fourth_moment", abs(fourth - q**4), IDENTITY_TOL)


def check_composite(
    report: VerificationReport,
    params: SystemParams,
    subharmonic_rho: TwoModeDensityMatrix,
    coherent_rho: TwoModeDensityMatrix,
    tol: float,
) -> None:
    """Composite-moment expansion over Fock moment tables against the closed forms."""
    coherent_table = density_moments(coherent_rho)
    subharmonic_table = density_moments(subharmonic_rho)
    observables = composite_observables(coherent_table, subharmonic_table)
    quadratures = quadrature_report(params)
    expected: dict[str, tuple[float | None, float]] = {
        "mean_photon": (observables.mean_photon, mean_photon(params)),
        "photon_variance": (observables.photon_variance, photon_variance(params)),
        "plus_var": (observables.plus_var, quadratures.plus_var),
        "minus_var": (observables.minus_var, quadratures.minus_var),
        "epr_sum": (observables.epr_sum, epr_sum(params)),
    }
    if observables.g2_a is not None and observables.g2_ab is not None:
        g2 = g2_single(params)
        expected["g2_a"] = (observables.g2_a, g2)
        expected["g2_b"] = (observables.g2_b, g2)
        expected["g2_ab"] = (observables.g2_ab, g2_cross(params))
    for name, (measured, closed) in expected.items():
        deviation = math.inf if measured is None else relative_deviation(measured, closed)
        report.add(f"composite.{name}", deviation, tol)

    report.add(
        "composite.gaussian_factorization",
        fluctuation_factorization_residual(subharmonic_table),
        FOCK_TOL,
    )
    q_sup = superpose(coherent_qfunction(params, STEADY), subharmonic_qfunction(params))
    report.add(
        "composite.antinormal_mean_photon",
        relative_deviation(
            q_mean_photon_single(q_sup),
            superposed_moment((1, 1, 0, 0), coherent_table, subharmonic_table).real,
        ),
        tol,
    )
    report.add(
        "composite.antinormal_fourth_moment",
        relative_deviation(
            q_normal_fourth_moment_single(q_sup),
            superposed_moment((2, 2, 0, 0), coherent_table, subharmonic_table).real,
        ),
        tol,
    )


def check_numeric_q(
    report: VerificationReport,
    params: SystemParams,
    subharmonic_rho: TwoModeDensityMatrix,
) -> None:
    """Husimi values from the Fock state against the analytic subharmonic Q."""
    analytic = subharmonic_qfunction(params)
    axis = np.linspace(-2.0, 2.0, 9)
    alpha, beta = np.meshgrid(axis, axis, indexing="ij")
    numeric = numeric_qfunction(subharmonic_rho, alpha, beta)
    report.add(
        "qfunction.pointwise_9x9",
        float(np.max(np.abs(numeric - analytic.evaluate(alpha, beta)))),
        FOCK_TOL,
    )
    origin = float(numeric_qfunction(subharmonic_rho, 0.0, 0.0))
    report.add("qfunction.origin", abs(origin - analytic.prefactor), FOCK_TOL)

    w = marginal(analytic).w
    re, im, z = plane_grid(max(6.0, 7.0 / math.sqrt(w)), 161)
    values = numeric_marginal_qfunction(subharmonic_rho, z, Mode.A)
    report.add(
        "qfunction.numeric_marginal_normalization",
        abs(integrate_plane(values, re, im).real - 1.0),
        NUMERIC_NORMALIZATION_TOL,
    )


def _subharmonic_states(
    params: SystemParams,
    fock_dim: int | None,
    default_dim: int,
    study_tol: float,
) -> tuple[TwoModeDensityMatrix, TwoModeDensityMatrix, TwoModeDensityMatrix]:
    """Working steady state and the converged N vs N + 3 truncation-study pair."""
    if fock_dim is None:
        rho = fock_steady_state_adaptive(
            params, OracleSystem.SUBHARMONIC, IntegrationConfig(truncation=default_dim)
        )
    else:
        rho = fock_steady_state(
            params, OracleSystem.SUBHARMONIC, IntegrationConfig(truncation=fock_dim)
        )
    smaller, larger = fock_truncation_study(params, OracleSystem.SUBHARMONIC, rho, study_tol)
    return rho, smaller, larger


def run_verification(
    params: SystemParams,
    fock_dim: int | None = None,
    tol: float = 1e-4,
    default_dim: int = 15,
) -> VerificationReport:
    """Run every oracle check.

    Args:
        params: Parameter triple; must be below threshold.
        fock_dim: Fixed Fock cutoff for the subharmonic oracle. None grows the
            cutoff from ``default_dim`` until the truncation test passes.
        tol: Tolerance of the composite-moment comparisons.
        default_dim: Starting cutoff when ``fock_dim`` is None.

    Raises:
        ThresholdDivergenceError: At or above threshold.
        TruncationTooSmallError: If the Fock cutoff cannot hold the state.
        NoConvergenceError: If an oracle does not settle before t_end.
    """
    require_regime(params, "verify")
    log = logger.bind(kappa=params.kappa, gamma=params.gamma, epsilon=params.epsilon)
    log.info("verification_started", fock_dim=fock_dim, tol=tol)

    study_tol = (
        TRUNCATION_STUDY_TOL if params.gamma / params.kappa <= TRUNCATION_STUDY_MAX_RATIO else tol
    )
    subharmonic_rho, smaller_rho, larger_rho = _subharmonic_states(
        params, fock_dim, default_dim, study_tol
    )
    coherent_rho = fock_steady_state_adaptive(
        params, OracleSystem.COHERENT, IntegrationConfig(truncation=COHERENT_TRUNCATION)
    )

    report = VerificationReport()
    check_algebra(report, params)
    check_gaussian_identity(report)
    check_superposed_q(report, params)
    ode_steady = check_moment_odes(report, params)
    check_fock(
        report,
        params,
        subharmonic_rho,
        (smaller_rho, larger_rho),
        study_tol,
        coherent_rho,
        ode_steady,
    )
    check_composite(report, params, subharmonic_rho, coherent_rho, tol)
    check_numeric_q(report, params, subharmonic_rho)

    failed = sum(not check.passed for check in report.checks)
    log.info("verification_finished", checks=len(report.checks), failed=failed)
    return report
