"""Observable evaluation for reports and gamma sweeps.

At threshold, quantities with finite limits use them; quantities that diverge
are reported as ``inf`` with a warning instead of aborting the whole report.
"""

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import TextIO

from cavityq.errors import ThresholdDivergenceError, UndefinedCorrelationError
from cavityq.logging import get_logger
from cavityq.metrics import record_sweep_point, record_threshold_divergence
from cavityq.models import STEADY, Observable, Regime, SweepSpec, SystemParams, Time
from cavityq.output import Value, write_csv
from cavityq.params import validate
from cavityq.statistics import (
    epr_deficit,
    epr_report,
    epr_sum,
    g2_cross,
    g2_single,
    mean_photon,
    photon_variance,
    quadrature_report,
)

logger = get_logger(__name__)

STEADY_SUFFIX = "_steady"
TIME_RESOLVED_NAMES = frozenset(
    {"regime", "margin", "time", Observable.MEAN_PHOTON.value, Observable.PHOTON_VARIANCE.value}
)
PHOTON_AND_QUADRATURE_OBSERVABLES = (
    Observable.MEAN_PHOTON,
    Observable.PHOTON_VARIANCE,
    Observable.PLUS_VAR,
    Observable.MINUS_VAR,
    Observable.SQUEEZING,
)
CORRELATION_OBSERVABLES = (
    Observable.G2_A,
    Observable.G2_B,
    Observable.G2_AB,
    Observable.EPR_SUM,
    Observable.DEGREE,
)

_EVALUATORS: dict[Observable, Callable[[SystemParams, Time], float]] = {
    Observable.MEAN_PHOTON: mean_photon,
    Observable.PHOTON_VARIANCE: photon_variance,
    Observable.PLUS_VAR: lambda p, _t: quadrature_report(p).plus_var,
    Observable.MINUS_VAR: lambda p, _t: quadrature_report(p).minus_var,
    Observable.SQUEEZING: lambda p, _t: quadrature_report(p).squeezing,
    Observable.G2_A: lambda p, _t: g2_single(p),
    Observable.G2_B: lambda p, _t: g2_single(p),
    Observable.G2_AB: lambda p, _t: g2_cross(p),
    Observable.EPR_SUM: lambda p, _t: epr_sum(p),
    Observable.DEGREE: lambda p, _t: epr_sum(p) / 4.0,
}


def _diverged(observable: Observable, params: SystemParams) -> float:
    logger.warning(
        "threshold_divergence",
        observable=observable.value,
        kappa=params.kappa,
        gamma=params.gamma,
    )
    record_threshold_divergence(observable.value)
    return math.inf


def evaluate_observable(
    observable: Observable,
    params: SystemParams,
    t: Time = STEADY,
) -> float | None:
    """Value of one observable; ``inf`` if it diverges at threshold, None if undefined.

    Raises:
        ThresholdDivergenceError: Above threshold.
    """
    try:
        value = _EVALUATORS[observable](params, t)
    except ThresholdDivergenceError:
        if validate(params).regime is not Regime.AT_THRESHOLD:
            raise
        return _diverged(observable, params)
    except UndefinedCorrelationError:
        logger.warning("undefined_correlation", observable=observable.value)
        return None
    if math.isinf(value):
        return _diverged(observable, params)
    return value


def _steady_label(name: str, t: Time) -> str:
    """Mark quantities without a transient form when the report is for a finite time."""
    if t is STEADY or name in TIME_RESOLVED_NAMES:
        return name
    return f"{name}{STEADY_SUFFIX}"


def _correlation_items(params: SystemParams) -> list[tuple[str, Value]]:
    """Correlation and EPR lines of the full report, in report order."""
    try:
        report = epr_report(params)
    except UndefinedCorrelationError:
        fallback = {
            observable: evaluate_observable(observable, params)
            for observable in CORRELATION_OBSERVABLES
        }
        return [
            *((observable.value, value) for observable, value in fallback.items()),
            ("cs_lhs", None),
            ("cs_rhs", None),
            ("cs_satisfied", None),
            ("entangled", epr_deficit(params) > 0.0),
        ]
    return [
        ("g2_a", report.g2_a),
        ("g2_b", report.g2_b),
        ("g2_ab", report.g2_ab),
        ("epr_sum", report.epr_sum),
        ("degree", report.degree),
        ("cs_lhs", report.cs_lhs),
        ("cs_rhs", report.cs_rhs),
        ("cs_satisfied", report.cs_satisfied),
        ("entangled", report.entangled),
    ]


def stats_report(
    params: SystemParams,
    t: Time = STEADY,
    only: tuple[Observable, ...] | None = None,
) -> list[tuple[str, Value]]:
    """Report lines for ``cavityq stats``.

    The full report leads with the regime and margin and adds the
    Cauchy-Schwarz sides and the entanglement flag. With ``only``, just the
    requested observables are listed and any that diverge raise. For a finite
    ``t`` a ``time`` line follows the margin, and every quantity that only has
    a steady-state form is named with a ``_steady`` suffix.

    Raises:
        ThresholdDivergenceError: Above threshold, or for a requested observable
            that diverges at threshold.
    """
    threshold = validate(params)
    if threshold.regime is Regime.ABOVE_THRESHOLD:
        raise ThresholdDivergenceError("stats", params.kappa, params.gamma)

    if only is not None:
        items: list[tuple[str, Value]] = []
        for observable in only:
            value = evaluate_observable(observable, params, t)
            if value is not None and math.isinf(value):
                raise ThresholdDivergenceError(observable.value, params.kappa, params.gamma)
            items.append((_steady_label(observable.value, t), value))
        return items

    items = [("regime", threshold.regime.value), ("margin", threshold.margin)]
    if t is not STEADY:
        items.append(("time", t))
    items.extend(
        (observable.value, evaluate_observable(observable, params, t))
        for observable in PHOTON_AND_QUADRATURE_OBSERVABLES
    )
    items.extend(_correlation_items(params))
    return [(_steady_label(name, t), value) for name, value in items]


def _sweep_row(spec: SweepSpec, gamma: float) -> list[Value]:
    params = SystemParams(kappa=spec.kappa, gamma=gamma, epsilon=spec.epsilon)
    row: list[Value] = [gamma]
    for observable in spec.observables:
        value = evaluate_observable(observable, params)
        row.append(math.nan if value is None else value)
    record_sweep_point()
    return row


def run_sweep(spec: SweepSpec) -> list[list[Value]]:
    """Evaluate every grid point; rows come back in grid order whatever the worker count."""
    gammas = [float(gamma) for gamma in spec.gammas()]
    logger.info(
        "sweep_started",
        kappa=spec.kappa,
        epsilon=spec.epsilon,
        points=len(gammas),
        workers=spec.workers,
    )
    with ThreadPoolExecutor(max_workers=spec.workers) as pool:
        rows = list(pool.map(lambda gamma: _sweep_row(spec, gamma), gammas))
    logger.info("sweep_finished", points=len(rows))
    return rows


def sweep_header(spec: SweepSpec) -> list[str]:
    """``gamma`` followed by the observable names."""
    return ["gamma", *(observable.value for observable in spec.observables)]


def write_sweep(stream: TextIO, spec: SweepSpec) -> None:
    """Run the sweep and write it as CSV."""
    write_csv(stream, sweep_header(spec), run_sweep(spec))
