"""Prometheus metrics for cavityq runs.

Nothing is served; ``write_metrics`` dumps the registry in text format for a
node-exporter textfile collector when a metrics file is configured.
"""

from pathlib import Path

from prometheus_client import REGISTRY, Counter, Gauge, Histogram, write_to_textfile

INTEGRATION_BUCKETS = [0.01, 0.05, 0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0, 60.0, 120.0]

# Oracle integration metrics
integration_steps = Counter(
    "cavityq_integration_steps_total",
    "Fixed RK4 steps taken by the oracles",
    ["integrator"],
)

integration_duration = Histogram(
    "cavityq_integration_seconds",
    "Wall time of one oracle integration",
    ["integrator"],
    buckets=INTEGRATION_BUCKETS,
    unit="seconds",
)

fock_truncation = Gauge(
    "cavityq_fock_truncation",
    "Fock cutoff per mode of the last converged master-equation run",
    ["system"],
)

# Verification metrics
checks_total = Counter(
    "cavityq_checks_total",
    "Oracle-vs-closed-form checks run",
    ["result"],
)

# Sweep and report metrics
sweep_points = Counter(
    "cavityq_sweep_points_total",
    "Grid points evaluated by sweeps",
)

threshold_divergences = Counter(
    "cavityq_threshold_divergences_total",
    "Observables reported as divergent at threshold",
    ["observable"],
)


def record_integration(integrator: str, steps: int, duration_seconds: float) -> None:
    """Record one finished integration.

    Args:
        integrator: Integrator label (coherent_odes, subharmonic_odes, fock).
        steps: Number of RK4 steps taken.
        duration_seconds: Wall time in seconds.
    """
    integration_steps.labels(integrator=integrator).inc(steps)
    integration_duration.labels(integrator=integrator).observe(duration_seconds)


def record_fock_truncation(system: str, truncation: int) -> None:
    """Record the cutoff a master-equation run converged with."""
    fock_truncation.labels(system=system).set(truncation)


def record_check(passed: bool) -> None:
    """Record a verification check outcome."""
    checks_total.labels(result="pass" if passed else "fail").inc()


def record_sweep_point() -> None:
    """Record one evaluated sweep row."""
    sweep_points.inc()


def record_threshold_divergence(observable: str) -> None:
    """Record an observable emitted as infinite at threshold."""
    threshold_divergences.labels(observable=observable).inc()


def write_metrics(path: Path) -> None:
    """Write the default registry to ``path`` in Prometheus text format."""
    write_to_textfile(str(path), REGISTRY)
