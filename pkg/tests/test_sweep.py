"""Tests for observable evaluation, stats reports and gamma sweeps."""

import io
import math

import pytest

from cavityq.errors import ThresholdDivergenceError
from cavityq.models import Observable, SweepSpec, SystemParams
from cavityq.statistics import epr_report
from cavityq.sweep import (
    evaluate_observable,
    run_sweep,
    stats_report,
    sweep_header,
    write_sweep,
)


@pytest.fixture
def threshold_sweep() -> SweepSpec:
    """Three-point sweep from no pump up to threshold at kappa = 0.8."""
    return SweepSpec(kappa=0.8, gamma_max=0.4, steps=3)


class TestEvaluateObservable:
    """Tests for evaluate_observable."""

    def test_finite_value(self, reference_params: SystemParams) -> None:
        """Test a plain closed-form value passes through."""
        assert evaluate_observable(Observable.PLUS_VAR, reference_params) == pytest.approx(3.25)

    def test_divergent_at_threshold(self, threshold_params: SystemParams) -> None:
        """Test the minus variance is reported as inf at threshold."""
        assert evaluate_observable(Observable.MINUS_VAR, threshold_params) == math.inf
        assert evaluate_observable(Observable.MEAN_PHOTON, threshold_params) == math.inf

    def test_finite_limit_at_threshold(self, threshold_params: SystemParams) -> None:
        """Test squeezing uses its finite limit at threshold."""
        assert evaluate_observable(Observable.SQUEEZING, threshold_params) == pytest.approx(0.25)
        assert evaluate_observable(Observable.DEGREE, threshold_params) == pytest.approx(0.75)

    def test_above_threshold_raises(self) -> None:
        """Test above threshold is an error rather than inf."""
        with pytest.raises(ThresholdDivergenceError):
            evaluate_observable(Observable.MEAN_PHOTON, SystemParams(kappa=0.8, gamma=0.5))

    def test_undefined_correlation(self, vacuum_params: SystemParams) -> None:
        """Test g2 of the vacuum is None."""
        assert evaluate_observable(Observable.G2_A, vacuum_params) is None


class TestStatsReport:
    """Tests for stats_report."""

    def test_full_report(self, reference_params: SystemParams) -> None:
        """Test the report leads with the regime and ends with the entanglement flag."""
        report = dict(stats_report(reference_params))
        names = [name for name, _ in stats_report(reference_params)]
        assert names[:2] == ["regime", "margin"]
        assert names[-1] == "entangled"
        assert report["regime"] == "subthreshold"
        assert report["margin"] == pytest.approx(0.4)
        assert report["mean_photon"] == pytest.approx(0.7225)
        assert report["cs_satisfied"] is False
        assert report["entangled"] is True

    def test_only(self, reference_params: SystemParams) -> None:
        """Test only the requested observables are listed, in request order."""
        report = stats_report(
            reference_params, only=(Observable.SQUEEZING, Observable.PLUS_VAR)
        )
        assert [name for name, _ in report] == ["squeezing", "plus_var"]
        assert report[0][1] == pytest.approx(0.1875)

    def test_threshold_report(self, threshold_params: SystemParams) -> None:
        """Test the full report at threshold carries inf entries."""
        report = dict(stats_report(threshold_params))
        assert report["regime"] == "at_threshold"
        assert report["minus_var"] == math.inf
        assert report["squeezing"] == pytest.approx(0.25)
        assert report["cs_satisfied"] is True

    def test_correlations_match_epr_report(self, reference_params: SystemParams) -> None:
        """Test the correlation and EPR lines carry the entanglement report fields."""
        report = dict(stats_report(reference_params))
        expected = epr_report(reference_params)
        for name in ("g2_a", "g2_b", "g2_ab", "epr_sum", "degree", "cs_lhs", "cs_rhs"):
            assert report[name] == getattr(expected, name)
        assert report["cs_lhs"] == pytest.approx(3.9382258, abs=1e-7)
        assert report["degree"] == pytest.approx(0.8125)

    def test_transient_marks_steady_quantities(self, reference_params: SystemParams) -> None:
        """Test a finite-time report names the steady-only quantities with a suffix."""
        report = dict(stats_report(reference_params, 1.0))
        assert report["time"] == 1.0
        assert report["mean_photon"] == pytest.approx(0.5625 + 0.16 * (1.0 - math.exp(-0.5)) ** 2)
        assert report["plus_var_steady"] == pytest.approx(3.25)
        assert report["g2_ab_steady"] == pytest.approx(2.76573453)
        assert report["entangled_steady"] is True
        assert "plus_var" not in report
        assert "g2_a" not in report

    def test_transient_only(self, reference_params: SystemParams) -> None:
        """Test requested steady-only observables keep the suffix at finite time."""
        report = stats_report(
            reference_params, 1.0, only=(Observable.SQUEEZING, Observable.MEAN_PHOTON)
        )
        assert [name for name, _ in report] == ["squeezing_steady", "mean_photon"]

    def test_only_divergent_raises(self, threshold_params: SystemParams) -> None:
        """Test requesting a divergent observable fails."""
        with pytest.raises(ThresholdDivergenceError):
            stats_report(threshold_params, only=(Observable.MINUS_VAR,))

    def test_above_threshold_raises(self) -> None:
        """Test the report refuses parameters above threshold."""
        with pytest.raises(ThresholdDivergenceError):
            stats_report(SystemParams(kappa=0.8, gamma=0.41))

    def test_vacuum_correlations_undefined(self, vacuum_params: SystemParams) -> None:
        """Test undefined g2 leaves the Cauchy-Schwarz entries undefined."""
        report = dict(stats_report(vacuum_params))
        assert report["g2_a"] is None
        assert report["cs_satisfied"] is None
        assert report["entangled"] is False


class TestRunSweep:
    """Tests for gamma sweeps."""

    def test_rows(self, threshold_sweep: SweepSpec) -> None:
        """Test the plus variance falls 4 -> 10/3 -> 3 and squeezing reaches 0.25."""
        rows = run_sweep(threshold_sweep)
        assert [row[0] for row in rows] == pytest.approx([0.0, 0.2, 0.4])
        assert rows[0][1:] == pytest.approx([4.0, 0.0, 4.0])
        assert rows[1][1:] == pytest.approx([3.3333333, 0.1666667, 3.3333333], abs=1e-7)
        assert rows[2][1:] == pytest.approx([3.0, 0.25, 3.0])

    def test_squeezing_monotone(self) -> None:
        """Test squeezing grows monotonically toward threshold."""
        rows = run_sweep(
            SweepSpec(kappa=0.8, gamma_max=0.4, steps=41, observables=(Observable.SQUEEZING,))
        )
        values = [row[1] for row in rows]
        assert all(
            isinstance(a, float) and isinstance(b, float) and a < b
            for a, b in zip(values, values[1:], strict=False)
        )

    def test_epr_sum_tracks_plus_variance(self) -> None:
        """Test the EPR column equals the plus variance column."""
        rows = run_sweep(SweepSpec(kappa=1.0, gamma_max=0.5, steps=11, epsilon=0.1))
        for row in rows:
            assert row[3] == pytest.approx(row[1], abs=1e-12)

    def test_divergent_column(self) -> None:
        """Test the last row carries inf for the minus variance."""
        rows = run_sweep(
            SweepSpec(kappa=0.8, gamma_max=0.4, steps=3, observables=(Observable.MINUS_VAR,))
        )
        assert rows[-1][1] == math.inf

    def test_undefined_becomes_nan(self) -> None:
        """Test undefined g2 appears as nan in sweep rows."""
        rows = run_sweep(
            SweepSpec(kappa=1.0, gamma_max=0.2, steps=2, observables=(Observable.G2_A,))
        )
        assert isinstance(rows[0][1], float)
        assert math.isnan(rows[0][1])

    def test_workers_keep_grid_order(self, threshold_sweep: SweepSpec) -> None:
        """Test a parallel sweep returns the same rows as a serial one."""
        parallel = threshold_sweep.model_copy(update={"workers": 4})
        assert run_sweep(parallel) == run_sweep(threshold_sweep)


class TestWriteSweep:
    """Tests for sweep CSV output."""

    def test_header(self, threshold_sweep: SweepSpec) -> None:
        """Test the default header."""
        assert sweep_header(threshold_sweep) == ["gamma", "plus_var", "squeezing", "epr_sum"]

    def test_output(self, threshold_sweep: SweepSpec) -> None:
        """Test the CSV text for the three-point sweep."""
        stream = io.StringIO()
        write_sweep(stream, threshold_sweep)
        lines = stream.getvalue().splitlines()
        assert lines[0] == "gamma,plus_var,squeezing,epr_sum"
        assert lines[1] == "0.0,4.0,0.0,4.0"
        assert lines[3].startswith("0.4,3.0")
        assert len(lines) == 4

    def test_reproducible(self, threshold_sweep: SweepSpec) -> None:
        """Test two runs produce byte-identical output."""
        first, second = io.StringIO(), io.StringIO()
        write_sweep(first, threshold_sweep)
        write_sweep(second, threshold_sweep)
        assert first.getvalue() == second.getvalue()
