"""Tests for the RK4 integrator and the moment-equation oracles."""

import numpy as np
import pytest
from numpy.typing import NDArray

from cavityq.errors import NoConvergenceError, StepSizeTooLargeError
from cavityq.models import IntegrationConfig, SystemParams
from cavityq.oracles.integrator import affine_propagator, linearize_affine, rk4_step
from cavityq.oracles.moment_odes import (
    MOMENT_NAMES,
    MomentVector,
    default_ode_step,
    integrate_coherent_odes,
    integrate_subharmonic_odes,
)


class TestRk4:
    """Tests for the fixed-step integrator."""

    def test_single_step_matches_taylor_polynomial(self) -> None:
        """Test one step of dy/dt = -y reproduces the fourth-order Taylor polynomial."""
        h = 0.1
        y = rk4_step(lambda _t, y: -y, 0.0, np.array([1.0 + 0j]), h)
        expected = 1 - h + h**2 / 2 - h**3 / 6 + h**4 / 24
        assert y[0].real == pytest.approx(expected, abs=1e-15)

    def test_affine_propagator_matches_stepping(self) -> None:
        """Test the folded propagator equals one explicit RK4 step."""
        matrix = np.array([[-1.0, 0.3], [0.2, -0.5]])
        source = np.array([0.1, -0.2])

        def rhs(y: NDArray[np.float64]) -> NDArray[np.float64]:
            result: NDArray[np.float64] = matrix @ y + source
            return result

        recovered, offset_source = linearize_affine(rhs, 2)
        np.testing.assert_allclose(recovered, matrix, atol=1e-15)
        np.testing.assert_allclose(offset_source, source, atol=1e-15)

        propagator, offset = affine_propagator(matrix, source, 0.05)
        y0 = np.array([0.7, -0.4])
        stepped = rk4_step(lambda _t, y: rhs(y), 0.0, y0, 0.05)
        np.testing.assert_allclose(propagator @ y0 + offset, stepped, atol=1e-15)


class TestMomentVector:
    """Tests for the moment container."""

    def test_round_trip_through_array(self) -> None:
        """Test the field order used by from_array and to_array."""
        values = np.arange(9) + 1j
        vector = MomentVector.from_array(2.0, values)
        assert vector.time == 2.0
        assert vector.a_dag_a == 2 + 1j
        np.testing.assert_array_equal(vector.to_array(), values)
        assert MOMENT_NAMES[0] == "a"
        assert MOMENT_NAMES[-1] == "a_dag_b_dag"


class TestCoherentOdes:
    """Tests for the driven-cavity moment equations."""

    def test_no_drive_stays_at_vacuum(self) -> None:
        """Test epsilon = 0 keeps every moment at zero."""
        trajectory = integrate_coherent_odes(SystemParams(kappa=1.0))
        assert trajectory.converged
        assert np.all(trajectory.final.to_array() == 0)

    def test_transient_amplitude(self) -> None:
        """Test <a>(1) = 0.2 (1 - exp(-1/2))."""
        trajectory = integrate_coherent_odes(
            SystemParams(kappa=1.0, epsilon=0.1), IntegrationConfig(t_end=1.0, steady=False)
        )
        assert trajectory.final.time == pytest.approx(1.0)
        assert trajectory.final.a.real == pytest.approx(0.0786939, abs=1e-7)
        assert trajectory.final.a.real == pytest.approx(0.0786938680574733, abs=1e-8)

    def test_steady_state(self) -> None:
        """Test the steady moments of the coherent state |0.2, 0.2>."""
        final = integrate_coherent_odes(SystemParams(kappa=1.0, epsilon=0.1)).final
        assert final.a_dag_a.real == pytest.approx(0.04, abs=1e-8)
        assert final.a.real == pytest.approx(0.2, abs=1e-8)
        assert final.a_dag_b.real == pytest.approx(0.04, abs=1e-8)
        assert final.a_sq.real == pytest.approx(0.04, abs=1e-8)

    def test_samples_are_time_ordered(self) -> None:
        """Test samples start at the vacuum and increase in time."""
        trajectory = integrate_coherent_odes(
            SystemParams(kappa=1.0, epsilon=0.1),
            IntegrationConfig(t_end=5.0, steady=False, sample_stride=50),
        )
        times = [sample.time for sample in trajectory.samples]
        assert times[0] == 0.0
        assert times == sorted(times)
        assert trajectory.steps == 500

    def test_step_guard(self) -> None:
        """Test dt * kappa > 0.1 is rejected."""
        with pytest.raises(StepSizeTooLargeError):
            integrate_coherent_odes(SystemParams(kappa=1.0, epsilon=0.1), IntegrationConfig(dt=0.2))


class TestSubharmonicOdes:
    """Tests for the parametric-pair moment equations."""

    def test_default_step(self) -> None:
        """Test dt = min(1e-2/kappa, 1e-2/lambda+)."""
        assert default_ode_step(SystemParams(kappa=1.0, gamma=0.3)) == pytest.approx(0.00625)

    def test_no_pump_stays_at_vacuum(self) -> None:
        """Test gamma = 0 keeps every moment at zero."""
        final = integrate_subharmonic_odes(SystemParams(kappa=1.0)).final
        assert np.all(final.to_array() == 0)

    def test_steady_state(self) -> None:
        """Test n = 0.28125 and <ab> = -0.46875 to 1e-8."""
        trajectory = integrate_subharmonic_odes(SystemParams(kappa=1.0, gamma=0.3))
        final = trajectory.final
        assert trajectory.converged
        assert final.a_dag_a.real == pytest.approx(0.28125, abs=1e-8)
        assert final.b_dag_b.real == pytest.approx(0.28125, abs=1e-8)
        assert final.ab.real == pytest.approx(-0.46875, abs=1e-8)
        assert abs(final.a_dag_b) < 1e-12
        assert abs(final.a_sq) < 1e-12

    def test_conjugate_pair_stays_consistent(self) -> None:
        """Test <a+b+> tracks the conjugate of <ab> and <a+a> stays real."""
        trajectory = integrate_subharmonic_odes(
            SystemParams(kappa=1.0, gamma=0.3), IntegrationConfig(t_end=3.0, steady=False)
        )
        for sample in trajectory.samples:
            assert sample.a_dag_b_dag == pytest.approx(sample.ab.conjugate(), abs=1e-12)
            assert abs(sample.a_dag_a.imag) < 1e-12
            assert sample.a_dag_a.real >= 0.0

    def test_threshold_never_settles(self) -> None:
        """Test the marginal mode at threshold prevents a steady state."""
        with pytest.raises(NoConvergenceError):
            integrate_subharmonic_odes(
                SystemParams(kappa=0.8, gamma=0.4), IntegrationConfig(t_end=20.0)
            )

    def test_step_guard_uses_fast_rate(self) -> None:
        """Test the guard applies to lambda+ = kappa + 2 gamma."""
        with pytest.raises(StepSizeTooLargeError):
            integrate_subharmonic_odes(
                SystemParams(kappa=1.0, gamma=0.3), IntegrationConfig(dt=0.08)
            )
