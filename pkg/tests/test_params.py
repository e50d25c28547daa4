"""Tests for parameter validation and threshold classification."""

import math

import pytest

from cavityq.errors import (
    NegativeRateError,
    NegativeTimeError,
    NonFiniteError,
    NonPositiveKappaError,
    ParameterError,
    ThresholdDivergenceError,
)
from cavityq.models import STEADY, Regime, SystemParams
from cavityq.params import lambda_pm, require_regime, require_time, validate


class TestValidate:
    """Tests for validate."""

    def test_subthreshold_margin(self) -> None:
        """Test margin (kappa - 2 gamma)/kappa below threshold."""
        result = validate(SystemParams(kappa=1.0, gamma=0.3, epsilon=0.1))
        assert result.regime is Regime.SUBTHRESHOLD
        assert result.margin == pytest.approx(0.4, abs=1e-15)

    def test_exactly_at_threshold(self) -> None:
        """Test kappa = 2 gamma classifies as at threshold with zero margin."""
        result = validate(SystemParams(kappa=0.8, gamma=0.4, epsilon=0.1))
        assert result.regime is Regime.AT_THRESHOLD
        assert result.margin == 0.0

    def test_above_threshold(self) -> None:
        """Test a negative margin above threshold."""
        result = validate(SystemParams(kappa=1.0, gamma=0.6))
        assert result.regime is Regime.ABOVE_THRESHOLD
        assert result.margin == pytest.approx(-0.2)

    @pytest.mark.parametrize("scale", [0.25, 3.0, 1000.0])
    @pytest.mark.parametrize(
        ("kappa", "gamma", "regime"),
        [
            (1.0, 0.3, Regime.SUBTHRESHOLD),
            (0.8, 0.4, Regime.AT_THRESHOLD),
            (1.0, 0.6, Regime.ABOVE_THRESHOLD),
        ],
    )
    def test_classification_is_scale_free(
        self, scale: float, kappa: float, gamma: float, regime: Regime
    ) -> None:
        """Test scaling kappa, gamma and epsilon together keeps the regime and margin."""
        base = validate(SystemParams(kappa=kappa, gamma=gamma, epsilon=0.1))
        scaled = validate(
            SystemParams(kappa=kappa * scale, gamma=gamma * scale, epsilon=0.1 * scale)
        )
        assert base.regime is regime
        assert scaled.regime is regime
        assert scaled.margin == pytest.approx(base.margin, abs=1e-12)

    def test_vacuum_margin_is_one(self) -> None:
        """Test that gamma = 0 gives margin 1."""
        assert validate(SystemParams(kappa=2.0)).margin == 1.0

    def test_zero_kappa(self) -> None:
        """Test that kappa = 0 is rejected."""
        with pytest.raises(NonPositiveKappaError):
            validate(SystemParams(kappa=0.0, gamma=0.1))

    def test_negative_gamma(self) -> None:
        """Test that a negative coupling is rejected and names the field."""
        with pytest.raises(NegativeRateError) as exc_info:
            validate(SystemParams(kappa=1.0, gamma=-0.1))
        assert exc_info.value.name == "gamma"

    def test_negative_epsilon(self) -> None:
        """Test that a negative drive is rejected."""
        with pytest.raises(NegativeRateError):
            validate(SystemParams(kappa=1.0, epsilon=-0.1))

    @pytest.mark.parametrize("value", [math.nan, math.inf, -math.inf])
    def test_non_finite(self, value: float) -> None:
        """Test that NaN and infinite inputs are rejected."""
        with pytest.raises(NonFiniteError):
            validate(SystemParams(kappa=1.0, gamma=value))

    def test_parameter_errors_are_value_errors(self) -> None:
        """Test that parameter errors carry the usage exit code."""
        with pytest.raises(ValueError) as exc_info:
            validate(SystemParams(kappa=-1.0))
        assert isinstance(exc_info.value, ParameterError)
        assert exc_info.value.exit_code == 2


class TestLambdaPm:
    """Tests for the eigen-decay rates."""

    def test_threshold_slow_rate_vanishes(self) -> None:
        """Test lambda- = 0 at threshold."""
        assert lambda_pm(SystemParams(kappa=0.8, gamma=0.4)) == pytest.approx((1.6, 0.0))

    def test_reference_point(self) -> None:
        """Test lambda+- at kappa=1, gamma=0.3."""
        assert lambda_pm(SystemParams(kappa=1.0, gamma=0.3)) == pytest.approx((1.6, 0.4))

    def test_no_pump_rates_equal_kappa(self) -> None:
        """Test lambda+ = lambda- = kappa when gamma = 0."""
        assert lambda_pm(SystemParams(kappa=1.0)) == (1.0, 1.0)

    @pytest.mark.parametrize(("kappa", "gamma"), [(1.0, 0.3), (0.8, 0.4), (2.5, 0.1), (1.0, 0.7)])
    def test_sum_and_difference(self, kappa: float, gamma: float) -> None:
        """Test lambda+ + lambda- = 2 kappa and lambda+ - lambda- = 4 gamma."""
        plus, minus = lambda_pm(SystemParams(kappa=kappa, gamma=gamma))
        assert plus + minus == pytest.approx(2.0 * kappa, abs=1e-12)
        assert plus - minus == pytest.approx(4.0 * gamma, abs=1e-12)


class TestRequireRegime:
    """Tests for require_regime."""

    def test_subthreshold_passes(self) -> None:
        """Test that subthreshold parameters pass."""
        assert require_regime(SystemParams(kappa=1.0, gamma=0.3), "n") is Regime.SUBTHRESHOLD

    def test_threshold_rejected_by_default(self) -> None:
        """Test that threshold is rejected unless allowed."""
        with pytest.raises(ThresholdDivergenceError) as exc_info:
            require_regime(SystemParams(kappa=0.8, gamma=0.4), "mean_photon")
        assert exc_info.value.observable == "mean_photon"
        assert exc_info.value.exit_code == 3

    def test_threshold_allowed(self) -> None:
        """Test that threshold passes when allowed."""
        regime = require_regime(SystemParams(kappa=0.8, gamma=0.4), "s", allow_threshold=True)
        assert regime is Regime.AT_THRESHOLD

    def test_above_threshold_always_rejected(self) -> None:
        """Test that above threshold is rejected even when threshold is allowed."""
        with pytest.raises(ThresholdDivergenceError):
            require_regime(SystemParams(kappa=1.0, gamma=0.7), "s", allow_threshold=True)


class TestRequireTime:
    """Tests for require_time."""

    def test_steady_passes(self) -> None:
        """Test that the steady marker passes through."""
        assert require_time(STEADY) is STEADY

    def test_zero_passes(self) -> None:
        """Test that t = 0 is accepted."""
        assert require_time(0.0) == 0.0

    def test_negative_rejected(self) -> None:
        """Test that t < 0 is rejected."""
        with pytest.raises(NegativeTimeError):
            require_time(-1.0)

    def test_nan_rejected(self) -> None:
        """Test that NaN times are rejected."""
        with pytest.raises(NonFiniteError):
            require_time(math.nan)
