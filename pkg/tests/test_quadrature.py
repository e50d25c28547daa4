"""Tests for numeric Husimi functions and plane quadrature."""

import cmath
import math

import numpy as np
import pytest
from numpy.typing import NDArray

from cavityq.errors import DivergentError, TruncationTooSmallError
from cavityq.models import MarginalGaussianQ, SystemParams
from cavityq.oracles.fock import Mode, TwoModeDensityMatrix
from cavityq.oracles.quadrature import (
    coherent_state_vectors,
    coherent_tail,
    gaussian_integral_identity,
    gaussian_integral_quadrature,
    integrate_plane,
    marginal_moments_by_quadrature,
    numeric_marginal_qfunction,
    numeric_qfunction,
    plane_grid,
)
from cavityq.subharmonic import subharmonic_qfunction
from cavityq.superposition import marginal


class TestGaussianIntegral:
    """Tests for the Gaussian integral identity and its quadrature check."""

    @pytest.mark.parametrize(
        ("args", "expected"),
        [
            ((1.0, 0.0, 0.0, 0.0, 0.0), 1.0),
            ((1.0, 0.5, 0.3, 0.0, 0.0), math.exp(0.15)),
            ((2.0, 0.0, 0.0, 0.3, 0.3), 1.0 / math.sqrt(3.64)),
        ],
    )
    def test_closed_form(
        self, args: tuple[float, float, float, float, float], expected: float
    ) -> None:
        """Test the identity against hand-evaluated cases."""
        assert gaussian_integral_identity(*args) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize(
        "args",
        [
            (1.0, 0.0, 0.0, 0.0, 0.0),
            (1.0, 0.5, 0.3, 0.0, 0.0),
            (2.0, 0.0, 0.0, 0.3, 0.3),
            (1.5, 0.2 + 0.1j, 0.4 - 0.2j, 0.1 + 0.05j, 0.2),
        ],
    )
    def test_quadrature_agrees(
        self, args: tuple[float, complex, complex, complex, complex]
    ) -> None:
        """Test the trapezoid rule reproduces the identity to 1e-8."""
        closed = gaussian_integral_identity(*args)
        numeric = gaussian_integral_quadrature(*args)
        assert abs(closed - numeric) < 1e-8

    def test_complex_case_value(self) -> None:
        """Test the complex case against a direct evaluation of the formula."""
        a, b, c, big_a, big_b = 1.5, 0.2 + 0.1j, 0.4 - 0.2j, 0.1 + 0.05j, 0.2
        det = a * a - 4 * big_a * big_b
        expected = cmath.exp((a * b * c + big_a * c * c + big_b * b * b) / det) / cmath.sqrt(det)
        assert gaussian_integral_identity(a, b, c, big_a, big_b) == pytest.approx(expected)

    @pytest.mark.parametrize(
        "args",
        [
            (0.0, 0.0, 0.0, 0.0, 0.0),
            (-1.0, 0.0, 0.0, 0.0, 0.0),
            (1.0, 0.0, 0.0, 0.6, 0.6),
            (1.0, 0.0, 0.0, 0.6j, -0.6j),
        ],
    )
    def test_divergent(self, args: tuple[float, float, float, complex, complex]) -> None:
        """Test coefficients without decay in every direction are rejected."""
        with pytest.raises(DivergentError):
            gaussian_integral_identity(*args)
        with pytest.raises(DivergentError):
            gaussian_integral_quadrature(*args)


class TestPlaneGrid:
    """Tests for grid construction and plane integration."""

    def test_grid_orientation(self) -> None:
        """Test rows follow the imaginary axis and columns the real axis."""
        re, im, z = plane_grid(1.0, 3, center=1 + 2j)
        np.testing.assert_allclose(re, [0.0, 1.0, 2.0])
        np.testing.assert_allclose(im, [1.0, 2.0, 3.0])
        assert z[0, 2] == 2 + 1j

    def test_integrates_constant(self) -> None:
        """Test the area of a square."""
        re, im, z = plane_grid(1.5, 11)
        assert integrate_plane(np.ones(z.shape), re, im) == pytest.approx(9.0)


class TestCoherentStates:
    """Tests for truncated coherent-state amplitudes."""

    def test_vacuum(self) -> None:
        """Test alpha = 0 is the Fock vacuum."""
        vectors = coherent_state_vectors(0.0, 4)
        np.testing.assert_array_equal(vectors, [1.0, 0.0, 0.0, 0.0, 0.0])

    def test_amplitudes(self) -> None:
        """Test <n|alpha> = exp(-|alpha|^2/2) alpha^n/sqrt(n!)."""
        alpha = 0.7 - 0.4j
        vectors = coherent_state_vectors(np.array([alpha]), 6)
        expected = [
            cmath.exp(-abs(alpha) ** 2 / 2) * alpha**n / math.sqrt(math.factorial(n))
            for n in range(7)
        ]
        np.testing.assert_allclose(vectors[0], expected, atol=1e-15)

    def test_tail_weight(self) -> None:
        """Test the tail beyond N is the Poisson survival function."""
        assert coherent_tail(1.0, 0) == pytest.approx(1.0 - math.exp(-1.0))


class TestNumericQFunction:
    """Tests for Husimi functions evaluated from density matrices."""

    def test_vacuum_peak(self) -> None:
        """Test the vacuum Q-function peaks at 1/pi^2."""
        rho = TwoModeDensityMatrix.vacuum(4)
        assert float(numeric_qfunction(rho, 0.0, 0.0)) == pytest.approx(1.0 / math.pi**2)
        assert float(numeric_qfunction(rho, 1.0, 0.0)) == pytest.approx(
            math.exp(-1.0) / math.pi**2
        )

    def test_broadcasts(self) -> None:
        """Test alpha and beta broadcast against each other."""
        rho = TwoModeDensityMatrix.vacuum(3)
        values = numeric_qfunction(rho, np.array([0.0, 0.5, 1.0]), 0.0)
        assert values.shape == (3,)

    def test_matches_closed_form(self, subharmonic_rho: TwoModeDensityMatrix) -> None:
        """Test the Fock-space Q agrees with the Gaussian Q to 1e-6."""
        analytic = subharmonic_qfunction(SystemParams(kappa=1.0, gamma=0.3))
        points = [(0.0, 0.0), (1.0, 1.0), (0.5 + 0.5j, -0.3j), (-0.8, 0.8)]
        for alpha, beta in points:
            numeric = float(numeric_qfunction(subharmonic_rho, alpha, beta))
            assert numeric == pytest.approx(float(analytic.evaluate(alpha, beta)), abs=1e-6)

    def test_truncation_too_small_far_out(self) -> None:
        """Test points whose coherent states leak past the cutoff are rejected."""
        rho = TwoModeDensityMatrix(2, _top_level_projector(2))
        with pytest.raises(TruncationTooSmallError):
            numeric_qfunction(rho, 3.0, 0.0)

    def test_marginal_matches_closed_form(self, subharmonic_rho: TwoModeDensityMatrix) -> None:
        """Test the reduced-state Q equals the closed-form marginal."""
        single = marginal(subharmonic_qfunction(SystemParams(kappa=1.0, gamma=0.3)))
        for alpha in (0.0, 0.6, 0.3 - 0.9j):
            for mode in Mode:
                numeric = float(numeric_marginal_qfunction(subharmonic_rho, alpha, mode))
                assert numeric == pytest.approx(float(single.evaluate(alpha)), abs=1e-6)

    def test_marginal_normalization(self, subharmonic_rho: TwoModeDensityMatrix) -> None:
        """Test the numeric marginal integrates to one."""
        re, im, z = plane_grid(6.0, 161)
        values = numeric_marginal_qfunction(subharmonic_rho, z)
        assert integrate_plane(values, re, im).real == pytest.approx(1.0, abs=1e-4)


class TestMarginalMoments:
    """Tests for moments of a marginal by quadrature."""

    def test_reference_marginal(self) -> None:
        """Test the norm and <a+a> = 1/w + d^2 - 1 = 0.32125."""
        norm, mean = marginal_moments_by_quadrature(MarginalGaussianQ(w=64.0 / 82.0, d=0.2))
        assert norm == pytest.approx(1.0, abs=1e-6)
        assert mean == pytest.approx(0.32125, abs=1e-3)

    def test_vacuum(self) -> None:
        """Test the vacuum marginal has zero mean photon number."""
        norm, mean = marginal_moments_by_quadrature(MarginalGaussianQ(w=1.0))
        assert norm == pytest.approx(1.0, abs=1e-6)
        assert mean == pytest.approx(0.0, abs=1e-3)


def _top_level_projector(truncation: int) -> NDArray[np.complex128]:
    """|N, N><N, N| for a truncation N."""
    levels = truncation + 1
    elements = np.zeros((levels * levels, levels * levels), dtype=np.complex128)
    elements[-1, -1] = 1.0
    return elements
