"""Numeric Husimi functions and plane quadrature.

Q-functions are evaluated from a truncated density matrix as coherent-state
overlaps, and Gaussian integrals over the complex plane are checked with a
tensor-product trapezoid rule.
"""

import cmath
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import trapezoid
from scipy.stats import poisson

from cavityq.errors import DivergentError, TruncationTooSmallError
from cavityq.models import MarginalGaussianQ
from cavityq.oracles.fock import Mode, TwoModeDensityMatrix

COHERENT_TAIL_TOL = 1e-8
IDENTITY_POINTS = 801


def coherent_state_vectors(alpha: ArrayLike, truncation: int) -> NDArray[np.complex128]:
    """Fock amplitudes exp(-|alpha|^2/2) alpha^n / sqrt(n!) for n <= N.

    The result has shape ``alpha.shape + (N + 1,)``.
    """
    a = np.asarray(alpha, dtype=np.complex128)[..., np.newaxis]
    ratios = a / np.sqrt(np.arange(1, truncation + 1))
    amplitudes = np.concatenate([np.ones_like(a), np.cumprod(ratios, axis=-1)], axis=-1)
    vectors: NDArray[np.complex128] = np.exp(-0.5 * np.abs(a) ** 2) * amplitudes
    return vectors


def coherent_tail(alpha: ArrayLike, truncation: int) -> NDArray[np.float64]:
    """Weight of |alpha> beyond level N: the Poisson survival function at N."""
    mean = np.abs(np.asarray(alpha, dtype=np.complex128)) ** 2
    tail: NDArray[np.float64] = poisson.sf(truncation, mean)
    return tail


def _check_truncation(rho: TwoModeDensityMatrix, tails: dict[Mode, float]) -> None:
    estimate = sum(tail * rho.top_population(mode) for mode, tail in tails.items())
    if estimate > COHERENT_TAIL_TOL:
        raise TruncationTooSmallError(rho.truncation, estimate)


def numeric_qfunction(
    rho: TwoModeDensityMatrix,
    alpha: ArrayLike,
    beta: ArrayLike,
) -> NDArray[np.float64]:
    """Husimi value <alpha, beta| rho |alpha, beta> / pi^2, broadcasting alpha against beta.

    Raises:
        TruncationTooSmallError: If the coherent-state expansion beyond the cutoff
            could change the result by more than 1e-8.
    """
    a, b = np.broadcast_arrays(
        np.asarray(alpha, dtype=np.complex128), np.asarray(beta, dtype=np.complex128)
    )
    _check_truncation(
        rho,
        {
            Mode.A: float(np.max(coherent_tail(a, rho.truncation), initial=0.0)),
            Mode.B: float(np.max(coherent_tail(b, rho.truncation), initial=0.0)),
        },
    )
    va = coherent_state_vectors(a.ravel(), rho.truncation)
    vb = coherent_state_vectors(b.ravel(), rho.truncation)
    joint = np.einsum("mi,mj->mij", va, vb).reshape(len(va), -1)
    overlap = np.einsum("mi,ij,mj->m", joint.conj(), rho.elements, joint)
    values = np.clip(overlap.real, 0.0, None) / math.pi**2
    return values.reshape(a.shape)


def numeric_marginal_qfunction(
    rho: TwoModeDensityMatrix,
    alpha: ArrayLike,
    mode: Mode = Mode.A,
) -> NDArray[np.float64]:
    """Single-mode Husimi <alpha| rho_mode |alpha> / pi from the reduced density matrix."""
    a = np.asarray(alpha, dtype=np.complex128)
    _check_truncation(rho, {mode: float(np.max(coherent_tail(a, rho.truncation), initial=0.0))})
    vectors = coherent_state_vectors(a.ravel(), rho.truncation)
    overlap = np.einsum("mi,ij,mj->m", vectors.conj(), rho.reduced(mode), vectors)
    values = np.clip(overlap.real, 0.0, None) / math.pi
    return values.reshape(a.shape)


def _quadratic_form(A: complex, B: complex) -> tuple[float, float]:
    """Diagonal shift and off-diagonal entry of the real quadratic form in (x, y)."""
    return (A + B).real, (A - B).imag


def _check_convergence(a: float, A: complex, B: complex) -> float:
    """Smallest eigenvalue of the real quadratic form; raises if not positive."""
    shift, off = _quadratic_form(A, B)
    determinant = a * a - 4 * A * B
    smallest = a - math.hypot(shift, off)
    if a <= 0 or smallest <= 0 or (determinant.imag == 0 and determinant.real <= 0):
        raise DivergentError(
            f"gaussian integral diverges for a={a!r}, A={A!r}, B={B!r} (need a > 0, a^2 - 4AB > 0)"
        )
    return smallest


def gaussian_integral_identity(
    a: float,
    b: complex,
    c: complex,
    A: complex = 0.0,
    B: complex = 0.0,
) -> complex:
    """Closed form of (1/pi) integral d^2z exp(-a|z|^2 + bz + cz* + Az^2 + Bz*^2).

    Equals (a^2 - 4AB)^(-1/2) exp[(abc + Ac^2 + Bb^2)/(a^2 - 4AB)].

    Raises:
        DivergentError: If the integrand does not decay in every direction.
    """
    _check_convergence(a, A, B)
    determinant = complex(a * a - 4 * A * B)
    return cmath.exp((a * b * c + A * c * c + B * b * b) / determinant) / cmath.sqrt(determinant)


def plane_grid(
    extent: float,
    points: int,
    center: complex = 0j,
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.complex128]]:
    """Square grid on the complex plane: (real axis, imaginary axis, z values)."""
    re = np.linspace(center.real - extent, center.real + extent, points)
    im = np.linspace(center.imag - extent, center.imag + extent, points)
    z = re[np.newaxis, :] + 1j * im[:, np.newaxis]
    return re, im, z


def integrate_plane(
    values: NDArray[np.float64] | NDArray[np.complex128],
    re: NDArray[np.float64],
    im: NDArray[np.float64],
) -> complex:
    """Trapezoid rule over a plane_grid sample (rows follow the imaginary axis)."""
    return complex(trapezoid(trapezoid(values, re, axis=1), im))


def gaussian_integral_quadrature(
    a: float,
    b: complex,
    c: complex,
    A: complex = 0.0,
    B: complex = 0.0,
    points: int = IDENTITY_POINTS,
) -> complex:
    """The same integral as gaussian_integral_identity, by 2D trapezoid quadrature."""
    smallest = _check_convergence(a, A, B)
    extent = (abs(b) + abs(c)) / smallest + 10.0 / math.sqrt(smallest)
    re, im, z = plane_grid(extent, points)
    integrand = np.exp(
        -a * np.abs(z) ** 2 + b * z + c * z.conj() + A * z**2 + B * z.conj() ** 2
    )
    return integrate_plane(integrand, re, im) / math.pi


def marginal_moments_by_quadrature(
    marginal: MarginalGaussianQ,
    extent: float = 6.0,
    points: int = 201,
) -> tuple[float, float]:
    """Return (integral of Q, integral of |alpha|^2 Q - 1) on [-extent, extent]^2."""
    re, im, z = plane_grid(extent, points)
    values = marginal.evaluate(z)
    norm = integrate_plane(values, re, im).real
    second = integrate_plane(np.abs(z) ** 2 * values, re, im).real
    return norm, second - 1.0
