"""Classical fourth-order Runge-Kutta stepping.

``rk4_step`` advances any array-valued state; for constant affine systems
``affine_propagator`` folds one RK4 step into a matrix and an offset.
"""

from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

Derivative = Callable[[float, NDArray[np.complex128]], NDArray[np.complex128]]


def rk4_step(
    f: Derivative,
    t: float,
    y: NDArray[np.complex128],
    h: float,
) -> NDArray[np.complex128]:
    """One classical RK4 step of dy/dt = f(t, y)."""
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    result: NDArray[np.complex128] = y + h * (k1 / 6 + k2 / 3 + k3 / 3 + k4 / 6)
    return result


def linearize_affine(
    rhs: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    size: int,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Recover (A, s) of an affine right-hand side rhs(y) = A y + s by probing unit vectors."""
    source = rhs(np.zeros(size))
    matrix = np.empty((size, size))
    for j, unit in enumerate(np.eye(size)):
        matrix[:, j] = rhs(unit) - source
    return matrix, source


def affine_propagator(
    matrix: NDArray[np.float64],
    source: NDArray[np.float64],
    h: float,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """One RK4 step of dy/dt = A y + s written as y -> P y + c.

    P = I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24 and
    c = h (I + hA/2 + (hA)^2/6 + (hA)^3/24) s.
    """
    identity = np.eye(matrix.shape[0])
    ha = h * matrix
    ha2 = ha @ ha
    ha3 = ha2 @ ha
    propagator = identity + ha + ha2 / 2 + ha3 / 6 + ha3 @ ha / 24
    offset = h * (identity + ha / 2 + ha2 / 6 + ha3 / 24) @ source
    return propagator, offset
