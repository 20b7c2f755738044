"""Central finite differences used as oracles and as a gradient fallback."""

from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.typing import ArrayLike

GRADIENT_STEP = 1e-5
HESSIAN_STEP = 1e-4


def central_gradient(
    f: Callable[[np.ndarray], float],
    x: ArrayLike,
    step: float = GRADIENT_STEP,
) -> np.ndarray:
    point = np.asarray(x, dtype=float)
    grad = np.empty_like(point)
    for i in range(point.size):
        offset = np.zeros_like(point)
        offset[i] = step
        grad[i] = (f(point + offset) - f(point - offset)) / (2.0 * step)
    return grad


def central_hessian(
    f: Callable[[np.ndarray], float],
    x: ArrayLike,
    step: float = HESSIAN_STEP,
) -> np.ndarray:
    point = np.asarray(x, dtype=float)
    n = point.size
    hess = np.empty((n, n))
    f0 = f(point)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step
        hess[i, i] = (f(point + ei) - 2.0 * f0 + f(point - ei)) / step**2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = step
            value = (
                f(point + ei + ej) - f(point + ei - ej) - f(point - ei + ej) + f(point - ei - ej)
            ) / (4.0 * step**2)
            hess[i, j] = hess[j, i] = value
    return hess


def central_derivative(f: Callable[[float], float], t: float, step: float = GRADIENT_STEP) -> tuple[float, float]:
    """First and second derivative of a scalar function at t."""
    fp, f0, fm = f(t + step), f(t), f(t - step)
    return (fp - fm) / (2.0 * step), (fp - 2.0 * f0 + fm) / step**2
