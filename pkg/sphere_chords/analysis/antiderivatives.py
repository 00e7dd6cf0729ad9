"""Definite integrals of sine and secant powers.

F_n(t) = int_0^t sin^n, G_n(t) = int_0^t F_n and I_{2k}(t) = int_0^t sec^{2k},
all normalized to vanish at t = 0.
"""

import math

import numpy as np
import numpy.typing as npt

from ..core.errors import DomainError


def _check_order(n: int, minimum: int = 0) -> int:
    if isinstance(n, bool) or int(n) != n or n < minimum:
        raise DomainError(f"Order must be an integer >= {minimum}, got {n!r}")
    return int(n)


def _as_output(values: npt.NDArray[np.float64], like: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
    return float(np.asarray(values).reshape(-1)[0]) if np.ndim(like) == 0 else values


def double_factorial(n: int) -> int:
    """n!! with (-1)!! = 0!! = 1."""
    if n < -1:
        raise DomainError(f"Double factorial is defined for n >= -1, got {n}")
    return math.prod(range(n, 0, -2))


def sin_power_antiderivative(n: int, t: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
    """
    F_n(t) = int_0^t (sin s)^n ds.

    Uses F_n = -cos t sin^{n-1} t / n + (n-1)/n F_{n-2} from F_0 = t, F_1 = 1 - cos t.
    """
    n = _check_order(n)
    x = np.asarray(t, dtype=float)
    s, c = np.sin(x), np.cos(x)
    if n % 2 == 0:
        value, start = x.copy(), 2
    else:
        value, start = 1.0 - c, 3
    for k in range(start, n + 1, 2):
        value = -c * s ** (k - 1) / k + (k - 1) / k * value
    return _as_output(value, t)


def sin_power_double_antiderivative(n: int, t: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
    """
    G_n(t) = int_0^t F_n(s) ds.

    Integrating the F_n recurrence term by term gives
    G_n = -sin^n t / n^2 + (n-1)/n G_{n-2}, from G_0 = t^2/2 and G_1 = t - sin t.
    """
    n = _check_order(n)
    x = np.asarray(t, dtype=float)
    s = np.sin(x)
    if n % 2 == 0:
        value, start = 0.5 * x * x, 2
    else:
        value, start = x - s, 3
    for k in range(start, n + 1, 2):
        value = -(s**k) / (k * k) + (k - 1) / k * value
    return _as_output(value, t)


def reduction_integral(k: int, t: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
    """
    I_{2k}(t) = int_0^t (cos s)^{-2k} ds for k >= 1 and 0 <= t < pi/2.

    Closed form ((2k-2)!!/(2k-1)!!) tan t (1 + sum_{l=1}^{k-1} ((2l-1)!!/(2l)!!) sec^{2l} t).
    """
    k = _check_order(k, minimum=1)
    x = np.asarray(t, dtype=float)
    if np.any(x < 0) or np.any(x >= math.pi / 2):
        raise DomainError("reduction_integral needs 0 <= t < pi/2")
    sec2 = 1.0 / np.cos(x) ** 2
    series = np.ones_like(x)
    power = np.ones_like(x)
    for l in range(1, k):
        power = power * sec2
        series = series + double_factorial(2 * l - 1) / double_factorial(2 * l) * power
    value = double_factorial(2 * k - 2) / double_factorial(2 * k - 1) * np.tan(x) * series
    return _as_output(value, t)
