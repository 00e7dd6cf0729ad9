"""Adaptive Simpson quadrature."""

from collections.abc import Callable, Iterable
from typing import Optional

import numpy as np
import numpy.typing as npt

from ..core.config import get_settings
from ..core.errors import DomainError, QuadratureError
from ..core.logging import get_logger


logger = get_logger(__name__)


def adaptive_quadrature(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Optional[float] = None,
    max_depth: Optional[int] = None,
) -> tuple[float, float]:
    """
    Integrate ``f`` over ``[a, b]`` by adaptive Simpson's rule.

    Each split halves the absolute tolerance handed to both halves; accepted
    panels are Richardson-extrapolated.

    Args:
        f: Integrand, bounded on [a, b].
        a: Lower limit.
        b: Upper limit, ``b >= a``.
        tol: Absolute error target.
        max_depth: Maximum recursion depth.

    Returns:
        Tuple of (integral, error estimate).

    Raises:
        DomainError: If ``a > b`` or a limit is not finite.
        QuadratureError: If the depth limit is reached before the tolerance.
    """
    settings = get_settings().quadrature
    tol = settings.tolerance if tol is None else tol
    max_depth = settings.max_depth if max_depth is None else max_depth

    if not (np.isfinite(a) and np.isfinite(b)):
        raise DomainError(f"Integration limits must be finite, got [{a}, {b}]")
    if a > b:
        raise DomainError(f"Integration limits must be ordered, got [{a}, {b}]")
    if a == b:
        return 0.0, 0.0

    unconverged = [False]

    def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 3.0 * (fa + 4.0 * fm + fb)

    def _adaptive(
        lo: float,
        hi: float,
        flo: float,
        fmid: float,
        fhi: float,
        whole: float,
        depth: int,
        target: float,
    ) -> tuple[float, float]:
        mid = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        fl = f(0.5 * (lo + mid))
        fr = f(0.5 * (mid + hi))

        left = _simpson(flo, fl, fmid, 0.5 * h)
        right = _simpson(fmid, fr, fhi, 0.5 * h)
        error = (left + right - whole) / 15.0

        if abs(error) <= target:
            return left + right + error, abs(error)
        if depth >= max_depth:
            unconverged[0] = True
            return left + right + error, abs(error)

        lv, le = _adaptive(lo, mid, flo, fl, fmid, left, depth + 1, 0.5 * target)
        rv, re = _adaptive(mid, hi, fmid, fr, fhi, right, depth + 1, 0.5 * target)
        return lv + rv, le + re

    fa = float(f(a))
    fb = float(f(b))
    fm = float(f(0.5 * (a + b)))
    whole = _simpson(fa, fm, fb, 0.5 * (b - a))
    value, error = _adaptive(a, b, fa, fm, fb, whole, 0, tol)

    if unconverged[0] and error > tol:
        logger.warning("quadrature did not converge", a=a, b=b, estimate=value, error=error)
        raise QuadratureError(
            f"Adaptive Simpson reached depth {max_depth} on [{a}, {b}] "
            f"with error estimate {error:.3e} > {tol:.3e}",
            estimate=value,
            error=error,
        )
    return value, error


def cumulative_quadrature(
    f: Callable[[float], float],
    grid: npt.ArrayLike,
    tol: Optional[float] = None,
    breakpoints: Iterable[float] = (),
) -> npt.NDArray[np.float64]:
    """
    Running integrals of ``f`` from ``grid[0]`` to every grid point.

    Panels are split at ``breakpoints`` that fall inside them, so kinks of the
    integrand never sit in the interior of a Simpson panel.

    Args:
        f: Integrand.
        grid: Nondecreasing evaluation points.
        tol: Absolute error target per panel.
        breakpoints: Known kink locations of ``f``.

    Returns:
        Array of the same length as ``grid``; the first entry is 0.
    """
    points = np.asarray(grid, dtype=float)
    if points.ndim != 1 or points.size == 0:
        raise DomainError("Grid must be a non-empty one-dimensional array")
    if np.any(np.diff(points) < 0):
        raise DomainError("Grid must be nondecreasing")
    tol = get_settings().quadrature.cumulative_tolerance if tol is None else tol
    kinks = sorted(float(k) for k in breakpoints)

    out = np.zeros_like(points)
    total = 0.0
    for i in range(1, points.size):
        lo, hi = float(points[i - 1]), float(points[i])
        edges = [lo] + [k for k in kinks if lo < k < hi] + [hi]
        for left, right in zip(edges[:-1], edges[1:]):
            total += adaptive_quadrature(f, left, right, tol=tol)[0]
        out[i] = total
    return out
