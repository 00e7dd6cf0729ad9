"""Closed forms for spherical caps.

A great circle at distance rho from the center of a cap of radius r cuts a
chord longer than s iff it meets the concentric cap K_s of radius
arccos(cos r / cos(s/2)); the spherical Crofton formula turns this into the
survival function of sigma.
"""

import math
from collections.abc import Callable
from typing import Optional

import numpy as np
import numpy.typing as npt

from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.logging import get_logger
from ..geometry.bodies import SphericalCap, _check_body_dim, cap_boundary_area, cap_volume
from ..geometry.constants import sphere_surface_area
from .antiderivatives import reduction_integral
from .transform import (
    DensityCurve,
    SigmaCDF,
    delta_cdf_from_sigma,
    integrals_to_support,
)


logger = get_logger(__name__)

# the positive series converges like sin^{2k} r; past r = pi/4 the binomial form is used
SERIES_MAX_RATIO = 0.5
SERIES_MAX_TERMS = 200
SERIES_RTOL = 1e-17


def _as_output(values: npt.NDArray[np.float64], like: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
    return float(np.asarray(values).reshape(-1)[0]) if np.ndim(like) == 0 else values


def cap_sigma_survival_flagged(
    cap: SphericalCap, d: int, s: npt.ArrayLike
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.bool_]]:
    """
    Survival function of sigma for a cap together with an out-of-range mask.

    Returns:
        Tuple of (1 - F_sigma(s), mask of s outside [0, 2r]). Values outside are
        clamped to 1 below 0 and to 0 beyond 2r.
    """
    _check_body_dim(cap, d)
    x = np.atleast_1d(np.asarray(s, dtype=float))
    r = cap.radius
    outside = (x < 0) | (x > 2.0 * r)
    half = np.clip(x, 0.0, 2.0 * r) / 2.0
    # 1 - cos^2 r / cos^2(s/2) = sin(r - s/2) sin(r + s/2) / cos^2(s/2)
    ratio = np.maximum(np.sin(r - half) * np.sin(r + half), 0.0) / (
        np.cos(half) ** 2 * math.sin(r) ** 2
    )
    values = ratio ** ((d - 2) / 2.0)
    values = np.where(x < 0, 1.0, np.where(x > 2.0 * r, 0.0, values))
    return values, outside


def cap_sigma_survival(cap: SphericalCap, d: int, s: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
    """1 - F_sigma(s) = (sin rho(s) / sin r)^{d-2} with rho(s) = arccos(cos r / cos(s/2))."""
    values, outside = cap_sigma_survival_flagged(cap, d, s)
    if np.any(outside):
        logger.debug("chord length outside [0, 2r] clamped", count=int(np.count_nonzero(outside)))
    return _as_output(values, s)


def cap_sigma_cdf(cap: SphericalCap, d: int) -> SigmaCDF:
    """Analytic chord distribution of a cap, supported on [0, 2r]."""
    _check_body_dim(cap, d)
    return SigmaCDF.analytic(
        lambda s: cap_sigma_survival_flagged(cap, d, s)[0].reshape(np.shape(s)),
        2.0 * cap.radius,
        metadata={"body": cap.describe()},
    )


def cap_sigma_grid(cap: SphericalCap, d: int, points: int) -> npt.NDArray[np.float64]:
    """
    Chord lengths for tabulating sigma, fine enough near 2r for linear interpolation.

    The survival function vanishes like (2r - s)^{(d-2)/2}. For d = 3 the rows
    are s = 2r (1 - (1 - u)^2) with u equally spaced on [0, 1], where it is
    smooth in u; for d >= 4 its second derivative is bounded and the rows are
    equally spaced.
    """
    _check_body_dim(cap, d)
    if points < 2:
        raise DomainError(f"Grid needs at least 2 points, got {points}")
    u = np.linspace(0.0, 1.0, points)
    power = 2 if d == 3 else 1
    s = 2.0 * cap.radius * (1.0 - (1.0 - u) ** power)
    s[-1] = 2.0 * cap.radius
    return s


def _normalized_cap_integrand(cap: SphericalCap, d: int) -> Callable[[float], float]:
    """(1 - cos^2 r / cos^2(s/2))^{(d-2)/2} / sin^{d-2} r, which runs from 1 to 0 on [0, 2r]."""
    cos_r2 = math.cos(cap.radius) ** 2
    scale = math.sin(cap.radius) ** (d - 2)

    def _integrand(s: float) -> float:
        return max(1.0 - cos_r2 / math.cos(0.5 * s) ** 2, 0.0) ** ((d - 2) / 2.0) / scale

    return _integrand


def _cap_density(
    cap: SphericalCap, d: int, t: npt.NDArray[np.float64], inner: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    volume = cap_volume(cap, d)
    bracket = 1.0 - sphere_surface_area(d) / (2.0 * math.pi * volume) * inner
    density = sphere_surface_area(d - 1) * np.sin(t) ** (d - 2) / volume * np.maximum(bracket, 0.0)
    return np.where((t < 0) | (t > 2.0 * cap.radius), 0.0, density)


def cap_delta_density(cap: SphericalCap, d: int, t: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
    """
    Density of the distance between two uniform points of a cap.

    The inner integral of (1 - cos^2 r / cos^2(s/2))^{(d-2)/2} is taken by
    adaptive quadrature; the density is 0 outside [0, 2r].
    """
    _check_body_dim(cap, d)
    x = np.atleast_1d(np.asarray(t, dtype=float))
    support = 2.0 * cap.radius
    inner = math.sin(cap.radius) ** (d - 2) * integrals_to_support(
        _normalized_cap_integrand(cap, d), support, np.clip(x, 0.0, support)
    )
    return _as_output(_cap_density(cap, d, x, inner), t)


def even_dim_cap_delta_density(
    cap: SphericalCap, d: int, t: npt.ArrayLike
) -> npt.NDArray[np.float64] | float:
    """
    Closed form of ``cap_delta_density`` for even d = 2m + 2.

    Expanding (1 - cos^2 r sec^2(s/2))^m binomially, the inner integral is
    t + sum_{j=1}^{m} C(m, j) (-cos^2 r)^j 2 I_{2j}(t/2). For r <= pi/4 the
    alternating sum cancels to O(sin^{2m} r), so the inner integral is taken
    from a series with positive terms instead.

    Raises:
        DomainError: If d is odd or below 4.
    """
    _check_body_dim(cap, d)
    if d % 2 or d < 4:
        raise DomainError(f"Closed form needs even d >= 4, got {d}")
    m = (d - 2) // 2
    x = np.atleast_1d(np.asarray(t, dtype=float))
    half = np.clip(x, 0.0, 2.0 * cap.radius) / 2.0
    if math.sin(cap.radius) ** 2 <= SERIES_MAX_RATIO:
        inner = math.sin(cap.radius) ** (2 * m) * _normalized_inner_series(cap.radius, m, half)
        return _as_output(_cap_density(cap, d, x, inner), t)
    c2 = math.cos(cap.radius) ** 2
    inner = 2.0 * half
    for j in range(1, m + 1):
        inner = inner + math.comb(m, j) * (-c2) ** j * 2.0 * np.asarray(reduction_integral(j, half))
    return _as_output(_cap_density(cap, d, x, inner), t)


def _normalized_inner_series(
    radius: float, m: int, half: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    """
    int_0^{2u} (1 - cos^2 r sec^2(s/2))^m ds / sin^{2m} r for u = ``half``.

    With x = tan(s/2) / tan r and y = 1 - x^2 the integral equals
    sin 2r sum_{k>=0} sin^{2k} r E_{m+k}(x), E_n(x) = int_0^x (1 - v^2)^n dv, and every
    term is positive. E_n follows E_n = (x y^n + 2n E_{n-1}) / (2n + 1).
    """
    x = np.clip(np.tan(half) / math.tan(radius), 0.0, 1.0)
    y = (1.0 - x) * (1.0 + x)
    q = math.sin(radius) ** 2
    e = x.copy()
    for n in range(1, m + 1):
        e = (x * y**n + 2 * n * e) / (2 * n + 1)
    total = e.copy()
    weight = 1.0
    for n in range(m + 1, m + 1 + SERIES_MAX_TERMS):
        weight *= q
        e = (x * y**n + 2 * n * e) / (2 * n + 1)
        term = weight * e
        total = total + term
        if np.all(term <= SERIES_RTOL * total):
            break
    return math.sin(2.0 * radius) * total


def cap_delta_density_curve(
    cap: SphericalCap,
    d: int,
    grid: Optional[npt.ArrayLike] = None,
    points: Optional[int] = None,
    closed_form: bool = False,
) -> DensityCurve:
    """
    Density and distribution function of Delta on a grid over [0, 2r].

    Args:
        cap: The cap.
        d: Ambient dimension.
        grid: Explicit increasing grid; defaults to ``points`` equally spaced
            points on [0, 2r].
        points: Grid size when ``grid`` is omitted.
        closed_form: Evaluate the density with the even-dimension closed form.
    """
    _check_body_dim(cap, d)
    if grid is None:
        points = get_settings().verification.density_grid if points is None else points
        if points < 2:
            raise DomainError(f"Grid needs at least 2 points, got {points}")
        grid = np.linspace(0.0, 2.0 * cap.radius, points)
    t = np.asarray(grid, dtype=float)
    values = even_dim_cap_delta_density(cap, d, t) if closed_form else cap_delta_density(cap, d, t)
    return DensityCurve(
        grid=t,
        values=np.atleast_1d(values),
        metadata={"d": d, "body": cap.describe(), "radius": cap.radius, "closed_form": closed_form},
        cdf=np.atleast_1d(cap_delta_cdf(cap, d, t)),
    )


def cap_delta_cdf(cap: SphericalCap, d: int, t: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
    """Distribution function of the distance between two uniform points of a cap."""
    _check_body_dim(cap, d)
    x = np.asarray(t, dtype=float)
    clipped = np.clip(x, 0.0, 2.0 * cap.radius)
    F = delta_cdf_from_sigma(
        cap_sigma_cdf(cap, d), cap_volume(cap, d), cap_boundary_area(cap, d), d, clipped
    )
    F = np.where(x < 0, 0.0, F)
    return _as_output(F, t)
