"""Dimension constants of spheres, balls and the spherical Blaschke-Petkantschin formula."""

import math

from scipy.special import gamma

from ..core.errors import DomainError


def _check_dim(d: int, minimum: int) -> int:
    if isinstance(d, bool) or int(d) != d:
        raise DomainError(f"Dimension must be an integer, got {d!r}")
    if d < minimum:
        raise DomainError(f"Dimension must be >= {minimum}, got {d}")
    return int(d)


def sphere_surface_area(d: int) -> float:
    """omega_d, the (d-1)-dimensional measure of the unit sphere in R^d."""
    d = _check_dim(d, 1)
    return float(2.0 * math.pi ** (d / 2.0) / gamma(d / 2.0))


def ball_volume(d: int) -> float:
    """kappa_d, the volume of the unit ball in R^d."""
    d = _check_dim(d, 1)
    return float(math.pi ** (d / 2.0) / gamma(d / 2.0 + 1.0))


def bp_constant(d: int) -> float:
    """b_{d,2} = omega_d * omega_{d-1} / (4 pi)."""
    d = _check_dim(d, 3)
    return sphere_surface_area(d) * sphere_surface_area(d - 1) / (4.0 * math.pi)


def bp_constant_product(d: int, k: int = 2) -> float:
    """
    b_{d,k} = (omega_{d-k+1} ... omega_d) / (omega_1 ... omega_k).

    Args:
        d: Ambient dimension.
        k: Number of points, 1 <= k <= d.
    """
    d = _check_dim(d, 1)
    if not 1 <= k <= d:
        raise DomainError(f"Need 1 <= k <= d, got k={k}, d={d}")
    numerator = math.prod(sphere_surface_area(j) for j in range(d - k + 1, d + 1))
    denominator = math.prod(sphere_surface_area(j) for j in range(1, k + 1))
    return numerator / denominator
