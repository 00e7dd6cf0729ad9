"""Uniform random points in spherical caps and polyhedral spherical bodies."""

import math
from functools import lru_cache

import numpy as np
import numpy.typing as npt
from scipy.interpolate import PchipInterpolator

from ..analysis.antiderivatives import sin_power_antiderivative
from ..core.config import get_settings
from ..core.errors import DomainError, EfficiencyError
from ..core.logging import get_logger
from ..geometry.bodies import SphericalBody, SphericalCap, UnitVector
from .rng import RngStream, SampleBatch, as_generator


logger = get_logger(__name__)


class PolarAngleSampler:
    """
    Inverse CDF of the polar angle of a uniform point in a cap.

    The angle from the center has density proportional to sin^{d-2} on [0, r].
    A monotone spline through the normalized sine-power antiderivative gives a
    first guess, which bisection inside its grid cell refines.
    """

    def __init__(self, d: int, radius: float, points: int, tol: float):
        self.order = d - 2
        self.radius = radius
        self.tol = tol
        self.total = float(sin_power_antiderivative(self.order, radius))
        theta = np.linspace(0.0, radius, points)
        cdf = np.asarray(sin_power_antiderivative(self.order, theta)) / self.total
        cdf[-1] = 1.0
        keep = np.concatenate(([True], np.diff(cdf) > 0))
        self.theta = theta[keep]
        self.cdf = cdf[keep]
        self.spline = PchipInterpolator(self.cdf, self.theta)

    def __call__(self, u: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        j = np.clip(np.searchsorted(self.cdf, u, side="right"), 1, self.cdf.size - 1)
        lo = self.theta[j - 1].copy()
        hi = self.theta[j].copy()
        guess = np.clip(self.spline(u), lo, hi)
        target = u * self.total
        mid = guess
        while True:
            below = np.asarray(sin_power_antiderivative(self.order, mid)) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.max(hi - lo, initial=0.0) <= self.tol:
                break
            mid = 0.5 * (lo + hi)
        return 0.5 * (lo + hi)


@lru_cache(maxsize=64)
def _polar_sampler(d: int, radius: float) -> PolarAngleSampler:
    settings = get_settings().sampler
    return PolarAngleSampler(d, radius, settings.inverse_cdf_points, settings.bisection_tolerance)


def sample_points_on_great_sphere(
    normal: UnitVector, n: int, rng: "RngStream | np.random.Generator"
) -> npt.NDArray[np.float64]:
    """Uniform points of the great subsphere orthogonal to ``normal``."""
    gen = as_generator(rng)
    eps = get_settings().sampler.degenerate_norm
    center = np.asarray(normal, dtype=float)
    out = np.empty((n, center.size))
    todo = np.arange(n)
    while todo.size:
        g = gen.standard_normal((todo.size, center.size))
        g -= np.outer(g @ center, center)
        norms = np.linalg.norm(g, axis=1)
        good = norms >= eps
        out[todo[good]] = g[good] / norms[good, None]
        todo = todo[~good]
    return out


def sample_points_in_cap(
    cap: SphericalCap, n: int, rng: "RngStream | np.random.Generator"
) -> npt.NDArray[np.float64]:
    """Draw ``n`` uniform points of ``cap`` as an (n, d) array."""
    if n < 0:
        raise DomainError(f"Sample count must be non-negative, got {n}")
    gen = as_generator(rng)
    theta = _polar_sampler(cap.dim, cap.radius)(gen.random(n))
    directions = sample_points_on_great_sphere(cap.center, n, gen)
    return np.cos(theta)[:, None] * cap.center + np.sin(theta)[:, None] * directions


def sample_point_in_cap(cap: SphericalCap, d: int, rng: "RngStream | np.random.Generator") -> UnitVector:
    """Draw one uniform point of ``cap``."""
    if cap.dim != d:
        raise DomainError(f"Cap lives in R^{cap.dim}, got d={d}")
    return sample_points_in_cap(cap, 1, rng)[0]


def sample_points_in_body(
    body: SphericalBody, n: int, rng: "RngStream | np.random.Generator"
) -> SampleBatch:
    """
    Draw ``n`` uniform points of ``body`` by rejection from its bounding cap.

    Returns:
        SampleBatch whose values are an (n, d) array of accepted points.

    Raises:
        EfficiencyError: If the acceptance rate of the probe batch is below the
            configured floor.
    """
    if n < 0:
        raise DomainError(f"Sample count must be non-negative, got {n}")
    gen = as_generator(rng)
    if isinstance(body, SphericalCap):
        return SampleBatch(values=sample_points_in_cap(body, n, gen), n_attempted=n)

    settings = get_settings().sampler
    bounding = body.bounding_cap()

    if n == 0:
        return SampleBatch(values=np.empty((0, body.dim)), n_attempted=0)

    probe = sample_points_in_cap(bounding, settings.probe_batch, gen)
    inside = body.contains(probe)
    rate = float(np.mean(inside))
    if rate < settings.min_acceptance_rate:
        logger.warning("rejection sampler too inefficient", rate=rate, radius=bounding.radius)
        raise EfficiencyError(
            f"Acceptance rate {rate:.2e} from the bounding cap of radius "
            f"{bounding.radius:.4f} is below {settings.min_acceptance_rate:.0e}; "
            "supply a body with a tighter bounding cap",
            rate=rate,
        )

    draws, flags = [probe], [inside]
    got = int(np.count_nonzero(inside))
    while got < n:
        size = min(settings.batch_size, max(1024, math.ceil(1.1 * (n - got) / rate)))
        batch = sample_points_in_cap(bounding, size, gen)
        inside = body.contains(batch)
        draws.append(batch)
        flags.append(inside)
        got += int(np.count_nonzero(inside))

    candidates = np.concatenate(draws, axis=0)
    hits = np.concatenate(flags)
    # attempts are counted up to the draw that produced the n-th acceptance
    stop = int(np.flatnonzero(hits)[n - 1]) + 1
    points = candidates[:stop][hits[:stop]]
    logger.debug("sampled body points", n=n, attempted=stop, rate=n / stop)
    return SampleBatch(values=points, n_attempted=stop)


def sample_point_in_body(
    body: SphericalBody, d: int, rng: "RngStream | np.random.Generator"
) -> UnitVector:
    """Draw one uniform point of ``body``."""
    if body.dim != d:
        raise DomainError(f"Body lives in R^{body.dim}, got d={d}")
    return sample_points_in_body(body, 1, rng).values[0]
