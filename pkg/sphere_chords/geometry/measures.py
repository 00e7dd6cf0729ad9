"""Monte Carlo estimates of |K| and |dK| for polyhedral spherical bodies."""

import math
from dataclasses import dataclass
from functools import partial
from typing import Optional

import numpy as np

from ..core.errors import DomainError
from ..core.logging import get_logger
from ..sampling.points import sample_points_in_cap, sample_points_on_great_sphere
from ..sampling.rng import STREAM_BLOCK, RngStream, SampleBatch, run_sharded
from ..sampling.variables import chord_samples
from .bodies import (
    ConvexSphericalBody,
    SphericalBody,
    SphericalCap,
    _check_body_dim,
    cap_volume,
)
from .constants import sphere_surface_area


logger = get_logger(__name__)

VOLUME_STREAMS = 0
HIT_STREAMS = STREAM_BLOCK
FACET_STREAMS = 2 * STREAM_BLOCK


@dataclass(frozen=True)
class BodyMeasures:
    """Volume and boundary area estimates with their standard errors."""
    volume: float
    volume_se: float
    boundary_area: float
    boundary_se: float
    n: int


def _binomial_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n) if n else 0.0


def _cap_hits(body: SphericalBody, cap: SphericalCap, n: int, stream: RngStream) -> SampleBatch:
    points = sample_points_in_cap(cap, n, stream)
    return SampleBatch(values=points[body.contains(points)], n_attempted=n)


def body_measures_mc(
    body: SphericalBody,
    d: int,
    n: int,
    seed: int,
    workers: Optional[int] = None,
) -> BodyMeasures:
    """
    Estimate |K| and |dK| by Monte Carlo.

    The volume is the accepted fraction of uniform points of the bounding cap
    times the cap volume. The boundary area inverts the spherical Crofton
    formula: the Haar 2-plane hit probability equals |dK| / omega_{d-1}.

    Raises:
        UnsupportedBodyError: If the body has no bounding cap.
    """
    _check_body_dim(body, d)
    if n <= 0:
        raise DomainError(f"Sample count must be positive, got {n}")
    bounding = body.bounding_cap()
    scale = cap_volume(bounding, d)

    inside = run_sharded(partial(_cap_hits, body, bounding), n, seed, workers, VOLUME_STREAMS)
    p = inside.acceptance_rate

    chords = chord_samples(body, n, seed, workers, HIT_STREAMS)
    q = chords.acceptance_rate
    omega = sphere_surface_area(d - 1)

    measures = BodyMeasures(
        volume=p * scale,
        volume_se=_binomial_se(p, n) * scale,
        boundary_area=q * omega,
        boundary_se=_binomial_se(q, n) * omega,
        n=n,
    )
    logger.info(
        "estimated body measures",
        volume=measures.volume,
        boundary_area=measures.boundary_area,
        n=n,
    )
    return measures


def facet_boundary_mc(
    body: ConvexSphericalBody,
    n: int,
    seed: int,
    workers: Optional[int] = None,
) -> tuple[float, float]:
    """
    Estimate |dK| facet by facet, without any chord computation.

    Facet i lies on the great subsphere orthogonal to n_i, of measure
    omega_{d-1}; its share is the fraction of uniform points of that subsphere
    meeting the remaining constraints.

    Args:
        body: Halfspace body.
        n: Points per facet.
        seed: Seed of the random streams.
        workers: Worker count per facet.

    Returns:
        Tuple of (boundary area, standard error).
    """
    if not isinstance(body, ConvexSphericalBody):
        raise DomainError("Facet estimates need a halfspace body")
    if n <= 0:
        raise DomainError(f"Sample count must be positive, got {n}")
    omega = sphere_surface_area(body.dim - 1)
    total, variance = 0.0, 0.0
    seen: list[np.ndarray] = []
    for i, normal in enumerate(body.normals):
        if any(np.allclose(normal, other, atol=1e-12) for other in seen):
            continue
        seen.append(normal)
        others = body.normals[~np.all(np.isclose(body.normals, normal, atol=1e-12), axis=1)]

        def _facet_hits(n_w: int, stream: RngStream) -> SampleBatch:
            points = sample_points_on_great_sphere(normal, n_w, stream)
            ok = np.all(points @ others.T >= 0.0, axis=1)
            return SampleBatch(values=points[ok], n_attempted=n_w)

        share = run_sharded(
            _facet_hits, n, seed, workers, FACET_STREAMS + i * STREAM_BLOCK
        ).acceptance_rate
        total += share * omega
        variance += (_binomial_se(share, n) * omega) ** 2
    logger.debug("facet boundary estimate", area=total, facets=len(seen))
    return total, math.sqrt(variance)
