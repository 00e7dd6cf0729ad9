"""Samples of the chord length sigma(K) and the point distance Delta(K)."""

import math
from functools import partial
from typing import Optional

import numpy as np

from ..core.config import get_settings
from ..core.errors import DomainError, EfficiencyError
from ..core.logging import get_logger
from ..geometry.bodies import SphericalBody, spherical_distances
from ..geometry.chords import chord_arcs
from .planes import sample_two_planes
from .points import sample_points_in_body
from .rng import RngStream, SampleBatch, as_generator, run_sharded


logger = get_logger(__name__)


def _check_body(body: SphericalBody, d: int) -> None:
    if body.dim != d:
        raise DomainError(f"Body lives in R^{body.dim}, got d={d}")


def sample_chords_batch(
    body: SphericalBody, n: int, rng: "RngStream | np.random.Generator"
) -> SampleBatch:
    """
    Cut ``body`` with ``n`` Haar 2-planes.

    Returns:
        SampleBatch holding the chord lengths of the hitting planes, with
        ``n_attempted = n``. The acceptance rate is the hit frequency and
        ``values.sum() / n`` estimates E[alpha(K cap L) 1{hit}].
    """
    U, V = sample_two_planes(body.dim, n, rng)
    lengths, hits = chord_arcs(body, U, V)
    return SampleBatch(values=lengths[hits], n_attempted=n)


def sample_sigma_batch(
    body: SphericalBody, n: int, rng: "RngStream | np.random.Generator"
) -> SampleBatch:
    """
    Draw ``n`` samples of sigma(K): chords of Haar planes conditioned to hit.

    Raises:
        EfficiencyError: If the hit rate of the probe batch is below the floor.
    """
    if n < 0:
        raise DomainError(f"Sample count must be non-negative, got {n}")
    if n == 0:
        return SampleBatch(values=np.empty(0), n_attempted=0)
    gen = as_generator(rng)
    settings = get_settings().sampler

    U, V = sample_two_planes(body.dim, settings.probe_batch, gen)
    lengths, hits = chord_arcs(body, U, V)
    rate = float(np.mean(hits))
    if rate < settings.min_hit_rate:
        logger.warning("chord sampler too inefficient", rate=rate)
        raise EfficiencyError(
            f"Only {rate:.2e} of random great circles hit the body, below {settings.min_hit_rate:.0e}",
            rate=rate,
        )

    all_lengths, all_hits = [lengths], [hits]
    got = int(np.count_nonzero(hits))
    while got < n:
        size = min(settings.batch_size, max(1024, math.ceil(1.1 * (n - got) / rate)))
        U, V = sample_two_planes(body.dim, size, gen)
        lengths, hits = chord_arcs(body, U, V)
        all_lengths.append(lengths)
        all_hits.append(hits)
        got += int(np.count_nonzero(hits))

    lengths = np.concatenate(all_lengths)
    hits = np.concatenate(all_hits)
    stop = int(np.flatnonzero(hits)[n - 1]) + 1
    logger.debug("sampled chords", n=n, attempted=stop, hit_rate=n / stop)
    return SampleBatch(values=lengths[:stop][hits[:stop]], n_attempted=stop)


def sample_sigma(body: SphericalBody, d: int, rng: "RngStream | np.random.Generator") -> float:
    """One sample of sigma(K)."""
    _check_body(body, d)
    return float(sample_sigma_batch(body, 1, rng).values[0])


def sample_delta_batch(
    body: SphericalBody, n: int, rng: "RngStream | np.random.Generator"
) -> SampleBatch:
    """Draw ``n`` distances between pairs of independent uniform points of ``body``."""
    gen = as_generator(rng)
    first = sample_points_in_body(body, n, gen)
    second = sample_points_in_body(body, n, gen)
    distances = spherical_distances(first.values, second.values)
    logger.debug(
        "sampled distances",
        n=n,
        acceptance=(first.n_accepted + second.n_accepted)
        / max(first.n_attempted + second.n_attempted, 1),
    )
    return SampleBatch(values=distances, n_attempted=n)


def sample_delta(body: SphericalBody, d: int, rng: "RngStream | np.random.Generator") -> float:
    """One sample of Delta(K)."""
    _check_body(body, d)
    return float(sample_delta_batch(body, 1, rng).values[0])


def chord_samples(
    body: SphericalBody,
    n: int,
    seed: int,
    workers: Optional[int] = None,
    stream_offset: int = 0,
) -> SampleBatch:
    """``sample_chords_batch`` sharded over deterministic streams."""
    return run_sharded(partial(sample_chords_batch, body), n, seed, workers, stream_offset)


def sigma_samples(
    body: SphericalBody,
    n: int,
    seed: int,
    workers: Optional[int] = None,
    stream_offset: int = 0,
) -> SampleBatch:
    """``sample_sigma_batch`` sharded over deterministic streams."""
    return run_sharded(partial(sample_sigma_batch, body), n, seed, workers, stream_offset)


def delta_samples(
    body: SphericalBody,
    n: int,
    seed: int,
    workers: Optional[int] = None,
    stream_offset: int = 0,
) -> SampleBatch:
    """``sample_delta_batch`` sharded over deterministic streams."""
    return run_sharded(partial(sample_delta_batch, body), n, seed, workers, stream_offset)
