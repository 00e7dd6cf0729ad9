"""Monte Carlo checks of the spherical integral-geometric identities."""

import math
import time
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any, Optional

import numpy as np
import numpy.typing as npt

from ..analysis.antiderivatives import sin_power_double_antiderivative
from ..analysis.caps import cap_sigma_cdf
from ..analysis.transform import SigmaCDF, delta_density_from_sigma
from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.logging import get_logger
from ..geometry.bodies import (
    ConvexSphericalBody,
    SphericalBody,
    SphericalCap,
    _check_body_dim,
    cap_boundary_area,
    cap_volume,
)
from ..geometry.constants import bp_constant, sphere_surface_area
from ..geometry.measures import body_measures_mc, facet_boundary_mc
from ..sampling.rng import STREAM_BLOCK
from ..sampling.variables import chord_samples, delta_samples, sigma_samples
from ..stats.empirical import (
    empirical_cdf,
    ks_critical,
    ks_statistic,
    two_sample_ks_critical,
)
from ..stats.reports import VerificationReport


logger = get_logger(__name__)

# Stream blocks per estimate so no two estimates of one check share draws.
CHORD_STREAMS = 4 * STREAM_BLOCK
DELTA_STREAMS = 5 * STREAM_BLOCK
SIGMA_STREAMS = 6 * STREAM_BLOCK
MEASURE_SEED_OFFSET = 1


class _Stopwatch:
    ms: Optional[float] = None


@contextmanager
def _timed(enabled: Optional[bool]) -> Iterator[_Stopwatch]:
    watch = _Stopwatch()
    record = get_settings().verification.record_timings if enabled is None else enabled
    start = time.perf_counter()
    yield watch
    if record:
        watch.ms = (time.perf_counter() - start) * 1000.0


def _params(body: SphericalBody, d: int, workers: Optional[int], **extra: Any) -> dict[str, Any]:
    workers = get_settings().execution.workers if workers is None else workers
    return {"d": d, "body": body.describe(), "workers": workers, **extra}


def _finish(report: VerificationReport) -> VerificationReport:
    logger.info("check finished", check=report.name, passed=report.passed, stats=report.stats)
    return report


def _known_measures(body: SphericalBody, d: int) -> Optional[tuple[float, float]]:
    if isinstance(body, SphericalCap):
        return cap_volume(body, d), cap_boundary_area(body, d)
    return body.exact_measures()


def _mean_and_se(values: npt.NDArray[np.float64], n: int) -> tuple[float, float]:
    """Mean and standard error of n draws, of which only ``values`` are non-zero."""
    mean = float(values.sum()) / n
    second = float(np.square(values).sum()) / n
    return mean, math.sqrt(max(second - mean * mean, 0.0) / n)


def crofton_hit_check(
    body: SphericalBody,
    d: int,
    n: int,
    seed: int,
    workers: Optional[int] = None,
    timings: Optional[bool] = None,
) -> VerificationReport:
    """
    Hit frequency of Haar 2-planes against |dK| / omega_{d-1}.

    The boundary area comes from the closed form for caps and orthants and
    from facet-wise Monte Carlo otherwise; its standard error then enters
    the threshold.
    """
    _check_body_dim(body, d)
    settings = get_settings().verification
    with _timed(timings) as watch:
        omega = sphere_surface_area(d - 1)
        known = _known_measures(body, d)
        if known is not None:
            expected, oracle_se, source = known[1] / omega, 0.0, "exact"
        else:
            assert isinstance(body, ConvexSphericalBody)
            area, area_se = facet_boundary_mc(body, n, seed + MEASURE_SEED_OFFSET, workers)
            expected, oracle_se, source = area / omega, area_se / omega, "facets"

        chords = chord_samples(body, n, seed, workers, CHORD_STREAMS)
        rate = chords.acceptance_rate
        se = math.sqrt(expected * (1.0 - expected) / n + oracle_se**2)
        difference = rate - expected

    return _finish(
        VerificationReport(
            name="crofton_hit",
            params=_params(body, d, workers, oracle=source),
            stats={"hit_rate": rate, "expected": expected, "se": se, "difference": difference},
            thresholds={"difference": settings.se_multiplier * se},
            n={"planes": n},
            seed=seed,
            ms=watch.ms,
        )
    )


def crofton_mean_chord_check(
    body: SphericalBody,
    d: int,
    n: int,
    seed: int,
    workers: Optional[int] = None,
    timings: Optional[bool] = None,
) -> VerificationReport:
    """Mean of alpha(K cap L) 1{hit} over Haar planes against (2 pi / omega_d) |K|."""
    _check_body_dim(body, d)
    settings = get_settings().verification
    with _timed(timings) as watch:
        known = _known_measures(body, d)
        if known is not None:
            volume, volume_se, source = known[0], 0.0, "exact"
        else:
            measures = body_measures_mc(body, d, n, seed + MEASURE_SEED_OFFSET, workers)
            volume, volume_se, source = measures.volume, measures.volume_se, "monte_carlo"
        factor = 2.0 * math.pi / sphere_surface_area(d)
        expected = factor * volume

        chords = chord_samples(body, n, seed, workers, CHORD_STREAMS)
        mean, mean_se = _mean_and_se(chords.values, n)
        se = math.sqrt(mean_se**2 + (factor * volume_se) ** 2)

    return _finish(
        VerificationReport(
            name="crofton_mean_chord",
            params=_params(body, d, workers, oracle=source),
            stats={"mean_chord": mean, "expected": expected, "se": se, "difference": mean - expected},
            thresholds={"difference": settings.se_multiplier * se},
            n={"planes": n},
            seed=seed,
            ms=watch.ms,
        )
    )


def bp_identity_check(
    body: SphericalBody,
    d: int,
    n: int,
    seed: int,
    workers: Optional[int] = None,
    timings: Optional[bool] = None,
) -> VerificationReport:
    """
    Blaschke-Petkantschin identity for k = 2 and f = 1[x_1, x_2 in K].

    The left side is |K|^2. Integrating sin^{d-2} of the in-plane angle over
    pairs of points of an arc of length alpha gives 2 G_{d-2}(alpha), so the
    right side is 2 b_{d,2} E[1{hit} G_{d-2}(alpha)].
    """
    _check_body_dim(body, d)
    settings = get_settings().verification
    with _timed(timings) as watch:
        known = _known_measures(body, d)
        if known is None:
            volume = body_measures_mc(body, d, n, seed + MEASURE_SEED_OFFSET, workers).volume
            source = "monte_carlo"
        else:
            volume, source = known[0], "exact"
        lhs = volume**2

        chords = chord_samples(body, n, seed, workers, CHORD_STREAMS)
        weights = 2.0 * bp_constant(d) * np.asarray(sin_power_double_antiderivative(d - 2, chords.values))
        rhs, rhs_se = _mean_and_se(weights, n)
        relative = (rhs - lhs) / lhs
        tolerance = max(settings.bp_relative_tolerance, settings.se_multiplier * rhs_se / lhs)

    return _finish(
        VerificationReport(
            name="bp_identity",
            params=_params(body, d, workers, oracle=source),
            stats={"lhs": lhs, "rhs": rhs, "rhs_se": rhs_se, "relative_difference": relative},
            thresholds={"relative_difference": tolerance},
            n={"planes": n},
            seed=seed,
            ms=watch.ms,
        )
    )


def theorem_end_to_end_check(
    body: SphericalBody,
    d: int,
    n: int,
    seed: int,
    grid: Optional[int] = None,
    sigma_source: str = "analytic",
    sigma_n: Optional[int] = None,
    estimate_measures: bool = False,
    workers: Optional[int] = None,
    timings: Optional[bool] = None,
) -> VerificationReport:
    """
    Distance law from the chord law against directly sampled distances.

    Pipeline A turns the chord distribution (closed form for caps, or sampled)
    into the distribution of Delta; pipeline B samples Delta from pairs of
    uniform points. The two are compared by the KS distance.

    Args:
        body: Body under test.
        d: Ambient dimension.
        n: Number of sampled distances.
        seed: Seed of every stream in the check.
        grid: Points of the density grid.
        sigma_source: ``"analytic"`` (caps only) or ``"empirical"``.
        sigma_n: Chord samples for the empirical source; defaults to ``n``.
        estimate_measures: Use Monte Carlo |K| and |dK| even when closed forms exist.
        workers: Worker count.
        timings: Record wall time.
    """
    _check_body_dim(body, d)
    settings = get_settings().verification
    if sigma_source not in {"analytic", "empirical"}:
        raise DomainError(f"Unknown sigma source: {sigma_source}")
    if sigma_source == "analytic" and not isinstance(body, SphericalCap):
        raise DomainError("The analytic chord distribution is only available for caps")
    points = settings.density_grid if grid is None else grid
    sigma_n = n if sigma_n is None else sigma_n

    with _timed(timings) as watch:
        known = None if estimate_measures else _known_measures(body, d)
        if known is None:
            measures = body_measures_mc(body, d, max(n, sigma_n), seed + MEASURE_SEED_OFFSET, workers)
            volume, boundary = measures.volume, measures.boundary_area
        else:
            volume, boundary = known

        if sigma_source == "analytic":
            assert isinstance(body, SphericalCap)
            sigma: SigmaCDF = cap_sigma_cdf(body, d)
        else:
            chords = sigma_samples(body, sigma_n, seed, workers, SIGMA_STREAMS)
            sigma = SigmaCDF.from_samples(chords.values)

        distances = delta_samples(body, n, seed, workers, DELTA_STREAMS).values
        top = max(sigma.support_max, float(np.max(distances)))
        curve = delta_density_from_sigma(sigma, volume, boundary, d, np.linspace(0.0, top, points))
        ks = ks_statistic(empirical_cdf(distances), curve.distribution())

        if sigma_source == "analytic":
            threshold = ks_critical(n)
        else:
            threshold = two_sample_ks_critical(sigma_n, n)
        if known is None:
            threshold = max(threshold, settings.estimated_measures_ks_tolerance)

    return _finish(
        VerificationReport(
            name="theorem_end_to_end",
            params=_params(
                body,
                d,
                workers,
                sigma_source=sigma_source,
                measures="monte_carlo" if known is None else "exact",
                grid=points,
                first_clamped_t=curve.first_clamped_t,
            ),
            stats={
                "ks": ks,
                "volume": volume,
                "boundary_area": boundary,
                "cdf_at_support": float(curve.cdf[-1]) if curve.cdf is not None else float("nan"),
                "mean_distance": curve.moment(1),
            },
            thresholds={"ks": threshold},
            n={"delta": n, "sigma": 0 if sigma_source == "analytic" else sigma_n},
            seed=seed,
            ms=watch.ms,
        )
    )


def cap_sigma_cdf_check(
    cap: SphericalCap,
    d: int,
    n: int,
    seed: int,
    workers: Optional[int] = None,
    timings: Optional[bool] = None,
) -> VerificationReport:
    """KS distance between sampled cap chords and 1 - cap_sigma_survival."""
    _check_body_dim(cap, d)
    if not isinstance(cap, SphericalCap):
        raise DomainError("The chord distribution check needs a cap")
    with _timed(timings) as watch:
        samples = sigma_samples(cap, n, seed, workers, SIGMA_STREAMS)
        ks = ks_statistic(empirical_cdf(samples.values), cap_sigma_cdf(cap, d))
        threshold = ks_critical(n)

    return _finish(
        VerificationReport(
            name="cap_sigma_cdf",
            params=_params(cap, d, workers, radius=cap.radius),
            stats={"ks": ks, "hit_rate": samples.acceptance_rate},
            thresholds={"ks": threshold},
            n={"sigma": n, "planes": samples.n_attempted},
            seed=seed,
            ms=watch.ms,
        )
    )
