"""Named verification suites."""

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Optional

from ..core.errors import DomainError
from ..core.logging import get_logger
from ..geometry.bodies import ConvexSphericalBody, SphericalCap
from ..stats.reports import VerificationReport
from .checks import (
    bp_identity_check,
    cap_sigma_cdf_check,
    crofton_hit_check,
    crofton_mean_chord_check,
    theorem_end_to_end_check,
)


logger = get_logger(__name__)

SUITES = ("default", "crofton", "bp", "theorem", "cap-sigma")

DEFAULT_CAPS = {"crofton": [(3, math.pi / 3), (4, 0.8)], "bp": [(3, math.pi / 3), (4, 0.8)]}
CAP_SIGMA_CASES = [(d, r) for d in (3, 4, 6) for r in (math.pi / 3, 0.8, 1.2)]


@dataclass
class SuiteOptions:
    """Inputs shared by every check of a suite."""
    n: int
    seed: int
    workers: Optional[int] = None
    timings: Optional[bool] = None
    dim: Optional[int] = None
    radius: Optional[float] = None
    body: Optional[ConvexSphericalBody] = None

    def caps(self, defaults: list[tuple[int, float]]) -> list[SphericalCap]:
        """The suite's default caps, or the single cap chosen by ``dim``/``radius``."""
        if self.dim is None and self.radius is None:
            return [SphericalCap.centered(d, r) for d, r in defaults]
        d = defaults[0][0] if self.dim is None else self.dim
        r = math.pi / 3 if self.radius is None else self.radius
        return [SphericalCap.centered(d, r)]

    def general_body(self) -> ConvexSphericalBody:
        """The supplied halfspace body, or the octant of S^2."""
        return ConvexSphericalBody.orthant(3) if self.body is None else self.body


def _crofton(options: SuiteOptions) -> list[VerificationReport]:
    bodies = [*options.caps(DEFAULT_CAPS["crofton"]), options.general_body()]
    reports = []
    for check in (crofton_hit_check, crofton_mean_chord_check):
        for body in bodies:
            reports.append(
                check(
                    body,
                    body.dim,
                    n=options.n,
                    seed=options.seed,
                    workers=options.workers,
                    timings=options.timings,
                )
            )
    return reports


def _bp(options: SuiteOptions) -> list[VerificationReport]:
    return [
        bp_identity_check(
            cap,
            cap.dim,
            n=2 * options.n,
            seed=options.seed,
            workers=options.workers,
            timings=options.timings,
        )
        for cap in options.caps(DEFAULT_CAPS["bp"])
    ]


def _theorem(options: SuiteOptions) -> list[VerificationReport]:
    if options.dim is not None or options.radius is not None:
        cap = options.caps([(3, math.pi / 3)])[0]
        cases = [(cap, "analytic"), (cap, "empirical")]
    else:
        cases = [
            (SphericalCap.centered(3, math.pi / 3), "analytic"),
            (SphericalCap.centered(5, 0.7), "empirical"),
        ]
    reports = [
        theorem_end_to_end_check(
            cap,
            cap.dim,
            n=options.n,
            seed=options.seed,
            sigma_source=source,
            sigma_n=2 * options.n,
            workers=options.workers,
            timings=options.timings,
        )
        for cap, source in cases
    ]
    body = options.general_body()
    reports.append(
        theorem_end_to_end_check(
            body,
            body.dim,
            n=2 * options.n,
            seed=options.seed,
            sigma_source="empirical",
            sigma_n=2 * options.n,
            estimate_measures=True,
            workers=options.workers,
            timings=options.timings,
        )
    )
    return reports


def _cap_sigma(options: SuiteOptions) -> list[VerificationReport]:
    cases = CAP_SIGMA_CASES
    if options.dim is not None or options.radius is not None:
        cases = [(cap.dim, cap.radius) for cap in options.caps(CAP_SIGMA_CASES)]
    return [
        cap_sigma_cdf_check(
            SphericalCap.centered(d, r),
            d,
            n=options.n,
            seed=options.seed,
            workers=options.workers,
            timings=options.timings,
        )
        for d, r in cases
    ]


_RUNNERS: dict[str, Callable[[SuiteOptions], list[VerificationReport]]] = {
    "crofton": _crofton,
    "bp": _bp,
    "theorem": _theorem,
    "cap-sigma": _cap_sigma,
}


def run_suite(name: str, options: SuiteOptions) -> list[VerificationReport]:
    """
    Run a named suite and return its reports in a fixed order.

    Args:
        name: One of ``SUITES``; ``default`` runs every other suite in turn.
        options: Sample size, seed and optional body selection.

    Raises:
        DomainError: For an unknown suite name.
    """
    if name not in SUITES:
        raise DomainError(f"Unknown suite: {name} (choose from {', '.join(SUITES)})")
    if options.n <= 0:
        raise DomainError(f"Sample count must be positive, got {options.n}")
    names = [s for s in SUITES if s != "default"] if name == "default" else [name]
    reports: list[VerificationReport] = []
    for suite in names:
        logger.info("running suite", suite=suite, n=options.n, seed=options.seed)
        reports.extend(_RUNNERS[suite](options))
    failed = [r.name for r in reports if not r.passed]
    logger.info("suite finished", suite=name, checks=len(reports), failed=failed)
    return reports
