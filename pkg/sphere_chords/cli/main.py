"""Command line entry point: ``sphere-chords``."""

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd

from ..analysis.caps import cap_delta_density_curve, cap_sigma_grid, cap_sigma_survival
from ..analysis.transform import delta_density_from_sigma
from ..core.config import get_settings
from ..core.errors import (
    DomainError,
    EfficiencyError,
    InputDataError,
    NonMonotoneCDFError,
    SphereChordsError,
)
from ..core.logging import configure_logging, get_logger
from ..geometry.bodies import SphericalBody, SphericalCap
from ..sampling.rng import SampleBatch
from ..sampling.variables import delta_samples, sigma_samples
from ..verify.suites import SUITES, SuiteOptions, run_suite
from .io import read_body_file, read_sigma_table, write_table


logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_EFFICIENCY = 4


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _grid(points: int, top: float) -> np.ndarray:
    if points < 2:
        raise DomainError(f"Grid needs at least 2 points, got {points}")
    return np.linspace(0.0, top, points)


def cmd_cap_delta(args: argparse.Namespace) -> int:
    """Density and distribution of the distance between two points of a cap."""
    cap = SphericalCap.centered(args.dim, args.radius)
    curve = cap_delta_density_curve(
        cap, args.dim, grid=_grid(args.grid, 2.0 * args.radius), closed_form=args.closed_form
    )
    write_table(curve.to_frame(), args.format, sys.stdout, curve.metadata)
    return EXIT_OK


def cmd_cap_sigma(args: argparse.Namespace) -> int:
    """Chord-length distribution of a cap."""
    cap = SphericalCap.centered(args.dim, args.radius)
    s = cap_sigma_grid(cap, args.dim, args.grid)
    survival = np.asarray(cap_sigma_survival(cap, args.dim, s))
    frame = pd.DataFrame({"s": s, "F_sigma": 1.0 - survival, "survival": survival})
    write_table(frame, args.format, sys.stdout, {"d": args.dim, "body": cap.describe()})
    return EXIT_OK


def cmd_transform(args: argparse.Namespace) -> int:
    """Distance density of a body from a tabulated chord-length distribution."""
    sigma = read_sigma_table(args.sigma_cdf)
    curve = delta_density_from_sigma(
        sigma, args.volume, args.boundary, args.dim, _grid(args.grid, sigma.support_max)
    )
    if curve.clamped:
        logger.warning("density clamped to zero", first_t=curve.first_clamped_t)
    write_table(curve.to_frame(), args.format, sys.stdout, curve.metadata)
    return EXIT_OK


def _load_body(args: argparse.Namespace) -> SphericalBody:
    if args.body == "cap":
        if args.dim is None or args.radius is None:
            raise DomainError("--body cap needs --dim and --radius")
        return SphericalCap.centered(args.dim, args.radius)
    if args.body_file is None:
        raise DomainError("--body halfspaces needs --body-file")
    body = read_body_file(args.body_file)
    if args.dim is not None and args.dim != body.dim:
        raise DomainError(f"--dim {args.dim} does not match the body file (d={body.dim})")
    return body


def _summary(batch: SampleBatch, what: str, bins: int) -> dict[str, Any]:
    values = batch.values
    top = float(values.max()) if values.size else 0.0
    counts, edges = np.histogram(values, bins=bins, range=(0.0, top if top > 0 else 1.0))
    summary: dict[str, Any] = {
        "n": batch.n_accepted,
        "n_attempted": batch.n_attempted,
        "mean": float(values.mean()) if values.size else math.nan,
        "std": float(values.std(ddof=1)) if values.size > 1 else math.nan,
        "min": float(values.min()) if values.size else math.nan,
        "max": top,
        "histogram": {"edges": edges.tolist(), "counts": counts.tolist()},
    }
    if what == "sigma":
        summary["hit_rate"] = batch.acceptance_rate
        summary["hit_rate_se"] = batch.acceptance_se
    return summary


def cmd_mc(args: argparse.Namespace) -> int:
    """Monte Carlo samples of Delta or sigma."""
    body = _load_body(args)
    workers = get_settings().execution.workers if args.workers is None else args.workers
    sampler = delta_samples if args.what == "delta" else sigma_samples
    batch = sampler(body, args.n, args.seed, workers)

    if args.output == "samples":
        frame = pd.DataFrame({"value": batch.values})
        write_table(frame, args.format, sys.stdout, {"what": args.what, "seed": args.seed})
        return EXIT_OK

    payload = {
        "what": args.what,
        "d": body.dim,
        "body": body.describe(),
        "seed": args.seed,
        "workers": workers,
        **_summary(batch, args.what, args.bins),
    }
    sys.stdout.write(json.dumps(payload) + "\n")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Run a verification suite; one JSON report per line."""
    options = SuiteOptions(
        n=args.n,
        seed=args.seed,
        workers=args.workers,
        timings=True if args.timings else None,
        dim=args.dim,
        radius=args.radius,
        body=None if args.body_file is None else read_body_file(args.body_file),
    )
    reports = run_suite(args.suite, options)
    for report in reports:
        sys.stdout.write(report.to_json() + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--log-json", action="store_true", help="Render log records as JSON")

    parser = argparse.ArgumentParser(
        prog="sphere-chords",
        description="Chord-length and distance distributions of spherical convex bodies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def _cap_flags(p: argparse.ArgumentParser, rows: int) -> None:
        p.add_argument("--dim", type=int, required=True, help="Ambient dimension d >= 3")
        p.add_argument("--radius", type=float, required=True, help="Cap radius in radians")
        p.add_argument("--grid", type=int, default=rows, help="Number of grid points")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("cap-delta", parents=[common], help="Distance density of a cap")
    _cap_flags(p, 512)
    p.add_argument("--closed-form", action="store_true", help="Use the even-dimension closed form")
    p.set_defaults(handler=cmd_cap_delta)

    p = sub.add_parser("cap-sigma", parents=[common], help="Chord-length distribution of a cap")
    _cap_flags(p, 4097)
    p.set_defaults(handler=cmd_cap_sigma)

    p = sub.add_parser("transform", parents=[common], help="Distance density from a chord CDF table")
    p.add_argument("--sigma-cdf", type=Path, required=True, help="CSV with columns s, F_sigma")
    p.add_argument("--volume", type=float, required=True, help="|K|")
    p.add_argument("--boundary", type=float, required=True, help="|dK|")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(handler=cmd_transform)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo samples of Delta or sigma")
    p.add_argument("--what", choices=("delta", "sigma"), required=True)
    p.add_argument("--body", choices=("cap", "halfspaces"), required=True)
    p.add_argument("--body-file", type=Path, help="Halfspace body file")
    p.add_argument("--dim", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--n", type=_positive_int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int)
    p.add_argument("--output", choices=("summary", "samples"), default="summary")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="Format of samples")
    p.add_argument("--bins", type=_positive_int, default=50, help="Histogram bins of the summary")
    p.set_defaults(handler=cmd_mc)

    p = sub.add_parser("verify", parents=[common], help="Run a verification suite")
    p.add_argument("--suite", choices=SUITES, default="default")
    p.add_argument("--n", type=_positive_int, default=100000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=_positive_int)
    p.add_argument("--dim", type=int, help="Restrict cap checks to this dimension")
    p.add_argument("--radius", type=float, help="Restrict cap checks to this radius")
    p.add_argument("--body-file", type=Path, help="Halfspace body replacing the octant")
    p.add_argument("--timings", action="store_true", help="Record wall time in the reports")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Parse arguments, run a command and map errors to exit codes."""
    args = _build_parser().parse_args(argv)
    try:
        configure_logging(level=args.log_level, json=True if args.log_json else None)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return int(args.handler(args))
    except EfficiencyError as e:
        logger.error("sampler efficiency", error=str(e), rate=e.rate)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EFFICIENCY
    except (InputDataError, NonMonotoneCDFError) as e:
        row = getattr(e, "row", None)
        logger.error("bad input data", error=str(e), row=row)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SphereChordsError as e:
        logger.error("command failed", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
