"""Distance distribution of a spherical body from its chord-length distribution.

For a body K in S^{d-1} with chord law F_sigma,

    f_Delta(t) = sin^{d-2}(t) / |K| * (omega_{d-1} - C * J(t)),
    C = (omega_d / 2 pi) * |dK| / |K|,   J(t) = int_0^t (1 - F_sigma(s)) ds.

Integrating by parts with F_n(t) = int_0^t sin^n and n = d - 2 gives the
distribution function

    F_Delta(t) = (omega_{d-1} F_n(t) - C (F_n(t) J(t) - M(t))) / |K|,
    M(t) = int_0^t F_n(s) (1 - F_sigma(s)) ds.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import numpy.typing as npt
import pandas as pd
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.interpolate import PchipInterpolator

from ..core.config import get_settings
from ..core.errors import DomainError, NonMonotoneCDFError
from ..core.logging import get_logger
from ..geometry.constants import sphere_surface_area
from ..stats.empirical import EmpiricalCDF, empirical_cdf
from ..stats.quadrature import adaptive_quadrature, cumulative_quadrature
from .antiderivatives import sin_power_antiderivative, sin_power_double_antiderivative


logger = get_logger(__name__)

Survival = Callable[[float], float]

MONOTONE_SLACK = 1e-12
ENDPOINT_TOLERANCE = 1e-9
# brackets above -CLAMP_NOISE * omega_{d-1} are rounding, not a flagged clamp
CLAMP_NOISE = 1e-10
VALIDATION_POINTS = 1025


def _panel_to_support(g: Survival, support: float, a: float, b: float, tol: float) -> float:
    """int_a^b g for a function vanishing like a square root at ``support``.

    The upper half of [0, support] is integrated in u with s = support - u^2,
    which removes the square-root singularity of the derivative.
    """
    b = min(b, support)
    if b <= a:
        return 0.0
    half = 0.5 * support
    total = 0.0
    if a < half:
        total += adaptive_quadrature(g, a, min(b, half), tol=tol)[0]
    if b > half:
        lo = max(a, half)
        total += adaptive_quadrature(
            lambda u: g(support - u * u) * 2.0 * u,
            math.sqrt(support - b),
            math.sqrt(support - lo),
            tol=tol,
        )[0]
    return total


def integrals_to_support(
    g: Survival,
    support: float,
    t: npt.ArrayLike,
    tol: Optional[float] = None,
) -> npt.NDArray[np.float64]:
    """
    Running integrals int_0^t g for every t, with g = 0 beyond ``support``.

    Args:
        g: Integrand on [0, support], vanishing like a square root at ``support``.
        support: Right end of the support of g.
        t: Upper limits, any order, all >= 0.
        tol: Absolute error target per panel.

    Returns:
        Array shaped like ``t``.
    """
    tol = get_settings().quadrature.cumulative_tolerance if tol is None else tol
    points = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(points < 0) or not np.all(np.isfinite(points)):
        raise DomainError("Integration limits must be finite and non-negative")
    flat = points.ravel()
    order = np.argsort(flat, kind="stable")
    edges = np.concatenate(([0.0], flat[order]))
    pieces = [
        _panel_to_support(g, support, float(a), float(b), tol)
        for a, b in zip(edges[:-1], edges[1:])
    ]
    out = np.empty_like(flat)
    out[order] = np.cumsum(pieces)
    return out.reshape(points.shape)


@dataclass(frozen=True, eq=False)
class SigmaCDF:
    """
    Distribution function of the chord length sigma(K).

    Built by one of the constructors: ``analytic`` (closed-form survival
    function), ``from_samples`` (empirical step function) or ``from_table``
    (piecewise-linear interpolation of tabulated values). Each kind integrates
    its survival function exactly or by quadrature to the configured tolerance.
    """
    evaluator: Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]
    support_max: float
    kind: str
    metadata: dict[str, Any] = field(default_factory=dict)
    _survival: Optional[Survival] = field(default=None, repr=False)
    _ecdf: Optional[EmpiricalCDF] = field(default=None, repr=False)
    _table: Optional[tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]] = field(
        default=None, repr=False
    )

    @classmethod
    def analytic(
        cls,
        survival: Callable[[npt.ArrayLike], npt.ArrayLike],
        support_max: float,
        metadata: Optional[dict[str, Any]] = None,
    ) -> "SigmaCDF":
        """
        Wrap a closed-form survival function 1 - F_sigma on [0, support_max].

        Raises:
            NonMonotoneCDFError: If the survival function increases on a check grid.
            DomainError: If it does not run from 1 to 0.
        """
        if not 0.0 < support_max <= math.pi:
            raise DomainError(f"Chord support must lie in (0, pi], got {support_max}")

        def _evaluate(s: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
            x = np.asarray(s, dtype=float)
            inside = np.clip(x, 0.0, support_max)
            values = 1.0 - np.asarray(survival(inside), dtype=float)
            return np.where(x < 0, 0.0, np.where(x >= support_max, 1.0, values))

        grid = np.linspace(0.0, support_max, VALIDATION_POINTS)
        _check_monotone(_evaluate(grid))
        if abs(float(_evaluate(np.array(0.0)))) > ENDPOINT_TOLERANCE:
            raise DomainError("Chord distribution must start at 0")
        if abs(float(survival(support_max))) > ENDPOINT_TOLERANCE:
            raise DomainError("Chord distribution must reach 1 at the end of its support")

        def _scalar(s: float) -> float:
            return float(survival(min(max(s, 0.0), support_max)))

        return cls(
            evaluator=_evaluate,
            support_max=float(support_max),
            kind="analytic",
            metadata=dict(metadata or {}),
            _survival=_scalar,
        )

    @classmethod
    def from_samples(
        cls, samples: npt.ArrayLike, metadata: Optional[dict[str, Any]] = None
    ) -> "SigmaCDF":
        """Empirical step CDF of chord samples."""
        ecdf = empirical_cdf(samples)
        if ecdf.sorted_samples[0] < 0 or ecdf.sorted_samples[-1] > math.pi:
            raise DomainError("Chord samples must lie in [0, pi]")
        info = {"n_samples": ecdf.n, **(metadata or {})}
        return cls(
            evaluator=lambda s: np.asarray(ecdf(s), dtype=float),
            support_max=float(ecdf.sorted_samples[-1]),
            kind="empirical",
            metadata=info,
            _ecdf=ecdf,
        )

    @classmethod
    def from_table(
        cls, s: npt.ArrayLike, F: npt.ArrayLike, metadata: Optional[dict[str, Any]] = None
    ) -> "SigmaCDF":
        """
        Piecewise-linear CDF through tabulated points (s_j, F_j).

        F is 0 before the first row and 1 from the last row on.

        Raises:
            NonMonotoneCDFError: At the first row where s or F decreases.
            DomainError: On empty tables, values outside [0, 1] or a last value
                other than 1.
        """
        s = np.asarray(s, dtype=float).ravel()
        F = np.asarray(F, dtype=float).ravel()
        if s.size == 0 or s.size != F.size:
            raise DomainError("Table needs matching, non-empty s and F columns")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(F))):
            raise DomainError("Table values must be finite")
        if s[0] < 0 or s[-1] > math.pi:
            raise DomainError("Chord lengths must lie in [0, pi]")
        bad_s = np.flatnonzero(np.diff(s) < 0)
        if bad_s.size:
            row = int(bad_s[0]) + 2
            raise NonMonotoneCDFError(f"Chord lengths decrease at row {row}", row=row)
        _check_monotone(F)
        if F[0] < 0 or F[-1] > 1 + ENDPOINT_TOLERANCE:
            raise DomainError("CDF values must lie in [0, 1]")
        if abs(F[-1] - 1.0) > ENDPOINT_TOLERANCE:
            raise DomainError(f"CDF must reach 1 at its last row, got {F[-1]:.12g}")

        def _evaluate(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
            x = np.asarray(x, dtype=float)
            return np.where(x < s[0], 0.0, np.interp(x, s, F, left=F[0], right=1.0))

        return cls(
            evaluator=_evaluate,
            support_max=float(s[-1]),
            kind="table",
            metadata={"rows": int(s.size), **(metadata or {})},
            _table=(s, F),
        )

    def __call__(self, s: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
        values = self.evaluator(np.asarray(s, dtype=float))
        return float(values) if np.ndim(values) == 0 else values

    def survival_integral(self, t: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """J(t) = int_0^t (1 - F_sigma(s)) ds."""
        points = np.atleast_1d(np.asarray(t, dtype=float))
        if self._ecdf is not None:
            return self._ecdf.mean_min(np.maximum(points, 0.0))
        if self._table is not None:
            return self._table_survival_integral(points)
        assert self._survival is not None
        return integrals_to_support(self._survival, self.support_max, points)

    def weighted_survival_integral(self, n: int, t: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """M(t) = int_0^t F_n(s) (1 - F_sigma(s)) ds."""
        points = np.atleast_1d(np.asarray(t, dtype=float))
        if self._ecdf is not None:
            # the integral of F_n over [0, min(sigma_i, t)] is G_n(min(sigma_i, t))
            ecdf = self._ecdf
            cumulative = np.concatenate(
                ([0.0], np.cumsum(sin_power_double_antiderivative(n, ecdf.sorted_samples)))
            )
            clipped = np.maximum(points, 0.0)
            k = np.searchsorted(ecdf.sorted_samples, clipped, side="right")
            tail = (ecdf.n - k) * np.asarray(sin_power_double_antiderivative(n, clipped))
            return (cumulative[k] + tail) / ecdf.n

        if self._table is not None:
            table_s, _ = self._table
            evaluator = self.evaluator

            def _integrand(x: float) -> float:
                return float(sin_power_antiderivative(n, x)) * (1.0 - float(evaluator(np.array(x))))

            flat = points.ravel()
            order = np.argsort(flat, kind="stable")
            limits = np.concatenate(([0.0], np.minimum(flat[order], self.support_max)))
            running = cumulative_quadrature(_integrand, limits, breakpoints=table_s)[1:]
            out = np.empty_like(flat)
            out[order] = running
            return out.reshape(points.shape)

        assert self._survival is not None
        base = self._survival

        def _weighted(x: float) -> float:
            return float(sin_power_antiderivative(n, x)) * base(x)

        return integrals_to_support(_weighted, self.support_max, points)

    def _table_survival_integral(self, t: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        assert self._table is not None
        s, F = self._table
        h = 1.0 - F
        # [0, s_0) has F = 0; between rows 1 - F is linear
        at_knots = s[0] + np.concatenate(([0.0], np.cumsum(0.5 * (h[1:] + h[:-1]) * np.diff(s))))
        x = np.maximum(t, 0.0)
        j = np.clip(np.searchsorted(s, x, side="right") - 1, 0, s.size - 1)
        delta = np.clip(x - s[j], 0.0, None)
        width = np.diff(s, append=s[-1])[j]
        slope = np.divide(
            np.diff(h, append=h[-1])[j], width, out=np.zeros_like(delta), where=width > 0
        )
        inside = np.minimum(delta, width)
        within = at_knots[j] + h[j] * inside + 0.5 * slope * inside * inside
        return np.where(x < s[0], x, np.where(x >= s[-1], at_knots[-1], within))


def _check_monotone(values: npt.NDArray[np.float64]) -> None:
    drops = np.flatnonzero(np.diff(values) < -MONOTONE_SLACK)
    if drops.size:
        # rows are counted from 1
        i = int(drops[0]) + 1
        row = i + 1
        raise NonMonotoneCDFError(
            f"Distribution function decreases at row {row} "
            f"({values[i - 1]:.12g} -> {values[i]:.12g})",
            row=row,
        )


@dataclass
class DensityCurve:
    """Density of Delta(K) sampled on a grid, with its distribution function when known."""
    grid: npt.NDArray[np.float64]
    values: npt.NDArray[np.float64]
    metadata: dict[str, Any] = field(default_factory=dict)
    cdf: Optional[npt.NDArray[np.float64]] = None
    clamped: bool = False
    first_clamped_t: Optional[float] = None

    def __post_init__(self) -> None:
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise DomainError("Grid and values must be one-dimensional of equal length")
        if np.any(np.diff(self.grid) <= 0):
            raise DomainError("Grid must be strictly increasing")

    def integral(self) -> float:
        """Trapezoidal integral of the density over the grid."""
        return float(trapezoid(self.values, self.grid))

    def cumulative(self) -> npt.NDArray[np.float64]:
        """Trapezoidal running integral, starting at 0."""
        return cumulative_trapezoid(self.values, self.grid, initial=0.0)

    def moment(self, p: float = 1.0) -> float:
        """E[Delta^p]; p = 1 is the mean spherical distance."""
        return float(trapezoid(self.grid**p * self.values, self.grid))

    def distribution(self) -> Callable[[npt.ArrayLike], npt.NDArray[np.float64]]:
        """Monotone interpolant of the distribution function, 0 before and 1 after the grid."""
        F = self.cumulative() if self.cdf is None else self.cdf
        F = np.clip(np.maximum.accumulate(F), 0.0, 1.0)
        spline = PchipInterpolator(self.grid, F, extrapolate=False)
        lo, hi = self.grid[0], self.grid[-1]

        def _cdf(x: npt.ArrayLike) -> npt.NDArray[np.float64]:
            x = np.asarray(x, dtype=float)
            inner = np.nan_to_num(spline(np.clip(x, lo, hi)))
            return np.where(x < lo, 0.0, np.where(x >= hi, F[-1], inner))

        return _cdf

    def to_frame(self) -> pd.DataFrame:
        """Columns t, f_delta and F_delta."""
        F = self.cumulative() if self.cdf is None else self.cdf
        return pd.DataFrame({"t": self.grid, "f_delta": self.values, "F_delta": F})


def _check_measures(volume: float, boundary_area: float, d: int) -> None:
    if isinstance(d, bool) or int(d) != d or d < 3:
        raise DomainError(f"Dimension must be an integer >= 3, got {d!r}")
    if not (volume > 0 and math.isfinite(volume)):
        raise DomainError(f"Volume must be positive, got {volume}")
    if not (boundary_area > 0 and math.isfinite(boundary_area)):
        raise DomainError(f"Boundary area must be positive, got {boundary_area}")


def _check_grid(grid: npt.ArrayLike) -> npt.NDArray[np.float64]:
    t = np.atleast_1d(np.asarray(grid, dtype=float))
    if t.ndim != 1 or t.size == 0 or not np.all(np.isfinite(t)):
        raise DomainError("Grid must be a non-empty one-dimensional finite array")
    if np.any(t < 0):
        raise DomainError("Distances are non-negative")
    return t


def delta_density_from_sigma(
    sigma_cdf: SigmaCDF,
    volume: float,
    boundary_area: float,
    d: int,
    grid: npt.ArrayLike,
) -> DensityCurve:
    """
    Density of Delta(K) on ``grid`` from the chord distribution of K.

    Negative brackets mean t lies beyond the support or the inputs are noisy;
    they are clamped to 0 and the first offending t is logged.

    Args:
        sigma_cdf: Chord-length distribution of K.
        volume: |K|.
        boundary_area: |dK|.
        d: Ambient dimension.
        grid: Strictly increasing distances.

    Returns:
        DensityCurve with the density and the exact distribution function.
    """
    _check_measures(volume, boundary_area, d)
    t = _check_grid(grid)
    omega_low = sphere_surface_area(d - 1)
    C = sphere_surface_area(d) / (2.0 * math.pi) * boundary_area / volume

    J = sigma_cdf.survival_integral(t)
    bracket = omega_low - C * J
    flagged = bracket < -CLAMP_NOISE * omega_low
    first = float(t[np.argmax(flagged)]) if np.any(flagged) else None
    if first is not None:
        logger.warning(
            "negative density bracket clamped",
            first_t=first,
            count=int(np.count_nonzero(flagged)),
            minimum=float(np.min(bracket)),
        )
    values = np.sin(t) ** (d - 2) / volume * np.maximum(bracket, 0.0)

    F = _delta_cdf(sigma_cdf, volume, C, d, t, J)
    metadata = {
        "d": d,
        "volume": volume,
        "boundary_area": boundary_area,
        "sigma": sigma_cdf.kind,
        **sigma_cdf.metadata,
    }
    return DensityCurve(
        grid=t,
        values=values,
        metadata=metadata,
        cdf=F,
        clamped=first is not None,
        first_clamped_t=first,
    )


def _delta_cdf(
    sigma_cdf: SigmaCDF,
    volume: float,
    C: float,
    d: int,
    t: npt.NDArray[np.float64],
    J: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    n = d - 2
    Fn = np.asarray(sin_power_antiderivative(n, t))
    M = sigma_cdf.weighted_survival_integral(n, t)
    F = (sphere_surface_area(d - 1) * Fn - C * (Fn * J - M)) / volume
    return np.clip(F, 0.0, 1.0)


def delta_cdf_from_sigma(
    sigma_cdf: SigmaCDF,
    volume: float,
    boundary_area: float,
    d: int,
    t: npt.ArrayLike,
) -> npt.NDArray[np.float64] | float:
    """Distribution function of Delta(K) at ``t``, clipped to [0, 1]."""
    _check_measures(volume, boundary_area, d)
    points = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(points < 0) or not np.all(np.isfinite(points)):
        raise DomainError("Distances must be finite and non-negative")
    C = sphere_surface_area(d) / (2.0 * math.pi) * boundary_area / volume
    F = _delta_cdf(sigma_cdf, volume, C, d, points, sigma_cdf.survival_integral(points))
    return float(F[0]) if np.ndim(t) == 0 else F
