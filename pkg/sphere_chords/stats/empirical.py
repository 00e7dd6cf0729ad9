"""Empirical distribution functions and Kolmogorov-Smirnov distances."""

from collections.abc import Callable
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt
import scipy.stats

from ..core.config import get_settings
from ..core.errors import DomainError


@dataclass(frozen=True)
class EmpiricalCDF:
    """Right-continuous step distribution function of a sample."""
    sorted_samples: npt.NDArray[np.float64]
    n: int

    def __call__(self, x: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
        values = np.searchsorted(self.sorted_samples, np.asarray(x, dtype=float), side="right")
        result = values / self.n
        return float(result) if np.ndim(result) == 0 else result

    def mean_min(self, t: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """E[min(X, t)] under the empirical law, i.e. the integral of 1 - F from 0 to t."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        cumsum = np.concatenate(([0.0], np.cumsum(self.sorted_samples)))
        k = np.searchsorted(self.sorted_samples, t, side="right")
        return (cumsum[k] + (self.n - k) * t) / self.n


def empirical_cdf(samples: npt.ArrayLike) -> EmpiricalCDF:
    """Build the empirical distribution function of ``samples``."""
    values = np.sort(np.asarray(samples, dtype=float).ravel())
    if values.size == 0:
        raise DomainError("Empirical CDF needs at least one sample")
    if not np.all(np.isfinite(values)):
        raise DomainError("Samples must be finite")
    return EmpiricalCDF(sorted_samples=values, n=int(values.size))


def ks_statistic(ecdf: EmpiricalCDF, cdf: Callable[[npt.NDArray[np.float64]], npt.ArrayLike]) -> float:
    """
    Sup-norm distance between an empirical CDF and a reference CDF.

    Both one-sided gaps are taken at the sample points: the step top against
    ``cdf(x)`` and the step bottom against the left limit ``cdf(x-)``.
    """
    x = ecdf.sorted_samples
    upper = np.arange(1, ecdf.n + 1) / ecdf.n
    lower = np.arange(0, ecdf.n) / ecdf.n
    at = np.asarray(cdf(x), dtype=float)
    left = np.asarray(cdf(np.nextafter(x, -np.inf)), dtype=float)
    d_plus = np.max(upper - at)
    d_minus = np.max(left - lower)
    return float(max(d_plus, d_minus, 0.0))


def two_sample_ks(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Two-sample KS statistic."""
    return float(scipy.stats.ks_2samp(np.asarray(a), np.asarray(b)).statistic)


def ks_critical(n: int, slack: Optional[float] = None) -> float:
    """Slackened asymptotic 95% one-sample KS critical value."""
    settings = get_settings().verification
    slack = settings.ks_slack if slack is None else slack
    return slack * settings.ks_coefficient / np.sqrt(n)


def two_sample_ks_critical(n_a: int, n_b: int, slack: Optional[float] = None) -> float:
    """Slackened asymptotic 95% two-sample KS critical value."""
    settings = get_settings().verification
    slack = settings.ks_slack if slack is None else slack
    return slack * settings.ks_coefficient * float(np.sqrt(1.0 / n_a + 1.0 / n_b))
