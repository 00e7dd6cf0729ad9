"""Haar-distributed random 2-planes of R^d."""

import numpy as np
import numpy.typing as npt

from ..core.config import get_settings
from ..core.errors import DomainError
from ..geometry.bodies import TwoPlane
from .rng import RngStream, as_generator


def _orthonormalize(
    g1: npt.NDArray[np.float64], g2: npt.NDArray[np.float64]
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], npt.NDArray[np.bool_]]:
    n1 = np.linalg.norm(g1, axis=1)
    u = g1 / np.where(n1 > 0, n1, 1.0)[:, None]
    w = g2 - np.einsum("ij,ij->i", g2, u)[:, None] * u
    # second pass keeps <u, v> at rounding level
    w = w - np.einsum("ij,ij->i", w, u)[:, None] * u
    n2 = np.linalg.norm(w, axis=1)
    v = w / np.where(n2 > 0, n2, 1.0)[:, None]
    eps = get_settings().sampler.degenerate_norm
    return u, v, (n1 < eps) | (n2 < eps)


def sample_two_planes(
    d: int, n: int, rng: "RngStream | np.random.Generator"
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Draw ``n`` Haar-uniform 2-planes as orthonormal bases (U, V) of shape (n, d).

    Two standard Gaussian vectors are orthonormalized; pairs that are
    numerically dependent are redrawn.
    """
    if d < 3:
        raise DomainError(f"2-plane sampling needs d >= 3, got {d}")
    if n < 0:
        raise DomainError(f"Sample count must be non-negative, got {n}")
    gen = as_generator(rng)
    U, V, bad = _orthonormalize(gen.standard_normal((n, d)), gen.standard_normal((n, d)))
    while np.any(bad):
        k = int(np.count_nonzero(bad))
        u, v, again = _orthonormalize(gen.standard_normal((k, d)), gen.standard_normal((k, d)))
        U[bad], V[bad] = u, v
        idx = np.flatnonzero(bad)
        bad = np.zeros(n, dtype=bool)
        bad[idx[again]] = True
    return U, V


def sample_two_plane(d: int, rng: "RngStream | np.random.Generator") -> TwoPlane:
    """Draw one Haar-uniform 2-plane."""
    U, V = sample_two_planes(d, 1, rng)
    return TwoPlane(u=U[0], v=V[0])
