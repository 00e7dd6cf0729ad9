"""Exact chords cut from spherical bodies by great circles."""

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..core.errors import DomainError, UnsupportedBodyError
from .bodies import ConvexSphericalBody, SphericalBody, SphericalCap, TwoPlane

HIT_SLACK = 1e-12


@dataclass(frozen=True)
class ChordArc:
    """Spherical length of K cap L; zero when the circle misses K."""
    length: float
    hit: bool


def _cap_chords(
    cap: SphericalCap, U: npt.NDArray[np.float64], V: npt.NDArray[np.float64]
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.bool_]]:
    # p = |projection of the center onto the plane|; the section is a circle of
    # angular half-width arccos(cos r / p) around the projected center.
    p = np.hypot(U @ cap.center, V @ cap.center)
    cos_r = math.cos(cap.radius)
    hit = p >= cos_r
    ratio = np.divide(cos_r, p, out=np.ones_like(p), where=hit)
    lengths = np.where(hit, 2.0 * np.arccos(np.clip(ratio, -1.0, 1.0)), 0.0)
    return lengths, hit


def _halfspace_chords(
    body: ConvexSphericalBody, U: npt.NDArray[np.float64], V: npt.NDArray[np.float64]
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.bool_]]:
    # On x(phi) = u cos(phi) + v sin(phi) each constraint reads R cos(phi - psi) >= 0,
    # the closed half circle |phi - psi| <= pi/2, or the whole circle when R = 0.
    a = U @ body.normals.T
    b = V @ body.normals.T
    active = np.hypot(a, b) > HIT_SLACK
    if not np.all(np.any(active, axis=1)):
        raise UnsupportedBodyError("A great circle lies inside the cone; the body is not line-free")
    psi = np.arctan2(b, a)

    # Offsets relative to the first active constraint, wrapped to (-pi, pi].
    # Inside that constraint's half circle the intersection of all half circles
    # is [max(offset) - pi/2, min(offset) + pi/2], a single arc or empty.
    rows = np.arange(psi.shape[0])
    reference = psi[rows, np.argmax(active, axis=1)]
    offsets = np.angle(np.exp(1j * (psi - reference[:, None])))
    spread = np.max(np.where(active, offsets, -np.inf), axis=1) - np.min(
        np.where(active, offsets, np.inf), axis=1
    )
    lengths = math.pi - spread
    hit = lengths >= -HIT_SLACK
    return np.where(hit, np.maximum(lengths, 0.0), 0.0), hit


def chord_arcs(
    body: SphericalBody, U: npt.ArrayLike, V: npt.ArrayLike
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.bool_]]:
    """
    Chord lengths and hit flags for a batch of planes.

    Args:
        body: Cap or halfspace body in R^d.
        U: (n, d) first basis vectors.
        V: (n, d) second basis vectors, orthonormal to U row-wise.

    Returns:
        Tuple of (lengths, hits), each of shape (n,).
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    V = np.atleast_2d(np.asarray(V, dtype=float))
    if U.shape != V.shape or U.shape[1] != body.dim:
        raise DomainError(f"Plane bases of shape {U.shape}/{V.shape} do not match d={body.dim}")
    if isinstance(body, SphericalCap):
        return _cap_chords(body, U, V)
    return _halfspace_chords(body, U, V)


def chord_arc(body: SphericalBody, plane: TwoPlane) -> ChordArc:
    """Spherical length of the intersection of ``body`` with the great circle of ``plane``."""
    lengths, hits = chord_arcs(body, plane.u[None, :], plane.v[None, :])
    return ChordArc(length=float(lengths[0]), hit=bool(hits[0]))
