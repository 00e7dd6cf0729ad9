"""Spherical caps, polyhedral spherical convex bodies, 2-planes and their measures."""

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Optional, Union

import numpy as np
import numpy.typing as npt
from scipy.optimize import nnls

from ..analysis.antiderivatives import sin_power_antiderivative
from ..core.config import get_settings
from ..core.errors import DomainError, UnsupportedBodyError
from ..core.logging import get_logger
from .constants import sphere_surface_area


logger = get_logger(__name__)

UnitVector = npt.NDArray[np.float64]

UNIT_TOLERANCE = 1e-12
MEMBERSHIP_SLACK = 1e-12


def unit_vector(coords: npt.ArrayLike) -> UnitVector:
    """Normalize ``coords`` to a unit vector."""
    x = np.asarray(coords, dtype=float).ravel()
    norm = float(np.linalg.norm(x))
    if x.size == 0 or not np.isfinite(norm) or norm == 0.0:
        raise DomainError(f"Cannot normalize {coords!r}")
    return x / norm


def _check_unit(x: npt.ArrayLike, tol: float = 1e-9) -> UnitVector:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or abs(float(np.linalg.norm(v)) - 1.0) > tol:
        raise DomainError("Expected a unit vector")
    return v


def spherical_distance(x: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """Geodesic distance in [0, pi] between two unit vectors."""
    u, v = _check_unit(x), _check_unit(y)
    if u.shape != v.shape:
        raise DomainError(f"Dimension mismatch: {u.shape} vs {v.shape}")
    return float(np.arccos(np.clip(u @ v, -1.0, 1.0)))


def spherical_distances(X: npt.ArrayLike, Y: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Row-wise geodesic distances between two arrays of unit vectors."""
    dots = np.einsum("ij,ij->i", np.asarray(X, dtype=float), np.asarray(Y, dtype=float))
    return np.arccos(np.clip(dots, -1.0, 1.0))


def _check_rotation(R: npt.ArrayLike, d: int) -> npt.NDArray[np.float64]:
    M = np.asarray(R, dtype=float)
    if M.shape != (d, d) or not np.allclose(M @ M.T, np.eye(d), atol=1e-10):
        raise DomainError("Expected an orthogonal matrix of matching dimension")
    return M


@dataclass(frozen=True, eq=False)
class SphericalCap:
    """All points of S^{d-1} within spherical distance ``radius`` of ``center``."""
    center: UnitVector
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", unit_vector(self.center))
        if self.center.size < 3:
            raise DomainError(f"Caps need d >= 3, got d={self.center.size}")
        if not 0.0 < self.radius < math.pi / 2:
            raise DomainError(f"Cap radius must lie in (0, pi/2), got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def centered(cls, d: int, radius: float) -> "SphericalCap":
        """Cap around the last coordinate axis."""
        center = np.zeros(d)
        center[-1] = 1.0
        return cls(center=center, radius=radius)

    @property
    def dim(self) -> int:
        return int(self.center.size)

    def rotated(self, R: npt.ArrayLike) -> "SphericalCap":
        return SphericalCap(center=_check_rotation(R, self.dim) @ self.center, radius=self.radius)

    def contains(self, points: npt.ArrayLike) -> npt.NDArray[np.bool_]:
        return np.asarray(points, dtype=float) @ self.center >= math.cos(self.radius) - MEMBERSHIP_SLACK

    def bounding_cap(self) -> "SphericalCap":
        return self

    def describe(self) -> dict[str, Any]:
        return {"kind": "cap", "d": self.dim, "radius": self.radius, "center": self.center.tolist()}


@dataclass(frozen=True, eq=False)
class ConvexSphericalBody:
    """
    S^{d-1} intersected with the cone {x : <n_i, x> >= 0 for all i}.

    The normals must span R^d, so the cone is line-free, and
    ``interior_point`` must satisfy every constraint strictly.
    """
    normals: npt.NDArray[np.float64]
    interior_point: UnitVector
    _cache: dict[str, Any] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        normals = np.atleast_2d(np.asarray(self.normals, dtype=float))
        norms = np.linalg.norm(normals, axis=1)
        if np.any(norms == 0) or not np.all(np.isfinite(norms)):
            raise DomainError("Normals must be finite and non-zero")
        normals = normals / norms[:, None]
        interior = unit_vector(self.interior_point)
        d = normals.shape[1]
        if d < 3:
            raise DomainError(f"Bodies need d >= 3, got d={d}")
        if interior.size != d:
            raise DomainError("Interior point and normals differ in dimension")
        slack = normals @ interior
        if np.any(slack <= 0):
            first = int(np.argmax(slack <= 0))
            raise DomainError(f"Interior point violates constraint {first} (<n, x> = {slack[first]:.3e})")
        if np.linalg.matrix_rank(normals) < d:
            raise UnsupportedBodyError("Normals do not span R^d; the cone contains a line")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "interior_point", interior)

    @classmethod
    def orthant(cls, d: int) -> "ConvexSphericalBody":
        """The positive orthant {x_i >= 0}; the octant of S^2 when d = 3."""
        return cls(normals=np.eye(d), interior_point=np.ones(d) / math.sqrt(d))

    @property
    def dim(self) -> int:
        return int(self.normals.shape[1])

    def rotated(self, R: npt.ArrayLike) -> "ConvexSphericalBody":
        M = _check_rotation(R, self.dim)
        return ConvexSphericalBody(normals=self.normals @ M.T, interior_point=M @ self.interior_point)

    def contains(self, points: npt.ArrayLike) -> npt.NDArray[np.bool_]:
        P = np.asarray(points, dtype=float)
        return np.all(P @ self.normals.T >= -MEMBERSHIP_SLACK, axis=-1)

    def rays(self) -> Optional[npt.NDArray[np.float64]]:
        """
        Unit extreme rays of the cone, or None when enumeration is too large.

        Each ray is the common null direction of d-1 independent normals that
        satisfies all remaining constraints.
        """
        if "rays" in self._cache:
            return self._cache["rays"]
        m, d = self.normals.shape
        limit = get_settings().sampler.max_vertex_combinations
        if math.comb(m, d - 1) > limit:
            logger.info("skipping vertex enumeration", constraints=m, d=d, limit=limit)
            self._cache["rays"] = None
            return None

        found: list[npt.NDArray[np.float64]] = []
        for idx in itertools.combinations(range(m), d - 1):
            _, singular, vt = np.linalg.svd(self.normals[list(idx)])
            if singular[-1] < 1e-10:
                continue
            direction = vt[-1]
            for candidate in (direction, -direction):
                if np.all(self.normals @ candidate >= -1e-10):
                    if not any(np.allclose(candidate, r, atol=1e-9) for r in found):
                        found.append(candidate)
        rays = np.array(found) if found else np.empty((0, d))
        self._cache["rays"] = rays
        return rays

    def bounding_cap(self) -> SphericalCap:
        """
        Cap around the interior point that contains the body.

        For a pointed cone with all rays in the open hemisphere around c,
        <c, x>/|x| over the cone is minimized at a ray, so the farthest ray
        gives the exact radius. Without rays the hemisphere is used when c lies
        in the dual cone.

        Raises:
            UnsupportedBodyError: If the body leaves the open hemisphere around
                the interior point.
        """
        if "bounding_cap" in self._cache:
            return self._cache["bounding_cap"]
        c = self.interior_point
        margin = get_settings().sampler.bounding_margin
        cap_limit = math.nextafter(math.pi / 2, 0.0)
        rays = self.rays()
        if rays is not None:
            if rays.shape[0] == 0:
                raise UnsupportedBodyError("Cone has no extreme rays")
            cosines = rays @ c
            if np.min(cosines) <= 1e-12:
                raise UnsupportedBodyError(
                    "Body is not contained in the open hemisphere around its interior point"
                )
            radius = min(float(np.max(np.arccos(np.clip(cosines, -1.0, 1.0)))) + margin, cap_limit)
        else:
            _, residual = nnls(self.normals.T, c)
            if residual > 1e-9:
                raise UnsupportedBodyError(
                    "Interior point is not in the dual cone; no hemispherical bounding cap"
                )
            radius = min(math.pi / 2 - margin, cap_limit)
        cap = SphericalCap(center=c, radius=radius)
        self._cache["bounding_cap"] = cap
        logger.debug("bounding cap", radius=radius, rays=None if rays is None else len(rays))
        return cap

    def exact_measures(self) -> Optional[tuple[float, float]]:
        """(|K|, |dK|) in closed form when the normals are an orthonormal basis."""
        m, d = self.normals.shape
        if m != d or not np.allclose(self.normals @ self.normals.T, np.eye(d), atol=1e-12):
            return None
        volume = sphere_surface_area(d) / 2**d
        boundary = d * sphere_surface_area(d - 1) / 2 ** (d - 1)
        return volume, boundary

    def describe(self) -> dict[str, Any]:
        return {
            "kind": "halfspaces",
            "d": self.dim,
            "normals": self.normals.tolist(),
            "interior": self.interior_point.tolist(),
        }


SphericalBody = Union[SphericalCap, ConvexSphericalBody]


@dataclass(frozen=True, eq=False)
class TwoPlane:
    """A 2-dimensional linear subspace carried as an orthonormal pair."""
    u: UnitVector
    v: UnitVector

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.ndim != 1 or u.shape != v.shape:
            raise DomainError("Plane basis vectors must be one-dimensional and of equal size")
        if (
            abs(float(u @ u) - 1.0) > UNIT_TOLERANCE
            or abs(float(v @ v) - 1.0) > UNIT_TOLERANCE
            or abs(float(u @ v)) > UNIT_TOLERANCE
        ):
            raise DomainError("Degenerate plane: basis is not orthonormal")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def dim(self) -> int:
        return int(self.u.size)

    def point(self, phi: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Points u cos(phi) + v sin(phi) of the great circle."""
        angles = np.asarray(phi, dtype=float)
        return np.multiply.outer(np.cos(angles), self.u) + np.multiply.outer(np.sin(angles), self.v)


def _check_body_dim(body: SphericalBody, d: int) -> None:
    if body.dim != d:
        raise DomainError(f"Body lives in R^{body.dim}, got d={d}")


def body_membership(body: SphericalBody, x: npt.ArrayLike) -> bool:
    """True iff the point lies in the closed body."""
    return bool(body.contains(np.asarray(x, dtype=float)))


def cap_volume(cap: SphericalCap, d: int) -> float:
    """|K| = omega_{d-1} int_0^r sin^{d-2}."""
    _check_body_dim(cap, d)
    return sphere_surface_area(d - 1) * float(sin_power_antiderivative(d - 2, cap.radius))


def cap_boundary_area(cap: SphericalCap, d: int) -> float:
    """|dK| = omega_{d-1} sin^{d-2} r."""
    _check_body_dim(cap, d)
    return sphere_surface_area(d - 1) * math.sin(cap.radius) ** (d - 2)
