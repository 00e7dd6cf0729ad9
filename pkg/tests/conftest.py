"""Shared fixtures."""

import math

import numpy as np
import pytest

from sphere_chords.core.logging import configure_logging
from sphere_chords.geometry.bodies import ConvexSphericalBody, SphericalCap
from sphere_chords.sampling.rng import RngStream


@pytest.fixture(autouse=True)
def _bind_logging_to_current_stderr():
    """Rebind structlog's stderr sink to this test's captured stream."""
    configure_logging()


@pytest.fixture
def cap3() -> SphericalCap:
    """Cap of radius pi/3 in S^2; |K| = pi."""
    return SphericalCap.centered(3, math.pi / 3)


@pytest.fixture
def cap4() -> SphericalCap:
    return SphericalCap.centered(4, 0.8)


@pytest.fixture
def octant() -> ConvexSphericalBody:
    return ConvexSphericalBody.orthant(3)


@pytest.fixture
def sliver() -> ConvexSphericalBody:
    """Thin spherical triangle spanned by e1, e2 and (1, 1, 1e-5); tiny area, wide bounding cap."""
    eps = 1e-5
    return ConvexSphericalBody(
        normals=np.array([[0.0, 0.0, 1.0], [0.0, eps, -1.0], [eps, 0.0, -1.0]]),
        interior_point=np.array([2.0, 2.0, eps]),
    )


@pytest.fixture
def stream() -> RngStream:
    return RngStream(seed=20240611)


@pytest.fixture
def body_file(tmp_path):
    """Write a halfspace body file and return its path."""

    def _write(normals, interior, name="body.txt"):
        lines = [" ".join(repr(float(x)) for x in n) for n in normals]
        lines.append("interior: " + " ".join(repr(float(x)) for x in interior))
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    return _write
