import math

import numpy as np
import pytest

from sphere_chords.core.errors import DomainError, UnsupportedBodyError
from sphere_chords.geometry.bodies import (
    ConvexSphericalBody,
    SphericalCap,
    TwoPlane,
    body_membership,
    cap_boundary_area,
    cap_volume,
    spherical_distance,
    spherical_distances,
    unit_vector,
)


class TestDistances:
    def test_orthogonal(self):
        assert spherical_distance([1, 0, 0], [0, 1, 0]) == pytest.approx(math.pi / 2)

    def test_antipodal(self):
        assert spherical_distance([0, 0, 1], [0, 0, -1]) == pytest.approx(math.pi)

    def test_rounding_is_clipped(self):
        x = unit_vector([1.0, 1e-9, 0.0])
        assert spherical_distance(x, x) == pytest.approx(0.0, abs=1e-7)

    def test_rows(self):
        X = np.eye(3)
        Y = np.array([[0.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]])
        np.testing.assert_allclose(spherical_distances(X, Y), [math.pi / 2, 0.0, math.pi])

    def test_rejects_non_unit_and_mismatch(self):
        with pytest.raises(DomainError):
            spherical_distance([2.0, 0.0, 0.0], [1.0, 0.0, 0.0])
        with pytest.raises(DomainError):
            spherical_distance([1.0, 0.0, 0.0], [1.0, 0.0])

    def test_zero_vector_cannot_be_normalized(self):
        with pytest.raises(DomainError):
            unit_vector([0.0, 0.0, 0.0])


class TestSphericalCap:
    @pytest.mark.parametrize("radius", [0.0, -0.1, math.pi / 2, 2.0])
    def test_radius_range(self, radius):
        with pytest.raises(DomainError):
            SphericalCap.centered(3, radius)

    def test_needs_three_dimensions(self):
        with pytest.raises(DomainError):
            SphericalCap.centered(2, 0.5)

    def test_center_is_normalized(self):
        cap = SphericalCap(center=[0.0, 0.0, 2.0], radius=0.5)
        np.testing.assert_allclose(cap.center, [0.0, 0.0, 1.0])

    def test_volume_and_boundary_in_s2(self, cap3):
        assert cap_volume(cap3, 3) == pytest.approx(math.pi)
        assert cap_boundary_area(cap3, 3) == pytest.approx(math.pi * math.sqrt(3))

    def test_volume_and_boundary_in_s3(self, cap4):
        assert cap_volume(cap4, 4) == pytest.approx(4 * math.pi * (0.4 - math.sin(1.6) / 4))
        assert cap_boundary_area(cap4, 4) == pytest.approx(4 * math.pi * math.sin(0.8) ** 2)

    def test_dimension_must_match(self, cap3):
        with pytest.raises(DomainError):
            cap_volume(cap3, 4)

    def test_membership(self, cap3):
        assert body_membership(cap3, [0.0, 0.0, 1.0])
        inside = [math.sin(1.0), 0.0, math.cos(1.0)]
        outside = [math.sin(1.1), 0.0, math.cos(1.1)]
        assert body_membership(cap3, inside)
        assert not body_membership(cap3, outside)
        edge = [math.sin(math.pi / 3), 0.0, math.cos(math.pi / 3)]
        assert body_membership(cap3, edge)

    def test_rotation_moves_center(self, cap3):
        R = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
        np.testing.assert_allclose(cap3.rotated(R).center, [0.0, -1.0, 0.0], atol=1e-15)
        with pytest.raises(DomainError):
            cap3.rotated(2.0 * R)


class TestConvexSphericalBody:
    def test_octant_rays_and_bounding_cap(self, octant):
        rays = octant.rays()
        assert rays.shape == (3, 3)
        assert np.all(rays >= -1e-12)
        np.testing.assert_allclose(rays @ rays.T, np.eye(3), atol=1e-12)
        cap = octant.bounding_cap()
        assert cap.radius == pytest.approx(math.acos(1 / math.sqrt(3)), abs=1e-8)
        assert np.all(cap.contains(np.eye(3)))

    def test_octant_exact_measures(self, octant):
        volume, boundary = octant.exact_measures()
        assert volume == pytest.approx(math.pi / 2)
        assert boundary == pytest.approx(3 * math.pi / 2)

    def test_orthant_in_s3(self):
        volume, boundary = ConvexSphericalBody.orthant(4).exact_measures()
        assert volume == pytest.approx(2 * math.pi**2 / 16)
        assert boundary == pytest.approx(4 * 4 * math.pi / 8)

    def test_general_body_has_no_closed_form(self, sliver):
        assert sliver.exact_measures() is None

    def test_membership(self, octant):
        assert body_membership(octant, unit_vector([1, 2, 3]))
        assert body_membership(octant, [1.0, 0.0, 0.0])
        assert not body_membership(octant, unit_vector([1, -1, 1]))

    def test_interior_must_be_strict(self):
        with pytest.raises(DomainError):
            ConvexSphericalBody(normals=np.eye(3), interior_point=[1.0, 1.0, 0.0])

    def test_rank_deficient_normals(self):
        with pytest.raises(UnsupportedBodyError):
            ConvexSphericalBody(normals=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], interior_point=[1, 1, 1])

    def test_body_outside_hemisphere(self):
        # The cone holds e3 and rays close to -e3.
        body = ConvexSphericalBody(
            normals=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.05]],
            interior_point=[1.0, 1.0, 0.0],
        )
        with pytest.raises(UnsupportedBodyError):
            body.bounding_cap()

    def test_zero_normal(self):
        with pytest.raises(DomainError):
            ConvexSphericalBody(normals=[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], interior_point=[1, 0, 0])


class TestTwoPlane:
    def test_points_on_circle(self):
        plane = TwoPlane(u=[1.0, 0.0, 0.0], v=[0.0, 1.0, 0.0])
        np.testing.assert_allclose(plane.point(math.pi / 2), [0.0, 1.0, 0.0], atol=1e-15)
        assert plane.point(np.linspace(0, 1, 5)).shape == (5, 3)

    @pytest.mark.parametrize(
        "u, v",
        [
            ([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]),
            ([1.0, 0.0, 0.0], [0.0, 2.0, 0.0]),
            ([1.0, 0.0, 0.0], [0.0, 1.0]),
        ],
    )
    def test_degenerate_bases(self, u, v):
        with pytest.raises(DomainError):
            TwoPlane(u=u, v=v)
