import math

import numpy as np
import pytest
from scipy.stats import kstest

from sphere_chords.analysis.caps import cap_sigma_survival
from sphere_chords.core.errors import DomainError, EfficiencyError
from sphere_chords.geometry.bodies import SphericalCap, TwoPlane
from sphere_chords.sampling.planes import sample_two_plane, sample_two_planes
from sphere_chords.sampling.points import (
    sample_point_in_body,
    sample_points_in_body,
    sample_points_in_cap,
)
from sphere_chords.sampling.rng import STREAM_BLOCK, RngStream, SampleBatch, run_sharded, shard_sizes
from sphere_chords.sampling.variables import (
    delta_samples,
    sample_delta,
    sample_sigma,
    sample_sigma_batch,
    sigma_samples,
)
from sphere_chords.stats.empirical import empirical_cdf, ks_critical, ks_statistic


class TestStreams:
    def test_same_seed_same_draws(self):
        a = RngStream(seed=5, stream_id=2).generator.random(4)
        b = RngStream(seed=5, stream_id=2).generator.random(4)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        a = RngStream(seed=5, stream_id=0).generator.random(4)
        b = RngStream(seed=5, stream_id=1).generator.random(4)
        assert not np.array_equal(a, b)

    def test_negative_seed(self):
        with pytest.raises(DomainError):
            RngStream(seed=-1)

    def test_shard_sizes(self):
        assert shard_sizes(10, 3) == [4, 3, 3]
        assert shard_sizes(2, 4) == [1, 1, 0, 0]
        with pytest.raises(DomainError):
            shard_sizes(5, 0)

    def test_batch_bookkeeping(self):
        batch = SampleBatch.merge(
            [SampleBatch(values=np.ones(3), n_attempted=4), SampleBatch(values=np.ones(1), n_attempted=4)]
        )
        assert batch.n_accepted == 4
        assert batch.acceptance_rate == 0.5
        assert batch.acceptance_se == pytest.approx(math.sqrt(0.25 / 8))
        with pytest.raises(DomainError):
            SampleBatch(values=np.ones(3), n_attempted=2)

    def test_sharded_runs_are_ordered(self):
        def _task(n, stream):
            return SampleBatch(values=np.full(n, float(stream.stream_id)), n_attempted=n)

        batch = run_sharded(_task, 5, seed=1, workers=2, stream_offset=10)
        np.testing.assert_array_equal(batch.values, [10, 10, 10, 11, 11])
        with pytest.raises(DomainError):
            run_sharded(_task, 5, seed=1, workers=5000)

    def test_stream_blocks_do_not_overlap(self):
        def _task(n, stream):
            return SampleBatch(values=stream.generator.random(n), n_attempted=n)

        first = run_sharded(_task, 4096, seed=3, workers=16, stream_offset=0)
        second = run_sharded(_task, 4096, seed=3, workers=4, stream_offset=STREAM_BLOCK)
        assert np.intersect1d(first.values, second.values).size == 0


class TestPlanes:
    def test_orthonormal(self, stream):
        U, V = sample_two_planes(5, 1000, stream)
        np.testing.assert_allclose(np.einsum("ij,ij->i", U, U), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.einsum("ij,ij->i", V, V), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.einsum("ij,ij->i", U, V), 0.0, atol=1e-12)

    def test_single_plane(self, stream):
        assert isinstance(sample_two_plane(3, stream), TwoPlane)

    @pytest.mark.slow
    def test_projection_is_uniform_in_four_dimensions(self, stream):
        # |P_L e|^2 ~ Beta(1, 1) for a Haar 2-plane of R^4
        U, V = sample_two_planes(4, 20000, stream)
        p2 = U[:, 0] ** 2 + V[:, 0] ** 2
        assert kstest(p2, "uniform").statistic < ks_critical(p2.size)

    def test_bad_arguments(self, stream):
        with pytest.raises(DomainError):
            sample_two_planes(2, 10, stream)
        with pytest.raises(DomainError):
            sample_two_planes(3, -1, stream)


class TestPoints:
    def test_points_lie_in_cap(self, cap3, stream):
        points = sample_points_in_cap(cap3, 5000, stream)
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0, atol=1e-12)
        assert np.all(cap3.contains(points))

    def test_polar_angle_law(self, cap4, stream):
        points = sample_points_in_cap(cap4, 20000, stream)
        theta = np.arccos(np.clip(points @ cap4.center, -1.0, 1.0))
        total = 0.4 - math.sin(1.6) / 4

        def cdf(x):
            x = np.clip(x, 0.0, 0.8)
            return (x / 2 - np.sin(2 * x) / 4) / total

        assert ks_statistic(empirical_cdf(theta), cdf) < ks_critical(theta.size)

    def test_azimuth_is_symmetric(self, cap3, stream):
        points = sample_points_in_cap(cap3, 40000, stream)
        quadrant = np.mean((points[:, 0] > 0) & (points[:, 1] > 0))
        assert quadrant == pytest.approx(0.25, abs=0.01)

    def test_body_points(self, octant, stream):
        batch = sample_points_in_body(octant, 3000, stream)
        assert batch.values.shape == (3000, 3)
        assert batch.n_attempted >= 3000
        assert np.all(octant.contains(batch.values))
        # octant / bounding cap = (pi/2) / (2 pi (1 - 1/sqrt 3))
        assert batch.acceptance_rate == pytest.approx(0.25 / (1 - 1 / math.sqrt(3)), abs=0.03)

    def test_single_point(self, octant, stream):
        point = sample_point_in_body(octant, 3, stream)
        assert point.shape == (3,)
        with pytest.raises(DomainError):
            sample_point_in_body(octant, 4, stream)

    def test_empty_request(self, octant, stream):
        assert sample_points_in_body(octant, 0, stream).values.shape == (0, 3)

    def test_deterministic(self, octant):
        a = sample_points_in_body(octant, 500, RngStream(seed=9)).values
        b = sample_points_in_body(octant, 500, RngStream(seed=9)).values
        np.testing.assert_array_equal(a, b)

    def test_sliver_is_too_inefficient(self, sliver, stream):
        with pytest.raises(EfficiencyError) as info:
            sample_points_in_body(sliver, 10, stream)
        assert info.value.rate < 1e-4


class TestChordVariables:
    def test_hit_rate_matches_crofton(self, cap3, stream):
        batch = sample_sigma_batch(cap3, 20000, stream)
        assert batch.n_accepted == 20000
        assert batch.acceptance_rate == pytest.approx(math.sqrt(3) / 2, abs=0.01)

    def test_survival_at_a_third_of_pi(self, cap3):
        values = sigma_samples(cap3, 40000, seed=3).values
        assert np.mean(values > math.pi / 3) == pytest.approx(2 * math.sqrt(2) / 3, abs=0.01)

    def test_sigma_distribution(self, cap4):
        values = sigma_samples(cap4, 20000, seed=4, workers=2).values
        F = lambda s: 1.0 - np.asarray(cap_sigma_survival(cap4, 4, s))  # noqa: E731
        assert ks_statistic(empirical_cdf(values), F) < ks_critical(values.size)

    def test_single_chord(self, cap3, stream):
        assert 0.0 <= sample_sigma(cap3, 3, stream) <= 2 * math.pi / 3

    def test_tiny_cap_is_too_inefficient(self, stream):
        with pytest.raises(EfficiencyError):
            sample_sigma_batch(SphericalCap.centered(3, 1e-8), 10, stream)


class TestDistanceVariables:
    def test_distances_within_diameter(self, cap4):
        values = delta_samples(cap4, 5000, seed=2).values
        assert values.shape == (5000,)
        assert np.all((values >= 0.0) & (values <= 1.6 + 1e-12))

    def test_single_distance(self, octant, stream):
        assert 0.0 <= sample_delta(octant, 3, stream) <= math.pi / 2 + 1e-12

    def test_workers_change_streams_not_law(self, octant):
        one = delta_samples(octant, 4000, seed=11, workers=1).values
        two = delta_samples(octant, 4000, seed=11, workers=2).values
        again = delta_samples(octant, 4000, seed=11, workers=2).values
        np.testing.assert_array_equal(two, again)
        assert abs(np.mean(one) - np.mean(two)) < 0.03
