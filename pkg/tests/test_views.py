import math

import numpy as np
import pytest

from v2gen.views import (
    ConfigError,
    SphericalDirection,
    V2Config,
    build_view_frame,
    enumerate_continuum,
    grid_ray_origins,
    sample_view_centers,
)


class TestV2Config:
    def test_identities(self):
        cfg = V2Config(m=2, n=8, x=50, y=50)
        assert cfg.nv == 16
        assert cfg.pv == 2500
        assert cfg.c == 40000
        assert abs(cfg.d - 1 / 50) <= 1e-12

    def test_string_round_trip(self):
        for text in ["1x4x50x50", "2x8x50x50", "100x400x1x1", "1x4x50x50c3"]:
            assert V2Config.from_string(text).to_string() == text

    def test_default_channel_count(self):
        assert V2Config.from_string("1x4x50x50").nc == 1

    @pytest.mark.parametrize("bad", ["", "1x4x50", "0x4x50x50", "1x4x50x50c0", "ax4x5x5"])
    def test_bad_strings(self, bad):
        with pytest.raises(ConfigError):
            V2Config.from_string(bad)

    def test_d_must_match_width(self):
        with pytest.raises(ConfigError):
            V2Config(m=1, n=4, x=50, y=50, d=0.5)


class TestSampleViewCenters:
    def test_equatorial_row(self):
        centers = sample_view_centers(1, 4)
        points = np.array([p for _, p in centers])
        expected = np.array([[0.5, 0, 0], [0, 0.5, 0], [-0.5, 0, 0], [0, -0.5, 0]])
        np.testing.assert_allclose(points, expected, atol=1e-12)
        assert all(abs(d.phi - math.pi / 2) < 1e-12 for d, _ in centers)

    def test_two_latitude_rows(self):
        centers = sample_view_centers(2, 1)
        phis = [d.phi for d, _ in centers]
        np.testing.assert_allclose(phis, [math.acos(0.5), math.acos(-0.5)], atol=1e-12)

    def test_equal_area_bands(self):
        # cos(arccos(1-2u)) = 1-2u, so z is linear in the row midpoint
        centers = sample_view_centers(4, 1)
        zs = [p[2] for _, p in centers]
        np.testing.assert_allclose(zs, [0.375, 0.125, -0.125, -0.375], atol=1e-12)

    def test_row_major_order_and_count(self):
        centers = sample_view_centers(3, 5)
        assert len(centers) == 15
        # latitude is the outer index: phi constant within each run of 5
        phis = np.array([d.phi for d, _ in centers]).reshape(3, 5)
        assert np.ptp(phis, axis=1).max() < 1e-12

    def test_points_on_sphere(self):
        points = np.array([p for _, p in sample_view_centers(7, 9)])
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 0.5, atol=1e-9)

    def test_z_distribution_uniform(self):
        from scipy import stats

        points = np.array([p for _, p in sample_view_centers(100, 100)])
        ks = stats.kstest(points[:, 2], stats.uniform(loc=-0.5, scale=1.0).cdf)
        assert ks.statistic < 0.02

    def test_bad_counts(self):
        with pytest.raises(ValueError):
            sample_view_centers(0, 4)


class TestBuildViewFrame:
    def test_hand_evaluated_equatorial_frame(self):
        frame = build_view_frame(np.array([0.5, 0.0, 0.0]))
        np.testing.assert_allclose(frame.normal, [-1, 0, 0], atol=1e-12)
        np.testing.assert_allclose(frame.right, [0, -1, 0], atol=1e-12)
        np.testing.assert_allclose(frame.up, [0, 0, 1], atol=1e-12)

    def test_polar_fallback(self):
        for z in (0.5, -0.5):
            frame = build_view_frame(np.array([0.0, 0.0, z]))
            _assert_orthonormal(frame)

    def test_orthonormal_everywhere(self):
        for _, point in sample_view_centers(6, 7):
            _assert_orthonormal(build_view_frame(point))

    def test_zero_center_errors(self):
        with pytest.raises(ValueError):
            build_view_frame(np.zeros(3))


def _assert_orthonormal(frame):
    for v in (frame.right, frame.up, frame.normal):
        assert abs(np.linalg.norm(v) - 1.0) < 1e-9
    assert abs(np.dot(frame.right, frame.up)) < 1e-9
    assert abs(np.dot(frame.right, frame.normal)) < 1e-9
    assert abs(np.dot(frame.up, frame.normal)) < 1e-9
    np.testing.assert_allclose(np.cross(frame.right, frame.up), frame.normal, atol=1e-9)


class TestGridRayOrigins:
    def test_single_pixel_is_view_center(self):
        frame = build_view_frame(np.array([0.5, 0.0, 0.0]))
        origins = grid_ray_origins(frame, 1, 1, 1.0)
        np.testing.assert_allclose(origins[0, 0], frame.center, atol=1e-12)

    def test_center_cell_of_odd_grid(self):
        frame = build_view_frame(np.array([0.0, 0.5, 0.0]))
        origins = grid_ray_origins(frame, 3, 3, 1 / 3)
        assert origins.shape == (3, 3, 3)
        np.testing.assert_allclose(origins[1, 1], frame.center, atol=1e-12)

    def test_grid_spans_sphere_diameter(self):
        frame = build_view_frame(np.array([0.5, 0.0, 0.0]))
        origins = grid_ray_origins(frame, 100, 100, 1 / 100)
        span = np.linalg.norm(origins[0, -1] - origins[0, 0])
        np.testing.assert_allclose(span, 0.99, atol=1e-12)

    def test_origins_in_tangent_plane(self):
        for _, point in sample_view_centers(3, 4):
            frame = build_view_frame(point)
            origins = grid_ray_origins(frame, 5, 7, 0.2)
            offsets = origins.reshape(-1, 3) - frame.center
            assert np.abs(offsets @ frame.normal).max() < 1e-9


class TestEnumerateContinuum:
    def test_chain_from_100(self):
        chain = enumerate_continuum(V2Config(m=1, n=4, x=100, y=100))
        strings = [c.to_string() for c in chain]
        assert len(strings) == 9
        assert strings[0] == "1x4x100x100"
        assert "2x8x50x50" in strings
        assert strings[-1] == "100x400x1x1"
        assert all(c.c == 40000 for c in chain)

    def test_chain_from_75(self):
        chain = enumerate_continuum(V2Config(m=1, n=4, x=75, y=75))
        assert [c.m for c in chain] == [1, 3, 5, 15, 25, 75]
        assert chain[1].to_string() == "3x12x25x25"
        assert chain[1].nv == 36
        assert all(c.c == 22500 for c in chain)

    def test_budget_preserved_and_ordered(self):
        base = V2Config(m=2, n=3, x=60, y=60, nc=3)
        chain = enumerate_continuum(base)
        nvs = [c.nv for c in chain]
        pvs = [c.pv for c in chain]
        assert nvs == sorted(nvs) and len(set(nvs)) == len(nvs)
        assert pvs == sorted(pvs, reverse=True)
        assert all(c.m * c.n * c.x * c.y * c.nc == base.c for c in chain)

    def test_non_square_rejected(self):
        with pytest.raises(ConfigError):
            enumerate_continuum(V2Config(m=1, n=4, x=100, y=50))


def test_view_rays_matches_per_view_operations():
    from v2gen.views import view_rays

    cfg = V2Config(m=3, n=5, x=4, y=6)
    origins, normals = view_rays(cfg)
    assert origins.shape == (15, 6, 4, 3)
    centers = sample_view_centers(cfg.m, cfg.n)
    for v, (_, point) in enumerate(centers):
        frame = build_view_frame(point)
        np.testing.assert_allclose(normals[v], frame.normal, atol=1e-12)
        np.testing.assert_allclose(
            origins[v], grid_ray_origins(frame, cfg.x, cfg.y, cfg.d), atol=1e-12
        )


def test_spherical_direction_ranges():
    with pytest.raises(ValueError):
        SphericalDirection(theta=-0.1, phi=1.0)
    with pytest.raises(ValueError):
        SphericalDirection(theta=0.0, phi=0.0)
