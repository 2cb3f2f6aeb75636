import numpy as np
import pytest

from graspkit import (
    CameraIntrinsics,
    RigidPose,
    ZBand,
    backproject_pixel,
    camera_to_world,
    project_point,
    project_polygon_region,
    world_to_camera,
)
from graspkit.errors import InvalidPolygon, InvalidPose, NonPositiveDepth

from tests.oracles import point_in_convex, random_rotation

K = CameraIntrinsics(fx=500.0, fy=500.0, cx=320.0, cy=240.0)


class TestBackprojection:
    def test_principal_point(self):
        assert backproject_pixel(K.cx, K.cy, 1.0, K).tolist() == [0.0, 0.0, 1.0]

    def test_unit_tangent_column(self):
        assert backproject_pixel(K.cx + K.fx, K.cy, 2.0, K).tolist() == [2.0, 0.0, 2.0]

    def test_worked_example(self):
        p = backproject_pixel(820.0, 240.0, 1.0, K)
        assert p.tolist() == [1.0, 0.0, 1.0]

    def test_non_positive_depth(self):
        with pytest.raises(NonPositiveDepth):
            backproject_pixel(0, 0, 0.0, K)
        with pytest.raises(NonPositiveDepth):
            backproject_pixel(0, 0, -1.0, K)

    def test_forward_backward_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(2000):
            p = np.array([rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.1, 10)])
            u, v = project_point(p, K)
            q = backproject_pixel(u, v, p[2], K)
            assert np.abs(q - p).max() <= 1e-12 * max(1.0, np.abs(p).max())

    def test_linearity_in_pixel_offset(self):
        base = backproject_pixel(K.cx + 10.0, K.cy, 1.5, K)
        doubled = backproject_pixel(K.cx + 20.0, K.cy, 1.5, K)
        assert doubled[0] == pytest.approx(2.0 * base[0], rel=1e-12)


class TestRigidPose:
    def test_identity(self):
        p = np.array([1.0, 2.0, 3.0])
        assert camera_to_world(p, RigidPose.identity()).tolist() == p.tolist()

    def test_pure_translation(self):
        pose = RigidPose(np.eye(3), [1, -2, 0.5])
        assert camera_to_world([0, 0, 0], pose).tolist() == [1, -2, 0.5]

    def test_yaw_plus_translation_oracle(self):
        # 90 degree yaw about z, checked against the explicit matrix.
        rot = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        pose = RigidPose(rot, [1.0, 2.0, 3.0])
        got = camera_to_world([1.0, 0.0, 0.0], pose)
        assert got == pytest.approx([1.0, 3.0, 3.0], abs=1e-15)

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            pose = RigidPose(random_rotation(rng), rng.uniform(-2, 2, 3))
            p = rng.uniform(-5, 5, 3)
            back = world_to_camera(camera_to_world(p, pose), pose)
            assert np.abs(back - p).max() < 1e-12

    def test_bad_rotation_rejected(self):
        with pytest.raises(InvalidPose):
            RigidPose(np.eye(3) * 1.1, np.zeros(3))
        reflect = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(InvalidPose):
            RigidPose(reflect, np.zeros(3))

    def test_from_flat(self):
        pose = RigidPose.from_flat([1, 0, 0, 0, 1, 0, 0, 0, 1, 4, 5, 6])
        assert pose.translation.tolist() == [4, 5, 6]
        assert pose.to_flat().tolist() == [1, 0, 0, 0, 1, 0, 0, 0, 1, 4, 5, 6]


class TestWorldRegion:
    def test_full_image_polygon_keeps_band_only(self):
        region = project_polygon_region(
            [[-1e6, -1e6], [1e6, -1e6], [1e6, 1e6], [-1e6, 1e6]],
            K, RigidPose.identity(), ZBand(0.5, 1.0),
        )
        rng = np.random.default_rng(2)
        pts = np.column_stack([rng.uniform(-0.3, 0.3, (500, 2)), rng.uniform(0.05, 2.0, 500)])
        got = region.contains(pts)
        expected = (pts[:, 2] >= 0.5) & (pts[:, 2] <= 1.0)
        assert np.array_equal(got, expected)

    def test_band_shrink_is_monotone(self):
        poly = [[300, 220], [340, 220], [340, 260], [300, 260]]
        wide = project_polygon_region(poly, K, RigidPose.identity(), ZBand(0.5, 1.0))
        narrow = project_polygon_region(poly, K, RigidPose.identity(), ZBand(0.6, 0.9))
        rng = np.random.default_rng(3)
        pts = np.column_stack([rng.uniform(-0.1, 0.1, (2000, 2)), rng.uniform(0.4, 1.1, 2000)])
        inside_narrow = narrow.contains(pts)
        inside_wide = wide.contains(pts)
        assert not (inside_narrow & ~inside_wide).any()

    def test_square_prism_corner_geometry(self):
        k = CameraIntrinsics(100.0, 100.0, 50.0, 50.0)
        poly = [[0.0, 0.0], [100.0, 0.0], [100.0, 100.0], [0.0, 100.0]]
        region = project_polygon_region(poly, k, RigidPose.identity(), ZBand(1.0, 2.0))
        near = sorted(map(tuple, np.round(region.near_corners, 9)))
        far = sorted(map(tuple, np.round(region.far_corners, 9)))
        assert near == [(-0.5, -0.5, 1.0), (-0.5, 0.5, 1.0), (0.5, -0.5, 1.0), (0.5, 0.5, 1.0)]
        assert far == [(-1.0, -1.0, 2.0), (-1.0, 1.0, 2.0), (1.0, -1.0, 2.0), (1.0, 1.0, 2.0)]

    def test_membership_matches_predicate(self):
        rng = np.random.default_rng(4)
        pose = RigidPose(random_rotation(rng), rng.uniform(-0.5, 0.5, 3))
        band = ZBand(0.4, 1.4)
        poly = np.array([[250.0, 180.0], [400.0, 200.0], [390.0, 330.0], [260.0, 310.0]])
        region = project_polygon_region(poly, K, pose, band)
        pts = pose.transform(
            np.column_stack([rng.uniform(-0.6, 0.6, (20_000, 2)), rng.uniform(0.1, 2.0, 20_000)])
        )
        cam = pose.inverse_transform(pts)
        z = cam[:, 2]
        safe_z = np.where(z > 0, z, 1.0)
        u = K.fx * cam[:, 0] / safe_z + K.cx
        v = K.fy * cam[:, 1] / safe_z + K.cy
        expected = (z >= band.z_min) & (z <= band.z_max) & point_in_convex(poly, u, v)
        assert np.array_equal(region.contains(pts), expected)

    def test_nonconvex_polygon_rejected(self):
        with pytest.raises(InvalidPolygon):
            project_polygon_region(
                [[0, 0], [4, 0], [1, 1], [0, 4]], K, RigidPose.identity(), ZBand(0.5, 1.0)
            )

    def test_band_validation(self):
        with pytest.raises(ValueError):
            ZBand(0.0, 1.0)
        with pytest.raises(ValueError):
            ZBand(1.0, 1.0)
