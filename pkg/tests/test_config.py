import math

import pytest

from graspkit.config import default_config, load_config, parse_config_text
from graspkit.errors import ConfigError

SAMPLE = """
# camera block
camera.fx = 500
camera.fy = 500
camera.cx = 320
camera.cy = 240
camera.pose = 1 0 0  0 1 0  0 0 1  0.1 -0.2 0.3
crop.z_min = 0.4     # meters
crop.z_max = 0.9
grasp.n_seeds = 12
grasp.rng_seed = 99
gripper.max_opening = 0.07
eval.angle_check = false
"""


class TestParsing:
    def test_sections_comments_and_values(self):
        cfg = parse_config_text(SAMPLE)
        k = cfg.camera_intrinsics()
        assert (k.fx, k.cx) == (500.0, 320.0)
        pose = cfg.camera_pose()
        assert pose.translation.tolist() == [0.1, -0.2, 0.3]
        band = cfg.z_band()
        assert (band.z_min, band.z_max) == (0.4, 0.9)
        assert cfg.sampler().n_seeds == 12
        assert cfg.sampler().rng_seed == 99
        assert cfg.gripper().max_opening == 0.07
        assert cfg.eval_config().angle_check_enabled is False

    def test_defaults(self):
        cfg = default_config()
        assert cfg.sampler().n_seeds == 64
        assert cfg.sampler().n_orientations == 8
        assert cfg.gripper().mu_cos == 0.9
        assert cfg.eval_config().jaccard_threshold == 0.25
        assert cfg.eval_config().angle_threshold == pytest.approx(math.pi / 6)
        assert cfg.get("synth.density") == 2e5

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_config_text("grsap.n_seeds = 3")

    def test_bad_value(self):
        with pytest.raises(ConfigError):
            parse_config_text("grasp.n_seeds = many")

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_config_text("grasp.n_seeds 3")

    def test_required_key_unset(self):
        cfg = default_config()
        with pytest.raises(ConfigError):
            cfg.camera_intrinsics()

    def test_pose_needs_12_numbers(self):
        with pytest.raises(ConfigError):
            parse_config_text("camera.pose = 1 0 0 0 1 0 0 0 1").camera_pose()

    def test_non_orthonormal_pose(self):
        cfg = parse_config_text("camera.pose = 2 0 0  0 2 0  0 0 2  0 0 0")
        with pytest.raises(ConfigError):
            cfg.camera_pose()

    def test_patch_radius_zero_disables(self):
        cfg = parse_config_text("cloud.patch_radius = 0")
        assert cfg.sampler().patch_radius is None
        cfg = parse_config_text("cloud.patch_radius = 0.02")
        assert cfg.sampler().patch_radius == 0.02

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.cfg")

    def test_file_round_trip(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text(SAMPLE)
        cfg = load_config(p)
        assert cfg.get("grasp.n_seeds") == 12
