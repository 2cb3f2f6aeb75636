"""Line-oriented run configuration: `section.key = value`, `#` comments.

Every key is validated against the schema below; unknown keys are
errors so typos fail fast. camera.pose takes 12 whitespace-separated
numbers (row-major rotation, then translation).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .antipodal import GripperModel, SamplerConfig
from .camera import CameraIntrinsics, RigidPose, ZBand
from .errors import ConfigError, InvalidPose
from .evaluation import EvalConfig

_IDENTITY_POSE = (1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0)


def _parse_bool(raw: str) -> bool:
    v = raw.strip().lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_floats(raw: str) -> tuple[float, ...]:
    return tuple(float(t) for t in raw.split())


# key -> (parser, default); None default means "must be set before use"
SCHEMA: dict[str, tuple] = {
    "camera.fx": (float, None),
    "camera.fy": (float, None),
    "camera.cx": (float, None),
    "camera.cy": (float, None),
    "camera.pose": (_parse_floats, _IDENTITY_POSE),
    "crop.z_min": (float, None),
    "crop.z_max": (float, None),
    "cloud.patch_k": (int, 30),
    "cloud.patch_radius": (float, 0.0),  # 0 disables the radius cap
    "grasp.n_seeds": (int, 64),
    "grasp.n_orientations": (int, 8),
    "grasp.rng_seed": (int, 0),
    "grasp.mu_cos": (float, 0.9),
    "gripper.max_opening": (float, 0.08),
    "gripper.finger_thickness": (float, 0.002),
    "gripper.finger_depth": (float, 0.02),
    "gripper.palm_clearance": (float, 0.02),
    "gripper.contact_skin": (float, 0.001),
    "synth.density": (float, 2e5),
    "synth.noise_sigma": (float, 0.0),
    "synth.seed": (int, 0),
    "eval.jaccard_threshold": (float, 0.25),
    "eval.angle_deg": (float, 30.0),
    "eval.angle_check": (_parse_bool, True),
}


@dataclass
class RunConfig:
    values: dict

    def get(self, key: str):
        return self.values[key]

    def require(self, key: str):
        v = self.values[key]
        if v is None:
            raise ConfigError(f"config key {key!r} is required but not set")
        return v

    def set(self, key: str, raw: str):
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        parser, _ = SCHEMA[key]
        try:
            self.values[key] = parser(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from None

    # -- typed views over the raw values --

    def camera_intrinsics(self) -> CameraIntrinsics:
        return CameraIntrinsics(
            fx=self.require("camera.fx"), fy=self.require("camera.fy"),
            cx=self.require("camera.cx"), cy=self.require("camera.cy"),
        )

    def camera_pose(self) -> RigidPose:
        flat = self.get("camera.pose")
        if len(flat) != 12:
            raise ConfigError(f"camera.pose needs 12 numbers, got {len(flat)}")
        try:
            return RigidPose.from_flat(flat)
        except InvalidPose as exc:
            raise ConfigError(f"camera.pose: {exc}") from None

    def z_band(self) -> ZBand:
        try:
            return ZBand(self.require("crop.z_min"), self.require("crop.z_max"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def gripper(self) -> GripperModel:
        try:
            return GripperModel(
                max_opening=self.get("gripper.max_opening"),
                finger_thickness=self.get("gripper.finger_thickness"),
                finger_depth=self.get("gripper.finger_depth"),
                palm_clearance=self.get("gripper.palm_clearance"),
                mu_cos=self.get("grasp.mu_cos"),
                contact_skin=self.get("gripper.contact_skin"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def sampler(self) -> SamplerConfig:
        radius = self.get("cloud.patch_radius")
        try:
            return SamplerConfig(
                n_seeds=self.get("grasp.n_seeds"),
                n_orientations=self.get("grasp.n_orientations"),
                rng_seed=self.get("grasp.rng_seed"),
                patch_k=self.get("cloud.patch_k"),
                patch_radius=radius if radius > 0.0 else None,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def eval_config(self) -> EvalConfig:
        import math
        try:
            return EvalConfig(
                jaccard_threshold=self.get("eval.jaccard_threshold"),
                angle_threshold=math.radians(self.get("eval.angle_deg")),
                angle_check_enabled=self.get("eval.angle_check"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def default_config() -> RunConfig:
    return RunConfig({key: default for key, (_, default) in SCHEMA.items()})


def parse_config_text(text: str, cfg: RunConfig | None = None) -> RunConfig:
    cfg = cfg or default_config()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {raw!r}")
        key, _, value = line.partition("=")
        cfg.set(key.strip(), value.strip())
    return cfg


def load_config(path=None) -> RunConfig:
    """Read a config file (defaults only when path is None)."""
    cfg = default_config()
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {path}")
        parse_config_text(p.read_text(), cfg)
    return cfg
