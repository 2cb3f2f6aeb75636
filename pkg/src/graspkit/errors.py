"""Exception types raised across the toolkit.

Everything inherits from GraspKitError so callers can catch library
failures with a single clause while still matching specific conditions.
"""


class GraspKitError(Exception):
    """Base class for all toolkit errors."""


# ---- rectangle / polygon geometry ----

class InvalidPolygon(GraspKitError):
    """Corner list is not a simple convex polygon."""


class NotARectangle(GraspKitError):
    """Four corners do not form a rectangle within tolerance."""


class DegeneratePolygon(GraspKitError):
    """Polygon area is below the degeneracy threshold."""


# ---- evaluation ----

class EmptyTruthSet(GraspKitError):
    """A prediction was checked against an empty ground-truth list."""


class MissingAnnotation(GraspKitError):
    def __init__(self, image_id: str):
        super().__init__(f"no annotation entry for image {image_id!r}")
        self.image_id = image_id


# ---- camera ----

class NonPositiveDepth(GraspKitError):
    """Back-projection requested at depth <= 0."""


class InvalidPose(GraspKitError):
    """Rotation matrix is not special orthogonal within tolerance."""


# ---- point cloud ----

class EmptyCloud(GraspKitError):
    """Operation requires at least one point."""


class KTooLarge(GraspKitError):
    """Neighbor count exceeds the cloud size."""


class PatchTooSmall(GraspKitError):
    """Patch statistics need at least 3 points."""


class DegeneratePatch(GraspKitError):
    """Normal direction is ill-defined (isotropic or collinear patch)."""


# ---- antipodal search ----

class NoValidGrasp(GraspKitError):
    """Every sampled candidate was rejected.

    Carries a histogram of rejection reasons so callers can widen the
    sampler or gripper configuration intelligently.
    """

    def __init__(self, counts: dict, degenerate_seeds: int = 0):
        self.counts = dict(counts)
        self.degenerate_seeds = degenerate_seeds
        parts = ", ".join(f"{k}={v}" for k, v in sorted(self.counts.items()))
        super().__init__(
            f"no valid grasp candidate ({parts}, degenerate_seeds={degenerate_seeds})"
        )


# ---- tensor / weight container ----

class ShapeMismatch(GraspKitError):
    """Tensor has an unexpected shape for its role."""


class WindowIndivisible(GraspKitError):
    """Feature-map side is not divisible by the attention window."""


class WeightFormatError(GraspKitError):
    """Weight container could not be decoded."""


class BadMagic(WeightFormatError):
    """File does not start with the container magic."""


class VersionUnsupported(WeightFormatError):
    """Container version is not understood."""


class MissingTensor(WeightFormatError):
    def __init__(self, name: str):
        super().__init__(f"container is missing tensor {name!r}")
        self.name = name


# ---- file parsing ----

class MalformedLine(GraspKitError):
    def __init__(self, lineno: int, detail: str = ""):
        msg = f"malformed line {lineno}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.lineno = lineno


class DanglingCorners(GraspKitError):
    def __init__(self, count: int):
        super().__init__(f"{count} trailing corner line(s) do not form a rectangle")
        self.count = count


class BadHeader(GraspKitError):
    """PLY header does not match the supported ASCII subset."""


class CountMismatch(GraspKitError):
    """PLY body length disagrees with the declared vertex count."""


# ---- configuration ----

class ConfigError(GraspKitError):
    """Configuration file or override is invalid."""
