"""Geometric grasp toolkit: rectangle metrics, projection, cloud search."""

from .antipodal import (
    GraspCandidate,
    GripperModel,
    Rejection,
    SamplerConfig,
    best_grasp,
    candidate_poses,
    sample_seed,
    score_candidate,
    seed_rng,
)
from .camera import (
    CameraIntrinsics,
    RigidPose,
    WorldRegion,
    ZBand,
    backproject_pixel,
    camera_to_world,
    project_point,
    project_polygon_region,
    world_to_camera,
)
from .cloud import (
    NormalEstimate,
    PatchStats,
    PointCloud,
    crop,
    estimate_normal,
    knn,
    patch_normal,
    patch_stats,
)
from .evaluation import EvalConfig, EvalReport, evaluate_dataset, is_correct_grasp
from .hilo import HeadWeights, HiLoConfig, hilo_forward, leaky_relu, regression_forward
from .rectangles import (
    GraspRect5,
    GraspRect8,
    angle_difference,
    corners_to_rect5,
    jaccard,
    normalize_angle,
    polygon_area,
    polygon_intersection_area,
    rect5_to_corners,
)
from .weights_io import load_weights, save_weights

__version__ = "0.1.0"

__all__ = [
    "CameraIntrinsics",
    "EvalConfig",
    "EvalReport",
    "GraspCandidate",
    "GraspRect5",
    "GraspRect8",
    "GripperModel",
    "HeadWeights",
    "HiLoConfig",
    "NormalEstimate",
    "PatchStats",
    "PointCloud",
    "Rejection",
    "RigidPose",
    "SamplerConfig",
    "WorldRegion",
    "ZBand",
    "angle_difference",
    "backproject_pixel",
    "best_grasp",
    "camera_to_world",
    "candidate_poses",
    "corners_to_rect5",
    "crop",
    "estimate_normal",
    "evaluate_dataset",
    "hilo_forward",
    "is_correct_grasp",
    "jaccard",
    "knn",
    "leaky_relu",
    "load_weights",
    "normalize_angle",
    "patch_normal",
    "patch_stats",
    "polygon_area",
    "polygon_intersection_area",
    "project_point",
    "project_polygon_region",
    "rect5_to_corners",
    "regression_forward",
    "sample_seed",
    "save_weights",
    "score_candidate",
    "seed_rng",
    "world_to_camera",
]
