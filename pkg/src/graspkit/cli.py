"""Command-line front end.

Subcommands: eval (rectangle-metric accuracy over directories), grasp
(antipodal search on a point cloud), bench (cropped vs full search
timing), synth (synthetic scene generation), infer (regression head on
a stored feature vector). Exit codes: 0 success, 2 input or
configuration error, 3 no valid grasp found.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import cornell, plyio, synth
from .antipodal import best_grasp
from .camera import project_polygon_region
from .cloud import crop
from .config import load_config
from .errors import ConfigError, EmptyCloud, GraspKitError, NoValidGrasp
from .evaluation import EvalConfig, evaluate_dataset
from .hilo import FEATURE_DIM, regression_forward
from .rectangles import corners_to_rect5
from .weights_io import load_weights

# Hand-drawn labels are only approximately rectangular; the strict
# library default (1e-6) would reject most of them at the CLI boundary.
LENIENT_RECT_TOL = 0.05


def _fail(msg: str, code: int = 2) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _parse_region(text: str) -> np.ndarray:
    pts = []
    for token in text.split():
        u, _, v = token.partition(",")
        pts.append((float(u), float(v)))
    if len(pts) < 3:
        raise ConfigError(f"region needs at least 3 vertices, got {len(pts)}")
    return np.array(pts)


# ---------------------------------------------------------------- eval

def _cmd_eval(args) -> int:
    truth_dir = Path(args.truth)
    pred_dir = Path(args.pred)
    if not truth_dir.is_dir():
        return _fail(f"truth directory not found: {truth_dir}")
    if not pred_dir.is_dir():
        return _fail(f"prediction directory not found: {pred_dir}")
    annotations = cornell.scan_annotation_dir(truth_dir)
    raw_preds = cornell.scan_prediction_dir(pred_dir)
    if not raw_preds:
        return _fail(f"no prediction files in {pred_dir}")

    preds = {}
    for image_id, rect in raw_preds.items():
        preds[image_id] = corners_to_rect5(rect, tol_rect=LENIENT_RECT_TOL)
    truths = {
        image_id: [corners_to_rect5(r, tol_rect=LENIENT_RECT_TOL) for r in ann.positives]
        for image_id, ann in annotations.items()
    }

    cfg = EvalConfig(
        jaccard_threshold=args.jaccard,
        angle_threshold=float(np.radians(args.angle_deg)),
        angle_check_enabled=not args.no_angle_check,
    )
    report = evaluate_dataset(preds, truths, cfg)

    lines = [f"{r.image_id}\t{r.best_iou:.6f}\t{int(r.matched)}" for r in report.per_image]
    lines.append(f"accuracy={report.accuracy:.6f} n={report.n_images}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.report:
        out = Path(args.report)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if not args.no_figures:
            from .figures import save_eval_figure
            save_eval_figure(report, cfg.jaccard_threshold, out.with_suffix(".png"))
    return 0


# --------------------------------------------------------------- grasp

def _load_scene(args):
    cfg = load_config(args.config)
    cloud = plyio.read_ply(args.cloud)
    region = project_polygon_region(
        _parse_region(args.region), cfg.camera_intrinsics(), cfg.camera_pose(), cfg.z_band()
    )
    return cfg, cloud, region


def _grasp_lines(candidate) -> str:
    pose = " ".join(f"{v:.9g}" for v in candidate.pose.to_flat())
    return f"pose {pose}\ncost {candidate.cost:.9g}\nseed {candidate.seed_index}\n"


def _cmd_grasp(args) -> int:
    cfg, cloud, region = _load_scene(args)
    try:
        candidate = best_grasp(cloud, region, cfg.sampler(), cfg.gripper())
    except NoValidGrasp as exc:
        print(
            "error: no valid grasp "
            f"(penetration={exc.counts.get('penetration', 0)} "
            f"no_contact={exc.counts.get('no_contact', 0)} "
            f"not_antipodal={exc.counts.get('not_antipodal', 0)} "
            f"degenerate_seeds={exc.degenerate_seeds})",
            file=sys.stderr,
        )
        return 3
    except EmptyCloud:
        print("error: no valid grasp (region contains no points)", file=sys.stderr)
        return 3
    text = _grasp_lines(candidate)
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text)
    return 0


# --------------------------------------------------------------- bench

def _cmd_bench(args) -> int:
    cfg, cloud, region = _load_scene(args)
    sampler, gripper = cfg.sampler(), cfg.gripper()
    if args.repeat < 1:
        return _fail("--repeat must be >= 1")

    def run_full():
        return best_grasp(cloud, None, sampler, gripper)

    def run_cropped():
        return best_grasp(cloud, region, sampler, gripper)

    try:
        full_times, cropped_times = [], []
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            cand_full = run_full()
            full_times.append(time.perf_counter() - t0)
            t0 = time.perf_counter()
            cand_cropped = run_cropped()
            cropped_times.append(time.perf_counter() - t0)
    except NoValidGrasp as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except EmptyCloud:
        print("error: no valid grasp (region contains no points)", file=sys.stderr)
        return 3

    def stats(ts):
        mean = statistics.fmean(ts)
        std = statistics.pstdev(ts) if len(ts) > 1 else 0.0
        return mean, std, statistics.median(ts)

    fm, fs, fmed = stats(full_times)
    cm, cs, cmed = stats(cropped_times)
    lines = [
        f"full mean={fm:.6f} std={fs:.6f} median={fmed:.6f}",
        f"cropped mean={cm:.6f} std={cs:.6f} median={cmed:.6f}",
        f"speedup={fmed / cmed:.6f}",
        f"cost full={cand_full.cost:.9g} cropped={cand_cropped.cost:.9g}",
    ]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.report:
        out = Path(args.report)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if not args.no_figures:
            from .figures import save_bench_figure
            save_bench_figure(full_times, cropped_times, out.with_suffix(".png"))
    return 0


# --------------------------------------------------------------- synth

def _parse_triplet(text: str, what: str) -> tuple[float, ...]:
    parts = [float(t) for t in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"{what} needs three comma-separated numbers, got {text!r}")
    return tuple(parts)


def _cmd_synth(args) -> int:
    cfg = load_config(args.config)
    density = args.density if args.density is not None else cfg.get("synth.density")
    sigma = args.noise_sigma if args.noise_sigma is not None else cfg.get("synth.noise_sigma")
    seed = args.seed if args.seed is not None else cfg.get("synth.seed")
    pose = None
    if args.pose:
        from .camera import RigidPose
        pose = RigidPose.from_flat([float(t) for t in args.pose.split()])

    if args.shape == "box":
        if not args.dims:
            return _fail("--dims w,d,h is required for boxes")
        w, d, h = _parse_triplet(args.dims, "--dims")
        scene = synth.gen_box_scene(w, d, h, pose, density, sigma, seed)
    elif args.shape == "cylinder":
        if args.radius is None or args.length is None:
            return _fail("--radius and --length are required for cylinders")
        scene = synth.gen_cylinder_scene(args.radius, args.length, pose, density, sigma, seed)
    elif args.shape == "plane":
        if args.size_x is None or args.size_y is None:
            return _fail("--size-x and --size-y are required for planes")
        scene = synth.gen_plane_patch(args.size_x, args.size_y, pose, density, sigma, seed)
    else:  # sphere
        if args.radius is None:
            return _fail("--radius is required for spheres")
        scene = synth.gen_sphere_scene(args.radius, pose, density, sigma, seed)

    plyio.write_ply(args.out, scene.cloud)
    if args.truth_out:
        synth.write_truth(args.truth_out, scene.truth)
    print(f"points={len(scene.cloud)}")
    return 0


# --------------------------------------------------------------- infer

def _cmd_infer(args) -> int:
    weights = load_weights(args.weights, out_dim=args.out_dim)
    raw = Path(args.feature).read_text().split()
    feature = np.array([float(t) for t in raw], dtype=np.float32)
    if feature.size != FEATURE_DIM:
        return _fail(f"feature file holds {feature.size} values, expected {FEATURE_DIM}")
    out = regression_forward(feature, weights, out_dim=args.out_dim)
    print("output " + " ".join(f"{v:.8g}" for v in out))
    if args.check_oracle:
        # Independent float64 path: plain per-layer dot products.
        y = feature.astype(np.float64)
        y = np.dot(y, weights.fc1_weight.astype(np.float64)) + weights.fc1_bias.astype(np.float64)
        y = np.where(y >= 0.0, y, 0.1 * y)
        y = np.dot(y, weights.fc2_weight.astype(np.float64)) + weights.fc2_bias.astype(np.float64)
        y = np.where(y >= 0.0, y, 0.1 * y)
        y = np.dot(y, weights.fc3_weight.astype(np.float64)) + weights.fc3_bias.astype(np.float64)
        print(f"oracle_maxabs={np.abs(out.astype(np.float64) - y).max():.3g}")
    return 0


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graspkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="score predictions against annotations")
    e.add_argument("--pred", required=True, help="directory of prediction corner files")
    e.add_argument("--truth", required=True, help="directory of pcd*cpos.txt annotation files")
    e.add_argument("--jaccard", type=float, default=0.25)
    e.add_argument("--angle-deg", type=float, default=30.0)
    e.add_argument("--no-angle-check", action="store_true")
    e.add_argument("--report", help="write the report (and a .png figure) here")
    e.add_argument("--no-figures", action="store_true")
    e.set_defaults(func=_cmd_eval)

    g = sub.add_parser("grasp", help="search a point cloud for the best grasp")
    g.add_argument("--cloud", required=True, help="ASCII PLY point cloud")
    g.add_argument("--region", required=True, help='pixel polygon "u1,v1 u2,v2 ..."')
    g.add_argument("--config", required=True)
    g.add_argument("--out", help="also write the winning grasp here")
    g.set_defaults(func=_cmd_grasp)

    b = sub.add_parser("bench", help="time full-cloud vs cropped-cloud search")
    b.add_argument("--cloud", required=True)
    b.add_argument("--region", required=True)
    b.add_argument("--config", required=True)
    b.add_argument("--repeat", type=int, default=20)
    b.add_argument("--report", help="write timing rows (and a .png figure) here")
    b.add_argument("--no-figures", action="store_true")
    b.set_defaults(func=_cmd_bench)

    s = sub.add_parser("synth", help="generate a synthetic scene with ground truth")
    s.add_argument("--shape", required=True, choices=["box", "cylinder", "plane", "sphere"])
    s.add_argument("--dims", help="box extents w,d,h in meters")
    s.add_argument("--radius", type=float)
    s.add_argument("--length", type=float)
    s.add_argument("--size-x", type=float)
    s.add_argument("--size-y", type=float)
    s.add_argument("--pose", help="12 numbers, row-major rotation then translation")
    s.add_argument("--density", type=float)
    s.add_argument("--noise-sigma", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--config", help="config file supplying synth.* defaults")
    s.add_argument("--out", required=True, help="output PLY path")
    s.add_argument("--truth-out", help="write the analytic truth sidecar here")
    s.set_defaults(func=_cmd_synth)

    i = sub.add_parser("infer", help="run the regression head on a feature vector")
    i.add_argument("--weights", required=True, help="weight container file")
    i.add_argument("--feature", required=True, help="text file of 768 floats")
    i.add_argument("--out-dim", type=int, choices=[5, 8], default=5)
    i.add_argument("--check-oracle", action="store_true")
    i.set_defaults(func=_cmd_infer)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraspKitError as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
