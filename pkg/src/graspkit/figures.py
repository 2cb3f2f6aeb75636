"""Matplotlib renderings saved next to the delimited report files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .evaluation import EvalReport  # noqa: E402


def save_eval_figure(report: EvalReport, threshold: float, path) -> None:
    """Per-image best-IoU bars against the correctness threshold."""
    ids = [r.image_id for r in report.per_image]
    ious = [r.best_iou for r in report.per_image]
    colors = ["#2a9d8f" if r.matched else "#e76f51" for r in report.per_image]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.45 * len(ids) + 2.0), 4.0))
    ax.bar(range(len(ids)), ious, color=colors)
    ax.axhline(threshold, color="black", linestyle="--", linewidth=1.0,
               label=f"threshold {threshold:g}")
    ax.set_xticks(range(len(ids)))
    ax.set_xticklabels(ids, rotation=60, ha="right", fontsize=8)
    ax.set_ylabel("best IoU")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(f"accuracy {report.accuracy:.3f} ({report.n_correct}/{report.n_images})")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_bench_figure(full_times, cropped_times, path) -> None:
    """Paired wall-time distributions for full vs cropped search."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.boxplot([full_times, cropped_times], tick_labels=["full cloud", "cropped"])
    ax.set_ylabel("wall time per search [s]")
    ax.set_title("grasp search: full vs cropped cloud")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
