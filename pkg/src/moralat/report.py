"""Figure rendering for the scoring and f0-labelling report paths."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .f0 import F0Track
from .metrics import AlignmentResult, corpus_aggregate


def render_score_figures(
    results: Sequence[AlignmentResult], out_dir: str | Path
) -> list[Path]:
    """Per-utterance error-rate bars and an error-type breakdown."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    indices = range(1, len(results) + 1)
    corpus = corpus_aggregate(results)

    fig, ax = plt.subplots(figsize=(max(4.0, 0.3 * len(results)), 3.0))
    ax.bar(indices, [100.0 * r.error_rate for r in results], color="#4878d0")
    ax.axhline(100.0 * corpus, color="#d65f5f", linestyle="--", label="corpus")
    ax.set_xlabel("utterance")
    ax.set_ylabel("error rate [%]")
    ax.legend(loc="upper right")
    fig.tight_layout()
    rates_path = out / "error_rates.png"
    fig.savefig(rates_path, dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(max(4.0, 0.3 * len(results)), 3.0))
    bottoms = [0] * len(results)
    for attr, color in (
        ("substitutions", "#4878d0"),
        ("deletions", "#ee854a"),
        ("insertions", "#6acc64"),
    ):
        values = [getattr(r, attr) for r in results]
        ax.bar(indices, values, bottom=bottoms, label=attr, color=color)
        bottoms = [b + v for b, v in zip(bottoms, values)]
    ax.set_xlabel("utterance")
    ax.set_ylabel("errors")
    ax.legend(loc="upper right")
    fig.tight_layout()
    breakdown_path = out / "error_breakdown.png"
    fig.savefig(breakdown_path, dpi=120)
    plt.close(fig)
    return [rates_path, breakdown_path]


def render_f0_figure(
    track: F0Track, classes: Sequence[int], frame_rate: float, path: str | Path
) -> Path:
    """f0 contour with the per-frame class sequence underneath."""
    fig, (ax_f0, ax_cls) = plt.subplots(
        2, 1, figsize=(8.0, 4.0), sharex=True, height_ratios=[2, 1]
    )
    times = [i * track.hop for i in range(len(track.f0))]
    voiced = [(t, v) for t, v in zip(times, track.f0) if v > 0]
    if voiced:
        ax_f0.scatter(*zip(*voiced), s=6, color="#4878d0")
    ax_f0.set_ylabel("f0 [Hz]")
    frame_times = [n / frame_rate for n in range(len(classes))]
    ax_cls.step(frame_times, classes, where="post", color="#d65f5f")
    ax_cls.set_ylim(-0.5, 9.5)
    ax_cls.set_yticks(range(0, 10, 3))
    ax_cls.set_ylabel("class")
    ax_cls.set_xlabel("time [s]")
    fig.tight_layout()
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
