"""Frame-level pitch-trajectory classes from fundamental-frequency tracks.

For each decoder frame, three analysis windows are laid around the frame
timestamp: left [t-1.5w, t-0.5w), center [t-0.5w, t+0.5w), and right
[t+0.5w, t+1.5w), with w defaulting to 40 ms. The left/right voicedness
pattern gives four cases, the both-voiced case splits on whether mean
log-f0 strictly rises from left to right, and doubling by the center
window's voicedness yields ten classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError

DEFAULT_HOP = 0.010
DEFAULT_WINDOW = 0.040
DEFAULT_FRAME_RATE = 12.5
NUM_CLASSES = 10

Interval = tuple[float, float]


@dataclass(frozen=True)
class F0Track:
    """Evenly hopped f0 samples; zero or negative values mean unvoiced."""

    hop: float = DEFAULT_HOP
    f0: tuple[float, ...] = ()

    def __post_init__(self):
        if self.hop <= 0:
            raise ValueError("hop must be positive")
        object.__setattr__(self, "f0", tuple(float(v) for v in self.f0))

    @property
    def duration(self) -> float:
        return len(self.f0) * self.hop

    def is_voiced(self, index: int) -> bool:
        return self.f0[index] > 0.0


def load_f0_track(path: str | Path) -> F0Track:
    """Read the track format: header ``hop=<seconds>``, one value per line."""
    with open(path, encoding="utf-8") as f:
        lines = [line.strip() for line in f]
    lines = [line for line in lines if line]
    if not lines or not lines[0].startswith("hop="):
        raise FormatError("first line must be 'hop=<seconds>'", str(path), 1)
    try:
        hop = float(lines[0][4:])
    except ValueError:
        raise FormatError(f"bad hop value {lines[0]!r}", str(path), 1) from None
    values = []
    for lineno, line in enumerate(lines[1:], 2):
        try:
            values.append(float(line))
        except ValueError:
            raise FormatError(f"bad f0 value {line!r}", str(path), lineno) from None
    try:
        return F0Track(hop, tuple(values))
    except ValueError as exc:
        raise FormatError(str(exc), str(path)) from None


def save_f0_track(path: str | Path, track: F0Track) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"hop={track.hop!r}\n")
        for v in track.f0:
            f.write(f"{v!r}\n")


def window_segments(t: float, w: float = DEFAULT_WINDOW) -> tuple[Interval, Interval, Interval]:
    """Left, center, and right half-open analysis intervals around t."""
    if w <= 0:
        raise ValueError("window length must be positive")
    return (
        (t - 1.5 * w, t - 0.5 * w),
        (t - 0.5 * w, t + 0.5 * w),
        (t + 0.5 * w, t + 1.5 * w),
    )


def _voiced_indices(track: F0Track, interval: Interval) -> list[int]:
    lo, hi = interval
    first = max(0, math.ceil(lo / track.hop - 1e-9))
    out = []
    for i in range(first, len(track.f0)):
        ts = i * track.hop
        if ts >= hi:
            break
        if ts >= lo and track.is_voiced(i):
            out.append(i)
    return out


def voicedness(track: F0Track, interval: Interval) -> bool:
    """True when at least one voiced sample falls inside the interval."""
    return bool(_voiced_indices(track, interval))


def mean_log_f0(track: F0Track, interval: Interval) -> float:
    """Mean natural-log f0 over the voiced samples in the interval."""
    indices = _voiced_indices(track, interval)
    if not indices:
        raise ValueError("mean_log_f0 called on an unvoiced interval")
    return sum(math.log(track.f0[i]) for i in indices) / len(indices)


def classify_frame(track: F0Track, t: float, w: float = DEFAULT_WINDOW) -> int:
    """Class id in [0, 9] for the frame at timestamp t.

    Base case from the left/right voicedness pattern (unvoiced/unvoiced,
    unvoiced/voiced, voiced/unvoiced, then rising vs non-rising when both
    are voiced; equality counts as non-rising); doubled, plus one when the
    center window is unvoiced.
    """
    left, center, right = window_segments(t, w)
    voiced_left = voicedness(track, left)
    voiced_right = voicedness(track, right)
    if not voiced_left and not voiced_right:
        base = 0
    elif not voiced_left:
        base = 1
    elif not voiced_right:
        base = 2
    elif mean_log_f0(track, left) < mean_log_f0(track, right):
        base = 3
    else:
        base = 4
    return 2 * base + (0 if voicedness(track, center) else 1)


def classify_utterance(
    track: F0Track,
    frame_rate: float = DEFAULT_FRAME_RATE,
    w: float = DEFAULT_WINDOW,
) -> list[int]:
    """Class ids for frames at t = n / frame_rate covering the track."""
    if frame_rate <= 0:
        raise ValueError("frame rate must be positive")
    if not track.f0:
        return []
    count = math.ceil(track.duration * frame_rate - 1e-9)
    return [classify_frame(track, n / frame_rate, w) for n in range(count)]
