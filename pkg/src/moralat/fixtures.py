"""Seeded synthetic fixtures: posterior grids, dictionaries, f0 tracks.

Everything is driven by a caller-supplied ``random.Random`` so the same
seed regenerates byte-identical files, which the oracle tests and the
determinism checks rely on.
"""

from __future__ import annotations

import math
import random
from pathlib import Path

import numpy as np

from .ctc import PosteriorMatrix, save_posterior_file
from .f0 import F0Track, save_f0_track
from .lexicon import DictEntry
from .symbols import BLANK_SYMBOL, SymbolTable
from .tokens import MoraToken

MORA_POOL = ["ア", "カ", "キ", "キ'", "シ", "チ", "ハ", "マ", "リ", "ン", "キュ", "ト"]
CHAR_POOL = ["端", "箸", "橋", "高", "桥", "は", "し", "だ", "た", "か"]


def random_posteriors(
    rng: random.Random, frames: int, labels: list[str]
) -> PosteriorMatrix:
    """Grid with rows normalized exactly (up to float rounding)."""
    table = SymbolTable([BLANK_SYMBOL] + labels)
    width = len(labels) + 1
    rows = []
    for _ in range(frames):
        raw = [rng.random() + 0.02 for _ in range(width)]
        total = sum(raw)
        rows.append([math.log(v / total) for v in raw])
    return PosteriorMatrix(np.array(rows), table)


def one_hot_posteriors(symbols: list[str], labels: list[str]) -> PosteriorMatrix:
    """One frame per symbol, probability one on that symbol's column."""
    table = SymbolTable([BLANK_SYMBOL] + labels)
    order = [BLANK_SYMBOL] + labels
    rows = []
    for sym in symbols:
        row = [-math.inf] * len(order)
        row[order.index(sym)] = 0.0
        rows.append(row)
    return PosteriorMatrix(np.array(rows), table)


def random_entries(rng: random.Random, count: int) -> list[DictEntry]:
    entries = []
    seen = set()
    for _ in range(count * 3):
        if len(entries) >= count:
            break
        surface = "".join(rng.choice(CHAR_POOL) for _ in range(rng.randint(1, 2)))
        pron = tuple(
            MoraToken.parse(rng.choice(MORA_POOL)) for _ in range(rng.randint(1, 3))
        )
        if (surface, pron) in seen:
            continue
        seen.add((surface, pron))
        entries.append(DictEntry(surface, pron))
    return entries


def random_track(
    rng: random.Random, seconds: float = 1.0, hop: float = 0.010
) -> F0Track:
    """Alternating voiced and silent stretches with drifting f0."""
    values: list[float] = []
    total = int(round(seconds / hop))
    voiced = rng.random() < 0.7
    f0 = rng.uniform(90.0, 280.0)
    while len(values) < total:
        span = rng.randint(3, 12)
        for _ in range(min(span, total - len(values))):
            if voiced:
                f0 = max(60.0, f0 * rng.uniform(0.97, 1.03))
                values.append(f0)
            else:
                values.append(0.0)
        voiced = not voiced
    return F0Track(hop, tuple(values))


def write_fixture_set(
    out_dir: str | Path,
    seed: int,
    frames: int = 4,
    labels: int = 3,
    utterances: int = 3,
) -> Path:
    """Write posterior pairs, a dictionary, an f0 track, and a manifest.

    Returns the manifest path. The manifest references the per-utterance
    posterior files relative to its own directory.
    """
    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pa_labels = MORA_POOL[: max(2, min(labels, len(MORA_POOL)))]
    tt_labels = CHAR_POOL[: max(2, min(labels, len(CHAR_POOL)))]
    rows = []
    for i in range(utterances):
        pa = random_posteriors(rng, frames, pa_labels)
        tt = random_posteriors(rng, frames, tt_labels)
        pa_name = f"pa_{i:03d}.post"
        tt_name = f"tt_{i:03d}.post"
        save_posterior_file(out / pa_name, pa)
        save_posterior_file(out / tt_name, tt)
        rows.append((f"utt{i:03d}", pa_name, tt_name))
    with open(out / "lexicon.tsv", "w", encoding="utf-8") as f:
        f.write("# synthetic fixture dictionary\n")
        for entry in random_entries(rng, 8):
            f.write(f"{entry.surface}\t{' '.join(t.render() for t in entry.pron)}\n")
    save_f0_track(out / "track.f0", random_track(rng))
    manifest = out / "manifest.tsv"
    with open(manifest, "w", encoding="utf-8") as f:
        for utt_id, pa_name, tt_name in rows:
            f.write(f"{utt_id}\t{pa_name}\t{tt_name}\n")
    return manifest
