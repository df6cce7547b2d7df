"""Shared builders for randomized and constructed test automata."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from moralat.ctc import PosteriorMatrix
from moralat.fst import Wfst
from moralat.lexicon import DictEntry, build_lexicon
from moralat.semiring import LOG, TROPICAL
from moralat.symbols import BLANK_SYMBOL, SymbolTable
from moralat.tokens import MoraToken


def random_acyclic_acceptor(
    rng: random.Random,
    max_states: int = 8,
    num_labels: int = 3,
    semiring=LOG,
    allow_epsilon: bool = False,
) -> Wfst:
    """Trim-by-construction acyclic acceptor with a guaranteed spine path.

    Arcs only go from lower to higher state ids, and the chain 0 -> 1 ->
    ... -> n-1 always exists, so every state lies on an accepting path.
    """
    n = rng.randint(2, max_states)
    fst = Wfst(semiring)
    fst.add_states(n)
    fst.set_start(0)
    labels = list(range(1, num_labels + 1))
    if allow_epsilon:
        labels.append(0)
    for q in range(n - 1):
        fst.add_arc(q, *_lbl(rng, labels), rng.uniform(0.05, 4.0), q + 1)
    extra = rng.randint(0, 2 * n)
    for _ in range(extra):
        src = rng.randrange(0, n - 1)
        dst = rng.randrange(src + 1, n)
        fst.add_arc(src, *_lbl(rng, labels), rng.uniform(0.05, 4.0), dst)
    fst.set_final(n - 1, rng.uniform(0.0, 1.0))
    if n > 2 and rng.random() < 0.3:
        fst.set_final(rng.randrange(1, n - 1), rng.uniform(0.0, 1.0))
    return fst


def _lbl(rng: random.Random, labels: list[int]) -> tuple[int, int]:
    label = rng.choice(labels)
    return label, label


def random_transducer(rng: random.Random, max_states: int = 5, num_labels: int = 2) -> Wfst:
    """Small acyclic transducer with occasional epsilon labels on each side."""
    n = rng.randint(2, max_states)
    fst = Wfst(LOG)
    fst.add_states(n)
    fst.set_start(0)
    choices = list(range(0, num_labels + 1))  # 0 is epsilon
    for q in range(n - 1):
        fst.add_arc(q, rng.choice(choices), rng.choice(choices), rng.uniform(0.05, 2.0), q + 1)
    for _ in range(rng.randint(0, n)):
        src = rng.randrange(0, n - 1)
        dst = rng.randrange(src + 1, n)
        fst.add_arc(src, rng.choice(choices), rng.choice(choices), rng.uniform(0.05, 2.0), dst)
    fst.set_final(n - 1)
    return fst


def random_posterior_matrix(
    rng: random.Random, frames: int, width: int, labels: list[str] | None = None
) -> PosteriorMatrix:
    if labels is None:
        labels = [chr(ord("a") + i) for i in range(width - 1)]
    table = SymbolTable([BLANK_SYMBOL] + labels)
    rows = []
    for _ in range(frames):
        raw = [rng.random() + 0.05 for _ in range(width)]
        total = sum(raw)
        rows.append([math.log(v / total) for v in raw])
    return PosteriorMatrix(np.array(rows), table)


def matrix_from_probs(rows: list[dict[str, float]], labels: list[str]) -> PosteriorMatrix:
    """Posterior grid from explicit per-frame probability dicts."""
    table = SymbolTable([BLANK_SYMBOL] + labels)
    order = [BLANK_SYMBOL] + labels
    grid = []
    for row in rows:
        if abs(sum(row.values()) - 1.0) > 1e-9:
            raise ValueError(f"fixture row does not sum to one: {row}")
        grid.append([math.log(row[s]) if row.get(s, 0.0) > 0 else -math.inf for s in order])
    return PosteriorMatrix(np.array(grid), table)


def homophone_fixture(oov: bool = False):
    """The constructed two-frame ambiguity the fusion pipeline resolves.

    Acoustic posteriors prefer ハチ over ハシ (0.55 vs 0.45 in frame 2);
    the text side confidently says 端, whose dictionary pronunciation is
    ハシ. With ``oov`` the dictionary misses the character, so the text
    side supports nothing.
    """
    y_pa = matrix_from_probs(
        [
            {"ハ": 0.97, "シ": 0.01, "チ": 0.01, BLANK_SYMBOL: 0.01},
            {"シ": 0.45, "チ": 0.53, "ハ": 0.01, BLANK_SYMBOL: 0.01},
        ],
        ["ハ", "シ", "チ"],
    )
    y_tt = matrix_from_probs(
        [{"端": 0.99, "だ": 0.005, BLANK_SYMBOL: 0.005}],
        ["端", "だ"],
    )
    surface = "高" if oov else "端"
    entries = [DictEntry(surface, (MoraToken("ハ"), MoraToken("シ")))]
    lexicon = build_lexicon(entries, isyms=y_tt.labels, osyms=y_pa.labels)
    return y_pa, y_tt, lexicon


@pytest.fixture
def rng():
    return random.Random(20240901)
