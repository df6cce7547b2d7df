"""Confusion networks and collapsed lattices from CTC posterior grids.

The posterior grid holds per-frame log-probability rows over the CTC label
set, blank included. A confusion network is the chain acceptor with one
state per timestamp and one arc per label per frame, weighted by the
negated log-probability. Composing it with the blank/repetition remover,
projecting to output labels, and optimizing yields the collapsed lattice
whose weight for a sequence is the negative log of the summed probability
of every frame path that collapses to it.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError
from .fst import EPSILON, Wfst
from .ops import compose, opt, project_output
from .semiring import INF, LOG
from .symbols import BLANK_SYMBOL, SymbolTable

ROW_NORM_TOL = 1e-6


@dataclass
class PosteriorMatrix:
    """Frames-by-labels grid of natural-log probabilities.

    Column k corresponds to symbol id k+1 of ``labels`` (id 0 stays
    epsilon); the blank symbol must be present. Rows must be normalized
    within 1e-6 unless ``validate`` is disabled (some invariance tests
    deliberately rescale rows).
    """

    log_probs: np.ndarray
    labels: SymbolTable
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        self.log_probs = np.asarray(self.log_probs, dtype=float)
        if self.log_probs.ndim != 2:
            raise FormatError("posterior grid must be two-dimensional")
        frames, width = self.log_probs.shape
        if frames < 1:
            raise FormatError("posterior grid needs at least one frame")
        if width < 2:
            raise FormatError("posterior grid needs at least two labels (one plus blank)")
        if BLANK_SYMBOL not in self.labels:
            raise FormatError(f"label table lacks {BLANK_SYMBOL}")
        # column k is symbol id k+1; the table may hold extra symbols beyond
        # the grid (a lexicon built against it adds its own), never fewer
        try:
            for k in range(width):
                self.labels.symbol(k + 1)
        except KeyError:
            raise FormatError(
                f"label table does not cover all {width} columns"
            ) from None
        if validate:
            sums = np.logaddexp.reduce(self.log_probs, axis=1)
            bad = np.flatnonzero(np.abs(sums) > ROW_NORM_TOL)
            if bad.size:
                raise FormatError(
                    f"frame {int(bad[0])} is not a distribution "
                    f"(logsumexp {sums[bad[0]]:.3g})"
                )

    @property
    def num_frames(self) -> int:
        return self.log_probs.shape[0]

    @property
    def num_labels(self) -> int:
        return self.log_probs.shape[1]

    def label_id(self, column: int) -> int:
        return column + 1

    def blank_id(self) -> int:
        return self.labels.id(BLANK_SYMBOL)


def load_posterior_file(path: str | Path) -> PosteriorMatrix:
    """Read the tab-separated posterior format (header row of label names)."""
    with open(path, encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f]
    lines = [line for line in lines if line]
    if not lines:
        raise FormatError("empty posterior file", str(path))
    names = lines[0].split("\t")
    table = SymbolTable(names)
    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        fields = line.split("\t")
        if len(fields) != len(names):
            raise FormatError(
                f"expected {len(names)} columns, got {len(fields)}", str(path), lineno
            )
        try:
            rows.append([float(x) for x in fields])
        except ValueError as exc:
            raise FormatError(f"bad log-probability: {exc}", str(path), lineno) from None
    if not rows:
        raise FormatError("posterior file has no frames", str(path))
    try:
        return PosteriorMatrix(np.array(rows), table)
    except FormatError as exc:
        raise FormatError(str(exc), str(path)) from None


def save_posterior_file(path: str | Path, matrix: PosteriorMatrix) -> None:
    names = [matrix.labels.symbol(matrix.label_id(k)) for k in range(matrix.num_labels)]
    with open(path, "w", encoding="utf-8") as f:
        f.write("\t".join(names) + "\n")
        for row in matrix.log_probs:
            f.write("\t".join(repr(float(v)) for v in row) + "\n")


def build_confusion_network(y: PosteriorMatrix) -> Wfst:
    """Chain acceptor: state per timestamp, one arc per label per frame."""
    out = Wfst(LOG)
    out.add_states(y.num_frames + 1)
    out.set_start(0)
    grid = y.log_probs
    for t in range(y.num_frames):
        for k in range(y.num_labels):
            out.add_arc(t, y.label_id(k), y.label_id(k), -float(grid[t, k]), t + 1)
    out.set_final(y.num_frames)
    return out


def build_blank_remover(labels: SymbolTable, max_run: int | None = None) -> Wfst:
    """Transducer collapsing frame-label strings: blanks and repeats go to epsilon.

    One memory state per real label plus the fresh/post-blank state; a blank
    returns to the fresh state, so equal labels separated by blank are
    distinct emissions. With ``max_run`` set, a run of the same label longer
    than ``max_run`` frames starts a new emission instead of collapsing
    (the default, None, collapses runs of any length). Accepts every frame
    string; all weights are one.
    """
    blank = labels.id(BLANK_SYMBOL)
    real = [i for _, i in labels.items() if i not in (EPSILON, blank)]
    out = Wfst(LOG)
    fresh = out.add_state()
    out.set_start(fresh)
    out.set_final(fresh)
    if max_run is None:
        mem = {label: out.add_state() for label in real}
        for label in real:
            out.set_final(mem[label])
            out.add_arc(fresh, label, label, 0.0, mem[label])
            out.add_arc(mem[label], label, EPSILON, 0.0, mem[label])
            out.add_arc(mem[label], blank, EPSILON, 0.0, fresh)
            for other in real:
                if other != label:
                    out.add_arc(mem[label], other, other, 0.0, mem[other])
    else:
        if max_run < 1:
            raise ValueError("max_run must be at least 1")
        mem = {
            (label, run): out.add_state()
            for label in real
            for run in range(1, max_run + 1)
        }
        for state in mem.values():
            out.set_final(state)
        for label in real:
            out.add_arc(fresh, label, label, 0.0, mem[label, 1])
            for run in range(1, max_run + 1):
                src = mem[label, run]
                if run < max_run:
                    out.add_arc(src, label, EPSILON, 0.0, mem[label, run + 1])
                else:
                    out.add_arc(src, label, label, 0.0, mem[label, 1])
                out.add_arc(src, blank, EPSILON, 0.0, fresh)
                for other in real:
                    if other != label:
                        out.add_arc(src, other, other, 0.0, mem[other, 1])
    out.add_arc(fresh, blank, EPSILON, 0.0, fresh)
    return out


def ctc_lattice(y: PosteriorMatrix, prune_threshold: float = INF) -> Wfst:
    """Deterministic, minimal, epsilon-free lattice over collapsed sequences."""
    network = build_confusion_network(y)
    remover = build_blank_remover(y.labels)
    return opt(project_output(compose(network, remover)), prune_threshold)
