"""Lattice fusion: averaging the acoustic mora lattice with the
dictionary-converted text lattice, then extracting the best mora sequence.

Three decoders share the pipeline. The plain acoustic decoder takes the
shortest path of the collapsed mora lattice. The explicit-conditioning
baseline decodes only from the reweighted dictionary lattice and fails
outright when the text side supports nothing. The fusion decoder averages
both lattices with a mixture union and degrades gracefully: with an empty
dictionary lattice it reproduces the acoustic decode exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ctc import PosteriorMatrix, build_confusion_network, ctc_lattice
from .errors import EmptyLatticeError
from .fst import Wfst, linear_acceptor
from .lexicon import LexiconFst, reweight_with_pa, tt_to_pa_lattice
from .ops import opt, shortest_path, union
from .semiring import INF, LOG
from .symbols import SymbolTable
from .tokens import MoraToken, tokenize_tt

DEFAULT_MIX = 0.5
DEFAULT_PRUNE = 10.0


@dataclass(frozen=True)
class DecodeConfig:
    mix: float = DEFAULT_MIX
    prune_threshold: float = DEFAULT_PRUNE


@dataclass
class FusionTrace:
    """Every lattice the pipeline builds, for dumping and inspection."""

    pa_confnet: Wfst | None = None
    tt_confnet: Wfst | None = None
    pa_lattice: Wfst | None = None
    tt_lattice: Wfst | None = None
    pron_lattice: Wfst | None = None
    reweighted: Wfst | None = None
    fused: Wfst | None = None


def fuse(
    pa_lattice: Wfst,
    t2p_lattice: Wfst,
    mix: float = DEFAULT_MIX,
    prune_threshold: float = INF,
) -> Wfst:
    """Optimized mixture union of the two mora lattices.

    An empty dictionary-side lattice falls back to the optimized acoustic
    lattice alone; two empty inputs are an error.
    """
    pa_empty = pa_lattice.is_empty()
    t2p_empty = t2p_lattice.is_empty()
    if pa_empty and t2p_empty:
        raise EmptyLatticeError("fuse: both lattices are empty")
    if t2p_empty:
        return opt(pa_lattice, prune_threshold)
    return opt(union(pa_lattice, t2p_lattice, mix), prune_threshold)


def text_lattice(text: str, isyms: SymbolTable) -> Wfst:
    """Single-path, probability-one text lattice from a plain transcript.

    Used when the text side comes from an external recognizer instead of a
    posterior grid. Characters missing from the table resolve to <unk> when
    registered and are added otherwise.
    """
    ids = []
    for ch in tokenize_tt(text):
        try:
            ids.append(isyms.resolve(ch))
        except KeyError:
            ids.append(isyms.add(ch))
    return linear_acceptor(ids, LOG)


def run_fusion(
    y_pa: PosteriorMatrix,
    lexicon: LexiconFst | None,
    cfg: DecodeConfig | None = None,
    y_tt: PosteriorMatrix | None = None,
    tt_lattice: Wfst | None = None,
) -> FusionTrace:
    """Build every stage of the fusion pipeline.

    The text side comes from either a posterior grid or a ready-made
    lattice (exactly one, or neither for acoustic-only traces). When the
    dictionary lattice comes out empty, ``fused`` is the acoustic lattice
    itself, so fallback decodes are bitwise identical to acoustic-only ones.
    """
    if cfg is None:
        cfg = DecodeConfig()
    if y_tt is not None and tt_lattice is not None:
        raise ValueError("pass text posteriors or a text lattice, not both")
    trace = FusionTrace()
    trace.pa_confnet = build_confusion_network(y_pa)
    trace.pa_lattice = ctc_lattice(y_pa, cfg.prune_threshold)
    if y_tt is not None:
        trace.tt_confnet = build_confusion_network(y_tt)
        trace.tt_lattice = ctc_lattice(y_tt, cfg.prune_threshold)
    elif tt_lattice is not None:
        trace.tt_lattice = tt_lattice
    if trace.tt_lattice is not None and lexicon is not None:
        trace.pron_lattice = tt_to_pa_lattice(
            trace.tt_lattice, lexicon, cfg.prune_threshold
        )
        trace.reweighted = reweight_with_pa(trace.pa_lattice, trace.pron_lattice)
    if trace.reweighted is None or trace.reweighted.is_empty():
        trace.fused = trace.pa_lattice
    else:
        trace.fused = fuse(
            trace.pa_lattice, trace.reweighted, cfg.mix, cfg.prune_threshold
        )
    return trace


def _decode_tokens(lattice: Wfst, labels: SymbolTable) -> list[MoraToken]:
    ids, _ = shortest_path(lattice)
    return [MoraToken.parse(labels.symbol(i)) for i in ids]


def decode_pa_only(y_pa: PosteriorMatrix, cfg: DecodeConfig | None = None) -> list[MoraToken]:
    """Best collapsed mora sequence from the acoustic posteriors alone."""
    if cfg is None:
        cfg = DecodeConfig()
    return _decode_tokens(ctc_lattice(y_pa, cfg.prune_threshold), y_pa.labels)


def decode_mt_lf(
    y_pa: PosteriorMatrix,
    y_tt: PosteriorMatrix | None,
    lexicon: LexiconFst | None,
    cfg: DecodeConfig | None = None,
    tt_lattice: Wfst | None = None,
) -> list[MoraToken]:
    """Lattice-fusion decode; falls back to the acoustic decode when the
    text side supports no dictionary-decomposable string."""
    trace = run_fusion(y_pa, lexicon, cfg, y_tt=y_tt, tt_lattice=tt_lattice)
    if trace.fused is None or trace.fused.is_empty():
        raise EmptyLatticeError("decode: empty acoustic lattice")
    return _decode_tokens(trace.fused, y_pa.labels)


def decode_explicit_conditioning(
    y_pa: PosteriorMatrix,
    y_tt: PosteriorMatrix | None,
    lexicon: LexiconFst | None,
    cfg: DecodeConfig | None = None,
    tt_lattice: Wfst | None = None,
) -> list[MoraToken]:
    """Decode from the reweighted dictionary lattice alone.

    Fragile by design: an empty dictionary lattice is an error here, where
    the fusion decoder would have fallen back to the acoustic lattice.
    """
    trace = run_fusion(y_pa, lexicon, cfg, y_tt=y_tt, tt_lattice=tt_lattice)
    if trace.reweighted is None or trace.reweighted.is_empty():
        raise EmptyLatticeError(
            "explicit conditioning: no dictionary-supported sequence"
        )
    return _decode_tokens(trace.reweighted, y_pa.labels)
