"""Pronunciation dictionaries compiled to character-to-mora transducers.

The dictionary transducer accepts any concatenation of one or more entry
surfaces on its input side and emits the corresponding mora sequences,
character by character with epsilon padding on the shorter side, closed
through the start state. All its weights are one: when a word has several
pronunciations they start out equally plausible, and relative weighting is
injected later from the acoustic mora lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import zip_longest
from pathlib import Path

from .errors import FormatError
from .fst import EPSILON, Wfst
from .ops import compose, normalize_local, opt, project_output
from .semiring import INF, LOG
from .symbols import SymbolTable, UNKNOWN_SYMBOL
from .tokens import MoraToken, TokenizeError, tokenize_pa, tokenize_tt


@dataclass(frozen=True)
class DictEntry:
    surface: str
    pron: tuple[MoraToken, ...]

    def __post_init__(self):
        if not self.surface:
            raise ValueError("dictionary entry with empty surface")
        if not self.pron:
            raise ValueError("dictionary entry with empty pronunciation")


@dataclass(frozen=True)
class LexiconFst:
    """Character-to-mora transducer plus the symbol tables for both sides."""

    fst: Wfst
    isyms: SymbolTable
    osyms: SymbolTable


def load_dict_entries(path: str | Path) -> list[DictEntry]:
    """Read the TSV dictionary: ``surface<TAB>space-separated morae``.

    Comment lines start with ``#``. Entries whose pronunciation field is
    empty are discarded; duplicate (surface, pronunciation) pairs collapse
    to one.
    """
    entries: list[DictEntry] = []
    seen: set[tuple[str, tuple[MoraToken, ...]]] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if "\t" not in line:
                raise FormatError("expected 'surface<TAB>pronunciation'", str(path), lineno)
            surface_raw, pron_text = line.split("\t", 1)
            surface = "".join(tokenize_tt(surface_raw))
            if not surface:
                raise FormatError("empty surface", str(path), lineno)
            chunks = pron_text.split()
            if not chunks:
                continue  # null pronunciation: discard, keep loading
            try:
                pron = tuple(MoraToken.parse(chunk) for chunk in chunks)
            except TokenizeError as exc:
                raise FormatError(f"bad pronunciation: {exc}", str(path), lineno) from None
            key = (surface, pron)
            if key in seen:
                continue
            seen.add(key)
            entries.append(DictEntry(surface, pron))
    return entries


def build_lexicon(
    entries: list[DictEntry],
    isyms: SymbolTable | None = None,
    osyms: SymbolTable | None = None,
) -> LexiconFst:
    """Compile entries into the closed character-to-mora transducer.

    Symbols are added to the supplied tables in place (pass the posterior
    label tables so ids line up for composition); fresh tables are created
    when none are given.
    """
    if not entries:
        raise ValueError("cannot build a lexicon from zero entries")
    if isyms is None:
        isyms = SymbolTable()
    if osyms is None:
        osyms = SymbolTable()
    isyms.add(UNKNOWN_SYMBOL)
    fst = Wfst(LOG)
    entry_start = fst.add_state()
    entry_end = fst.add_state()
    fst.set_start(entry_start)
    fst.set_final(entry_end)
    fst.add_arc(entry_end, EPSILON, EPSILON, 0.0, entry_start)
    for entry in entries:
        chars = [isyms.add(c) for c in entry.surface]
        morae = [osyms.add(m.render()) for m in entry.pron]
        pairs = list(zip_longest(chars, morae, fillvalue=EPSILON))
        src = entry_start
        for i, (ilabel, olabel) in enumerate(pairs):
            dst = entry_end if i == len(pairs) - 1 else fst.add_state()
            fst.add_arc(src, ilabel, olabel, 0.0, dst)
            src = dst
    return LexiconFst(fst, isyms, osyms)


def tt_to_pa_lattice(
    tt_lattice: Wfst, lexicon: LexiconFst, prune_threshold: float = INF
) -> Wfst:
    """Mora lattice induced by pushing a text lattice through the dictionary.

    Text strings that do not decompose into dictionary entries contribute
    nothing; when no string decomposes at all the returned lattice is empty,
    which downstream fusion treats as a fallback signal rather than an error.
    """
    raw = compose(tt_lattice, lexicon.fst)
    if raw.is_empty():
        return Wfst(LOG)
    return opt(project_output(raw), prune_threshold)


def reweight_with_pa(pa_lattice: Wfst, t2p: Wfst) -> Wfst:
    """Weight pronunciation variants by the acoustic mora lattice.

    Intersects the two mora lattices and locally renormalizes each state,
    yielding a proper distribution over the dictionary-supported sequences.
    An empty intersection returns an empty lattice (fallback signal).
    """
    if pa_lattice.is_empty() or t2p.is_empty():
        return Wfst(LOG)
    raw = compose(pa_lattice, t2p)
    if raw.is_empty():
        return Wfst(LOG)
    return normalize_local(raw)
