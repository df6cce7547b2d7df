"""AT&T-style text serialization of automata.

One arc per line, ``src dst ilabel olabel weight`` (tab separated); final
states as ``state weight`` lines. The first state mentioned is the start
state, so the writer emits the start state's block first. Weights are
written with Python's shortest round-tripping float representation, giving
bit-exact read-after-write. Labels are written as symbol names when tables
are supplied, ids otherwise; the symbol table travels in a sidecar file
(see :class:`moralat.symbols.SymbolTable`).
"""

from __future__ import annotations

from pathlib import Path
from typing import TextIO

from .errors import FormatError
from .fst import NO_STATE, Wfst
from .semiring import LOG, Semiring
from .symbols import SymbolTable


def _label_text(label: int, table: SymbolTable | None) -> str:
    if table is None:
        return str(label)
    return table.symbol(label)


def write_fst_text(
    fst: Wfst,
    f: TextIO,
    isyms: SymbolTable | None = None,
    osyms: SymbolTable | None = None,
) -> None:
    if fst.num_states == 0 or fst.start == NO_STATE:
        return
    state_order = [fst.start] + [q for q in fst.states() if q != fst.start]
    finals = dict(fst.finals())
    if not fst.arcs(fst.start) and fst.start in finals:
        # no arcs to announce the start state; lead with its final line
        f.write(f"{fst.start}\t{finals.pop(fst.start)!r}\n")
    for q in state_order:
        for arc in fst.arcs(q):
            f.write(
                f"{q}\t{arc.nextstate}\t{_label_text(arc.ilabel, isyms)}\t"
                f"{_label_text(arc.olabel, osyms)}\t{arc.weight!r}\n"
            )
    for q in state_order:
        if q in finals:
            f.write(f"{q}\t{finals[q]!r}\n")


def save_fst(
    fst: Wfst,
    path: str | Path,
    isyms: SymbolTable | None = None,
    osyms: SymbolTable | None = None,
) -> None:
    with open(path, "w", encoding="utf-8") as f:
        write_fst_text(fst, f, isyms, osyms)


def _parse_label(text: str, table: SymbolTable | None, path: str, lineno: int) -> int:
    if table is not None:
        try:
            return table.id(text)
        except KeyError:
            raise FormatError(f"unknown symbol {text!r}", path, lineno) from None
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"bad label {text!r}", path, lineno) from None


def read_fst_text(
    f: TextIO,
    semiring: Semiring = LOG,
    isyms: SymbolTable | None = None,
    osyms: SymbolTable | None = None,
    path: str = "<fst>",
) -> Wfst:
    out = Wfst(semiring)

    def state(i: int) -> int:
        while out.num_states <= i:
            out.add_state()
        return i

    start_seen = False
    for lineno, raw in enumerate(f, 1):
        line = raw.rstrip("\n")
        if not line:
            continue
        fields = line.split("\t")
        try:
            if len(fields) == 5:
                src, dst = state(int(fields[0])), state(int(fields[1]))
                ilabel = _parse_label(fields[2], isyms, path, lineno)
                olabel = _parse_label(fields[3], osyms, path, lineno)
                out.add_arc(src, ilabel, olabel, float(fields[4]), dst)
            elif len(fields) == 2:
                src = state(int(fields[0]))
                out.set_final(src, float(fields[1]))
            else:
                raise FormatError(
                    f"expected 5 arc fields or 2 final fields, got {len(fields)}",
                    path,
                    lineno,
                )
        except ValueError as exc:
            raise FormatError(f"bad numeric field: {exc}", path, lineno) from None
        if not start_seen:
            out.set_start(int(fields[0]))
            start_seen = True
    return out


def load_fst(
    path: str | Path,
    semiring: Semiring = LOG,
    isyms: SymbolTable | None = None,
    osyms: SymbolTable | None = None,
) -> Wfst:
    with open(path, encoding="utf-8") as f:
        return read_fst_text(f, semiring, isyms, osyms, path=str(path))
