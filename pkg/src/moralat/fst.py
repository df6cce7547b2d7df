"""Weighted finite-state acceptors and transducers.

A :class:`Wfst` is built once with ``add_state`` / ``add_arc`` / ``set_start``
/ ``set_final`` and treated as immutable afterwards; every algorithm in
:mod:`moralat.ops` is a pure function returning a new automaton, so built
machines can be shared freely across threads.

Label id 0 is reserved for epsilon (the empty label). The CTC blank is an
ordinary non-epsilon label and lives in the symbol table like any other.
"""

from __future__ import annotations

import heapq
from typing import Iterator, NamedTuple, Sequence

from .errors import FstOpError
from .semiring import INF, LOG, Semiring

EPSILON = 0
NO_STATE = -1


class Arc(NamedTuple):
    ilabel: int
    olabel: int
    weight: float
    nextstate: int


class Wfst:
    """A weighted automaton: arc lists per state, one start, final weights."""

    __slots__ = ("semiring", "start", "_arcs", "_finals")

    def __init__(self, semiring: Semiring = LOG):
        self.semiring = semiring
        self.start = NO_STATE
        self._arcs: list[list[Arc]] = []
        self._finals: dict[int, float] = {}

    # construction

    def add_state(self) -> int:
        self._arcs.append([])
        return len(self._arcs) - 1

    def add_states(self, n: int) -> None:
        for _ in range(n):
            self._arcs.append([])

    def add_arc(self, src: int, ilabel: int, olabel: int, weight: float, dst: int) -> None:
        self._check_state(src)
        self._check_state(dst)
        if ilabel < 0 or olabel < 0:
            raise ValueError(f"negative label on arc {src}->{dst}")
        self._arcs[src].append(Arc(ilabel, olabel, float(weight), dst))

    def set_start(self, state: int) -> None:
        self._check_state(state)
        self.start = state

    def set_final(self, state: int, weight: float | None = None) -> None:
        self._check_state(state)
        self._finals[state] = self.semiring.one if weight is None else float(weight)

    def _check_state(self, state: int) -> None:
        if not 0 <= state < len(self._arcs):
            raise ValueError(f"unknown state id {state}")

    # accessors

    @property
    def num_states(self) -> int:
        return len(self._arcs)

    def num_arcs(self) -> int:
        return sum(len(arcs) for arcs in self._arcs)

    def states(self) -> range:
        return range(len(self._arcs))

    def arcs(self, state: int) -> list[Arc]:
        """Arc list of a state. Treat as read-only."""
        return self._arcs[state]

    def all_arcs(self) -> Iterator[tuple[int, Arc]]:
        for q, arcs in enumerate(self._arcs):
            for arc in arcs:
                yield q, arc

    def is_final(self, state: int) -> bool:
        return state in self._finals

    def final_weight(self, state: int) -> float:
        return self._finals.get(state, self.semiring.zero)

    def finals(self) -> list[tuple[int, float]]:
        return sorted(self._finals.items())

    def is_acceptor(self) -> bool:
        return all(arc.ilabel == arc.olabel for _, arc in self.all_arcs())

    def has_epsilon_arcs(self) -> bool:
        """True if any arc is a full epsilon arc (both labels empty)."""
        return any(
            arc.ilabel == EPSILON and arc.olabel == EPSILON for _, arc in self.all_arcs()
        )

    def has_epsilon_labels(self) -> bool:
        return any(
            arc.ilabel == EPSILON or arc.olabel == EPSILON for _, arc in self.all_arcs()
        )

    def is_deterministic(self) -> bool:
        """At most one outgoing arc per (state, input label)."""
        for arcs in self._arcs:
            seen = set()
            for arc in arcs:
                if arc.ilabel in seen:
                    return False
                seen.add(arc.ilabel)
        return True

    def is_empty(self) -> bool:
        """True when the automaton has no accepting path."""
        if self.start == NO_STATE or not self._arcs:
            return True
        seen = {self.start}
        stack = [self.start]
        while stack:
            q = stack.pop()
            if q in self._finals:
                return False
            for arc in self._arcs[q]:
                if arc.nextstate not in seen:
                    seen.add(arc.nextstate)
                    stack.append(arc.nextstate)
        return True

    def copy(self) -> "Wfst":
        out = Wfst(self.semiring)
        out.start = self.start
        out._arcs = [list(arcs) for arcs in self._arcs]
        out._finals = dict(self._finals)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Wfst):
            return NotImplemented
        return (
            self.semiring is other.semiring
            and self.start == other.start
            and self._arcs == other._arcs
            and self._finals == other._finals
        )

    def __repr__(self) -> str:
        return (
            f"<Wfst {self.semiring.name} states={self.num_states} "
            f"arcs={self.num_arcs()} start={self.start} finals={len(self._finals)}>"
        )


def topological_order(fst: Wfst) -> list[int]:
    """States in topological order; raises FstOpError on a cycle."""
    n = fst.num_states
    indegree = [0] * n
    for _, arc in fst.all_arcs():
        indegree[arc.nextstate] += 1
    ready = [q for q in range(n) if indegree[q] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        q = heapq.heappop(ready)
        order.append(q)
        for arc in fst.arcs(q):
            indegree[arc.nextstate] -= 1
            if indegree[arc.nextstate] == 0:
                heapq.heappush(ready, arc.nextstate)
    if len(order) != n:
        raise FstOpError("automaton contains a cycle")
    return order


def is_acyclic(fst: Wfst) -> bool:
    try:
        topological_order(fst)
        return True
    except FstOpError:
        return False


def accessible_states(fst: Wfst) -> set[int]:
    if fst.start == NO_STATE:
        return set()
    seen = {fst.start}
    stack = [fst.start]
    while stack:
        q = stack.pop()
        for arc in fst.arcs(q):
            if arc.nextstate not in seen:
                seen.add(arc.nextstate)
                stack.append(arc.nextstate)
    return seen


def coaccessible_states(fst: Wfst) -> set[int]:
    back: list[list[int]] = [[] for _ in fst.states()]
    for q, arc in fst.all_arcs():
        back[arc.nextstate].append(q)
    seen = {q for q, _ in fst.finals()}
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in back[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def connect(fst: Wfst) -> Wfst:
    """Trim: keep only states on some accepting path, preserving state order."""
    keep = accessible_states(fst) & coaccessible_states(fst)
    out = Wfst(fst.semiring)
    if fst.start not in keep:
        return out
    remap = {}
    for q in fst.states():
        if q in keep:
            remap[q] = out.add_state()
    out.set_start(remap[fst.start])
    for q in fst.states():
        if q not in keep:
            continue
        for arc in fst.arcs(q):
            if arc.nextstate in keep:
                out.add_arc(remap[q], arc.ilabel, arc.olabel, arc.weight, remap[arc.nextstate])
        if fst.is_final(q):
            out.set_final(remap[q], fst.final_weight(q))
    return out


def linear_acceptor(
    labels: Sequence[int],
    semiring: Semiring = LOG,
    weights: Sequence[float] | None = None,
    final_weight: float | None = None,
) -> Wfst:
    """Single-path acceptor spelling ``labels``; weights default to one."""
    out = Wfst(semiring)
    out.add_states(len(labels) + 1)
    out.set_start(0)
    for i, label in enumerate(labels):
        w = semiring.one if weights is None else weights[i]
        out.add_arc(i, label, label, w, i + 1)
    out.set_final(len(labels), final_weight)
    return out
