"""Lattice algebra: composition, optimization, search, and normalization.

All functions are pure; inputs are never mutated. Lattices in the decoding
pipeline are acyclic, and the algorithms that require acyclicity (weighted
determinization, shortest distance/path, pruning) reject cyclic inputs
instead of half-supporting them.
"""

from __future__ import annotations

import math
from collections import deque

from .errors import EmptyLatticeError, FstOpError
from .fst import EPSILON, NO_STATE, Wfst, connect, topological_order
from .semiring import INF, LOG

# slack for cost comparisons that decide path survival; absolute, in
# natural-log units, far below every tolerance this toolkit promises
_COST_SLACK = 1e-9
_TIE_TOL = 1e-12

# grouping precision for weight-equality during minimization
_MERGE_DIGITS = 12


def _require_same_semiring(a: Wfst, b: Wfst, op: str) -> None:
    if a.semiring is not b.semiring:
        raise FstOpError(
            f"{op}: semiring mismatch ({a.semiring.name} vs {b.semiring.name})"
        )


def _require_acceptor(a: Wfst, op: str) -> None:
    if not a.is_acceptor():
        raise FstOpError(f"{op}: input must be an acceptor (ilabel == olabel)")


def _require_epsilon_free(a: Wfst, op: str) -> None:
    if a.has_epsilon_labels():
        raise FstOpError(f"{op}: input must be epsilon-free")


def compose(a: Wfst, b: Wfst) -> Wfst:
    """Weighted composition of ``a`` with ``b``.

    The output sides of ``a`` and the input sides of ``b`` must refer to one
    shared symbol table (caller contract). Epsilon moves are sequenced by a
    two-value filter that admits exactly one interleaving of a-side and
    b-side epsilon transitions between matches, so no path weight is ever
    counted twice. The result is trimmed.
    """
    _require_same_semiring(a, b, "compose")
    sr = a.semiring
    out = Wfst(sr)
    if a.start == NO_STATE or b.start == NO_STATE:
        return out

    b_by_ilabel: list[dict[int, list]] = []
    for q in b.states():
        index: dict[int, list] = {}
        for arc in b.arcs(q):
            index.setdefault(arc.ilabel, []).append(arc)
        b_by_ilabel.append(index)

    start_key = (a.start, b.start, 0)
    state_ids = {start_key: out.add_state()}
    out.set_start(0)
    queue = deque([start_key])
    while queue:
        key = queue.popleft()
        pa, pb, flt = key
        sq = state_ids[key]

        def target(next_key):
            if next_key not in state_ids:
                state_ids[next_key] = out.add_state()
                queue.append(next_key)
            return state_ids[next_key]

        if a.is_final(pa) and b.is_final(pb):
            out.set_final(sq, sr.times(a.final_weight(pa), b.final_weight(pb)))
        for arc_a in a.arcs(pa):
            if arc_a.olabel == EPSILON:
                # a moves alone; only before any lone b-move since the last match
                if flt == 0:
                    dst = target((arc_a.nextstate, pb, 0))
                    out.add_arc(sq, arc_a.ilabel, EPSILON, arc_a.weight, dst)
            else:
                for arc_b in b_by_ilabel[pb].get(arc_a.olabel, ()):
                    dst = target((arc_a.nextstate, arc_b.nextstate, 0))
                    out.add_arc(
                        sq,
                        arc_a.ilabel,
                        arc_b.olabel,
                        sr.times(arc_a.weight, arc_b.weight),
                        dst,
                    )
        for arc_b in b.arcs(pb):
            if arc_b.ilabel == EPSILON:
                dst = target((pa, arc_b.nextstate, 1))
                out.add_arc(sq, EPSILON, arc_b.olabel, arc_b.weight, dst)
    return connect(out)


def project_output(t: Wfst) -> Wfst:
    """Acceptor over the output labels of ``t``; weights unchanged."""
    out = Wfst(t.semiring)
    out.add_states(t.num_states)
    if t.start != NO_STATE:
        out.set_start(t.start)
    for q, arc in t.all_arcs():
        out.add_arc(q, arc.olabel, arc.olabel, arc.weight, arc.nextstate)
    for q, w in t.finals():
        out.set_final(q, w)
    return out


def _epsilon_closure_dag(fst: Wfst, eps: list[list]) -> list[dict[int, float]]:
    # reverse-topological dynamic program over the epsilon subgraph
    sub = Wfst(fst.semiring)
    sub.add_states(fst.num_states)
    for q, arcs in enumerate(eps):
        for r, _ in arcs:
            sub.add_arc(q, 1, 1, 0.0, r)
    order = topological_order(sub)  # raises on an epsilon cycle
    sr = fst.semiring
    closure: list[dict[int, float]] = [{} for _ in fst.states()]
    for q in reversed(order):
        if not eps[q]:
            continue
        cl: dict[int, float] = {}
        for r, w in eps[q]:
            cl[r] = sr.plus(cl.get(r, sr.zero), w)
            for s, v in closure[r].items():
                wv = sr.times(w, v)
                cl[s] = sr.plus(cl.get(s, sr.zero), wv)
        closure[q] = cl
    return closure


def _epsilon_closure_cyclic(fst: Wfst, eps: list[list]) -> list[dict[int, float]]:
    # algebraic path closure (Lehmann) restricted to epsilon-touched states;
    # star() raises on divergent cycles
    sr = fst.semiring
    nodes = sorted(
        {q for q, arcs in enumerate(eps) if arcs}
        | {r for arcs in eps for r, _ in arcs}
    )
    idx = {q: i for i, q in enumerate(nodes)}
    k = len(nodes)
    dist = [[sr.zero] * k for _ in range(k)]
    for q, arcs in enumerate(eps):
        for r, w in arcs:
            i, j = idx[q], idx[r]
            dist[i][j] = sr.plus(dist[i][j], w)
    for m in range(k):
        sm = sr.star(dist[m][m])
        for i in range(k):
            if dist[i][m] == sr.zero:
                continue
            via = sr.times(dist[i][m], sm)
            row_m = dist[m]
            row_i = dist[i]
            for j in range(k):
                if row_m[j] == sr.zero:
                    continue
                row_i[j] = sr.plus(row_i[j], sr.times(via, row_m[j]))
    closure: list[dict[int, float]] = [{} for _ in fst.states()]
    for q in nodes:
        row = dist[idx[q]]
        closure[q] = {nodes[j]: row[j] for j in range(k) if row[j] != sr.zero}
    return closure


def rm_epsilon(t: Wfst) -> Wfst:
    """Remove full-epsilon arcs, preserving the string-to-weight map.

    Epsilon closures over a DAG are computed in topological order; a cyclic
    epsilon subgraph falls back to an algebraic closure that raises on
    divergence (cycle cost <= 0, i.e. probability mass >= 1). The result is
    trimmed. Epsilon-free inputs are returned unchanged.
    """
    if not t.has_epsilon_arcs():
        return t.copy()
    sr = t.semiring
    eps: list[list] = [
        [
            (arc.nextstate, arc.weight)
            for arc in t.arcs(q)
            if arc.ilabel == EPSILON and arc.olabel == EPSILON
        ]
        for q in t.states()
    ]
    try:
        closure = _epsilon_closure_dag(t, eps)
    except FstOpError:
        closure = _epsilon_closure_cyclic(t, eps)

    out = Wfst(sr)
    out.add_states(t.num_states)
    if t.start != NO_STATE:
        out.set_start(t.start)
    for q in t.states():
        merged: dict[tuple[int, int, int], float] = {}
        for arc in t.arcs(q):
            if arc.ilabel == EPSILON and arc.olabel == EPSILON:
                continue
            key = (arc.ilabel, arc.olabel, arc.nextstate)
            merged[key] = sr.plus(merged.get(key, sr.zero), arc.weight)
        final = t.final_weight(q)
        for r, w in sorted(closure[q].items()):
            for arc in t.arcs(r):
                if arc.ilabel == EPSILON and arc.olabel == EPSILON:
                    continue
                key = (arc.ilabel, arc.olabel, arc.nextstate)
                merged[key] = sr.plus(merged.get(key, sr.zero), sr.times(w, arc.weight))
            if t.is_final(r):
                final = sr.plus(final, sr.times(w, t.final_weight(r)))
        for (il, ol, dst), w in merged.items():
            out.add_arc(q, il, ol, w, dst)
        if final != sr.zero:
            out.set_final(q, final)
    return connect(out)


def determinize(a: Wfst) -> Wfst:
    """Weighted determinization of an epsilon-free acyclic acceptor.

    Residual-weight subset construction: each output state is a set of
    (input state, leftover weight) pairs with the common weight factored out
    onto the arc, so the weight of every string under semiring-plus is
    preserved exactly.
    """
    _require_acceptor(a, "determinize")
    _require_epsilon_free(a, "determinize")
    topological_order(a)  # rejects cyclic input
    sr = a.semiring
    out = Wfst(sr)
    if a.start == NO_STATE:
        return out

    start_key = ((a.start, sr.one),)
    state_ids = {start_key: out.add_state()}
    out.set_start(0)
    queue = deque([start_key])
    while queue:
        subset = queue.popleft()
        sq = state_ids[subset]
        final = sr.zero
        buckets: dict[int, dict[int, float]] = {}
        for q, residual in subset:
            if a.is_final(q):
                final = sr.plus(final, sr.times(residual, a.final_weight(q)))
            for arc in a.arcs(q):
                w = sr.times(residual, arc.weight)
                if w == sr.zero:
                    continue
                bucket = buckets.setdefault(arc.ilabel, {})
                bucket[arc.nextstate] = sr.plus(bucket.get(arc.nextstate, sr.zero), w)
        if final != sr.zero:
            out.set_final(sq, final)
        for label in sorted(buckets):
            entries = sorted(buckets[label].items())
            total = sr.plus_many(w for _, w in entries)
            if total == sr.zero:
                continue
            new_key = tuple((q, sr.divide(w, total)) for q, w in entries)
            if new_key not in state_ids:
                state_ids[new_key] = out.add_state()
                queue.append(new_key)
            out.add_arc(sq, label, label, total, state_ids[new_key])
    return out


def _push_weights(a: Wfst) -> Wfst:
    """Canonical weight pushing toward the start of a trim acyclic machine.

    Every state's future mass becomes one; the start state's outgoing arcs
    absorb the total so the string-to-weight map is unchanged.
    """
    sr = a.semiring
    order = topological_order(a)
    future = [sr.zero] * a.num_states
    for q in reversed(order):
        total = a.final_weight(q)
        for arc in a.arcs(q):
            total = sr.plus(total, sr.times(arc.weight, future[arc.nextstate]))
        future[q] = total
    if future[a.start] == sr.zero:
        raise FstOpError("push: no accepting path")
    out = Wfst(sr)
    out.add_states(a.num_states)
    out.set_start(a.start)
    total_mass = future[a.start]
    for q in a.states():
        extra = total_mass if q == a.start else sr.one
        for arc in a.arcs(q):
            w = sr.divide(sr.times(arc.weight, future[arc.nextstate]), future[q])
            out.add_arc(q, arc.ilabel, arc.olabel, sr.times(extra, w), arc.nextstate)
        if a.is_final(q):
            w = sr.divide(a.final_weight(q), future[q])
            out.set_final(q, sr.times(extra, w))
    return out


def minimize(a: Wfst) -> Wfst:
    """Minimize a deterministic epsilon-free acyclic acceptor.

    Weight pushing first puts arc weights into canonical form, then Moore
    partition refinement merges states with identical outgoing pictures.
    Weights are compared rounded to 12 decimals to absorb float noise.
    """
    _require_acceptor(a, "minimize")
    _require_epsilon_free(a, "minimize")
    if not a.is_deterministic():
        raise FstOpError("minimize: input is nondeterministic")
    m = connect(a)
    if m.num_states == 0:
        return m
    topological_order(m)  # rejects cyclic input
    pushed = _push_weights(m)

    def wkey(w: float) -> float:
        return round(w, _MERGE_DIGITS)

    n = pushed.num_states
    cls = [0] * n
    sig_ids: dict = {}
    for q in range(n):
        sig = (pushed.is_final(q), wkey(pushed.final_weight(q)))
        cls[q] = sig_ids.setdefault(sig, len(sig_ids))
    while True:
        sig_ids = {}
        new_cls = [0] * n
        for q in range(n):
            arcs_sig = tuple(
                sorted(
                    (arc.ilabel, wkey(arc.weight), cls[arc.nextstate])
                    for arc in pushed.arcs(q)
                )
            )
            sig = (cls[q], arcs_sig)
            new_cls[q] = sig_ids.setdefault(sig, len(sig_ids))
        if new_cls == cls:
            break
        cls = new_cls

    num_classes = len(set(cls))
    rep: dict[int, int] = {}
    for q in range(n):
        rep.setdefault(cls[q], q)
    out = Wfst(pushed.semiring)
    out.add_states(num_classes)
    out.set_start(cls[pushed.start])
    for c, q in sorted(rep.items()):
        for arc in pushed.arcs(q):
            out.add_arc(c, arc.ilabel, arc.olabel, arc.weight, cls[arc.nextstate])
        if pushed.is_final(q):
            out.set_final(c, pushed.final_weight(q))
    return out


def prune(a: Wfst, threshold: float) -> Wfst:
    """Drop everything not on an accepting path within ``threshold`` of the best.

    Costs are compared in the tropical view of the stored weights. The best
    path always survives; an infinite threshold reduces to trimming. The
    finality of a state is dropped when finishing there is itself outside
    the beam, even if the state stays on surviving through-paths.
    """
    if threshold < 0:
        raise FstOpError("prune: threshold must be nonnegative")
    order = topological_order(a)
    out = Wfst(a.semiring)
    if a.start == NO_STATE:
        return out
    n = a.num_states
    alpha = [INF] * n
    alpha[a.start] = 0.0
    for q in order:
        if alpha[q] == INF:
            continue
        for arc in a.arcs(q):
            cost = alpha[q] + arc.weight
            if cost < alpha[arc.nextstate]:
                alpha[arc.nextstate] = cost
    beta = [INF] * n
    for q in reversed(order):
        best = a.final_weight(q)
        for arc in a.arcs(q):
            cost = arc.weight + beta[arc.nextstate]
            if cost < best:
                best = cost
        beta[q] = best
    best_total = beta[a.start]
    if best_total == INF:
        return out
    limit = best_total + threshold

    def within(total: float) -> bool:
        if math.isinf(limit):
            return not math.isinf(total)
        return total <= limit + _COST_SLACK

    remap: dict[int, int] = {}
    for q in a.states():
        if within(alpha[q] + beta[q]):
            remap[q] = out.add_state()
    out.set_start(remap[a.start])
    for q, new_q in remap.items():
        for arc in a.arcs(q):
            if arc.nextstate in remap and within(alpha[q] + arc.weight + beta[arc.nextstate]):
                out.add_arc(new_q, arc.ilabel, arc.olabel, arc.weight, remap[arc.nextstate])
        if a.is_final(q) and within(alpha[q] + a.final_weight(q)):
            out.set_final(new_q, a.final_weight(q))
    return out


def _copy_states_into(dst: Wfst, src: Wfst) -> int:
    offset = dst.num_states
    dst.add_states(src.num_states)
    for q, arc in src.all_arcs():
        dst.add_arc(offset + q, arc.ilabel, arc.olabel, arc.weight, offset + arc.nextstate)
    for q, w in src.finals():
        dst.set_final(offset + q, w)
    return offset


def union(a: Wfst, b: Wfst, mix: float = 0.5) -> Wfst:
    """Mixture-weighted union: branch entry costs -log(mix) and -log(1-mix).

    In the log semiring the weight of a string s becomes
    plus(times(-log mix, w_a(s)), times(-log(1-mix), w_b(s))); with
    mix = 0.5 that is exactly the average of the two distributions.
    """
    _require_same_semiring(a, b, "union")
    if not 0.0 < mix < 1.0:
        raise FstOpError(f"union: mix weight must lie in (0, 1), got {mix}")
    out = Wfst(a.semiring)
    s0 = out.add_state()
    out.set_start(s0)
    if a.start != NO_STATE:
        offset = _copy_states_into(out, a)
        out.add_arc(s0, EPSILON, EPSILON, -math.log(mix), offset + a.start)
    if b.start != NO_STATE:
        offset = _copy_states_into(out, b)
        out.add_arc(s0, EPSILON, EPSILON, -math.log(1.0 - mix), offset + b.start)
    return out


def shortest_distance(a: Wfst) -> float:
    """Semiring-plus over all accepting-path weights of an acyclic automaton.

    In the log semiring this is the negative log of the total probability
    mass; an empty language yields zero (+inf).
    """
    if a.start == NO_STATE:
        return a.semiring.zero
    sr = a.semiring
    order = topological_order(a)
    dist = [sr.zero] * a.num_states
    dist[a.start] = sr.one
    for q in order:
        if dist[q] == sr.zero:
            continue
        for arc in a.arcs(q):
            dist[arc.nextstate] = sr.plus(
                dist[arc.nextstate], sr.times(dist[q], arc.weight)
            )
    return sr.plus_many(sr.times(dist[q], w) for q, w in a.finals())


def shortest_path(a: Wfst) -> tuple[list[int], float]:
    """Minimum-cost accepting path of an acyclic acceptor.

    Weights are read as tropical costs regardless of the stored semiring
    (the Viterbi view). Ties within 1e-12 are broken toward the
    lexicographically smallest label-id sequence; epsilons participate in
    the tie-break but are stripped from the returned sequence.
    """
    _require_acceptor(a, "shortest_path")
    if a.start == NO_STATE:
        raise EmptyLatticeError("shortest_path: empty automaton")
    order = topological_order(a)
    n = a.num_states
    beta = [INF] * n
    for q in reversed(order):
        best = a.final_weight(q)
        for arc in a.arcs(q):
            cost = arc.weight + beta[arc.nextstate]
            if cost < best:
                best = cost
        beta[q] = best
    if beta[a.start] == INF:
        raise EmptyLatticeError("shortest_path: no accepting path")
    suffix: list[tuple[int, ...] | None] = [None] * n
    for q in reversed(order):
        if beta[q] == INF:
            continue
        candidates = []
        if a.is_final(q) and a.final_weight(q) <= beta[q] + _TIE_TOL:
            candidates.append(())
        for arc in a.arcs(q):
            tail = suffix[arc.nextstate]
            if tail is None:
                continue
            if arc.weight + beta[arc.nextstate] <= beta[q] + _TIE_TOL:
                candidates.append((arc.ilabel,) + tail)
        suffix[q] = min(candidates)
    labels = [label for label in suffix[a.start] if label != EPSILON]
    return labels, beta[a.start]


def normalize_local(a: Wfst) -> Wfst:
    """Rescale each state so its outgoing mass (arcs plus finality) is one.

    Log semiring only. Topology, labels, and the within-state ranking of
    arcs are unchanged; only the local weights shift by a per-state constant.
    """
    if a.semiring is not LOG:
        raise FstOpError("normalize_local: defined over the log semiring only")
    sr = a.semiring
    out = Wfst(sr)
    out.add_states(a.num_states)
    if a.start != NO_STATE:
        out.set_start(a.start)
    for q in a.states():
        total = a.final_weight(q)
        for arc in a.arcs(q):
            total = sr.plus(total, arc.weight)
        if total == sr.zero:
            raise FstOpError(f"normalize_local: state {q} has no outgoing mass")
        for arc in a.arcs(q):
            out.add_arc(q, arc.ilabel, arc.olabel, sr.divide(arc.weight, total), arc.nextstate)
        if a.is_final(q):
            out.set_final(q, sr.divide(a.final_weight(q), total))
    return out


def opt(a: Wfst, prune_threshold: float = INF) -> Wfst:
    """Prune, remove epsilons, determinize, and minimize, in that order."""
    _require_acceptor(a, "opt")
    return minimize(determinize(rm_epsilon(prune(a, prune_threshold))))
