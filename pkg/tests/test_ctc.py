import math
import random

import numpy as np
import pytest

from moralat.ctc import (
    PosteriorMatrix,
    build_blank_remover,
    build_confusion_network,
    ctc_lattice,
    load_posterior_file,
    save_posterior_file,
)
from moralat.errors import FormatError
from moralat.fst import linear_acceptor
from moralat.ops import compose, project_output, rm_epsilon, shortest_distance, shortest_path
from moralat.semiring import INF
from moralat.symbols import BLANK_SYMBOL, SymbolTable

from tests.conftest import matrix_from_probs, random_posterior_matrix
from tests.oracles import ctc_string_probs, maps_close, weight_map


def collapse_via_remover(remover, labels, frames):
    lattice = rm_epsilon(project_output(compose(linear_acceptor(frames), remover)))
    return set(weight_map(lattice))


def test_confusion_network_single_frame():
    y = matrix_from_probs([{"a": 0.7, BLANK_SYMBOL: 0.3}], ["a"])
    net = build_confusion_network(y)
    assert net.num_states == 2
    weights = sorted(arc.weight for arc in net.arcs(0))
    assert weights == pytest.approx(
        sorted([-math.log(0.3), -math.log(0.7)]), abs=1e-12
    )


def test_confusion_network_two_frames_mass_one():
    y = matrix_from_probs(
        [{"a": 0.6, BLANK_SYMBOL: 0.4}, {"a": 0.5, BLANK_SYMBOL: 0.5}], ["a"]
    )
    net = build_confusion_network(y)
    assert net.num_states == 3
    assert net.num_arcs() == 4
    assert shortest_distance(net) == pytest.approx(0.0, abs=1e-12)


def test_confusion_network_three_phone_shape():
    # a three-phoneme-plus-blank grid: every timestamp state fans out over all four
    y = matrix_from_probs(
        [
            {"a": 0.4, "i": 0.3, "e": 0.2, BLANK_SYMBOL: 0.1},
            {"a": 0.25, "i": 0.25, "e": 0.25, BLANK_SYMBOL: 0.25},
        ],
        ["a", "i", "e"],
    )
    net = build_confusion_network(y)
    for t in range(2):
        assert len(net.arcs(t)) == 4
        assert {arc.ilabel for arc in net.arcs(t)} == {1, 2, 3, 4}


def test_blank_remover_collapses_blank_separated_repeats():
    table = SymbolTable([BLANK_SYMBOL, "a"])
    remover = build_blank_remover(table)
    blank, a = table.id(BLANK_SYMBOL), table.id("a")
    assert collapse_via_remover(remover, table, [a, blank, a]) == {(a, a)}
    assert collapse_via_remover(remover, table, [a, a, a]) == {(a,)}
    assert collapse_via_remover(remover, table, [blank, blank]) == {()}


def test_blank_remover_state_count_matches_label_count():
    table = SymbolTable([BLANK_SYMBOL, "a", "i", "e"])
    remover = build_blank_remover(table)
    assert remover.num_states == 4  # one per phoneme plus the fresh state


def test_blank_remover_bounded_run_variant():
    table = SymbolTable([BLANK_SYMBOL, "a"])
    remover = build_blank_remover(table, max_run=2)
    a = table.id("a")
    assert collapse_via_remover(remover, table, [a, a]) == {(a,)}
    assert collapse_via_remover(remover, table, [a, a, a]) == {(a, a)}


def test_ctc_lattice_two_frame_hand_case():
    y = matrix_from_probs(
        [{"a": 0.6, BLANK_SYMBOL: 0.4}, {"a": 0.5, BLANK_SYMBOL: 0.5}], ["a"]
    )
    lat = ctc_lattice(y, INF)
    wm = weight_map(lat)
    a = y.labels.id("a")
    assert wm[(a,)] == pytest.approx(0.8, abs=1e-12)  # paths aa, a_, _a
    assert wm[()] == pytest.approx(0.2, abs=1e-12)


def test_ctc_lattice_conserves_mass(rng):
    for _ in range(20):
        y = random_posterior_matrix(rng, rng.randint(1, 5), rng.randint(2, 4))
        lat = ctc_lattice(y, INF)
        assert shortest_distance(lat) == pytest.approx(0.0, abs=1e-9)


def test_ctc_lattice_one_hot_single_path():
    y = matrix_from_probs(
        [
            {"a": 1.0},
            {BLANK_SYMBOL: 1.0},
            {"b": 1.0},
        ],
        ["a", "b"],
    )
    lat = ctc_lattice(y, INF)
    labels, cost = shortest_path(lat)
    assert [y.labels.symbol(l) for l in labels] == ["a", "b"]
    assert cost == pytest.approx(0.0, abs=1e-12)
    assert len(weight_map(lat)) == 1


def test_ctc_lattice_matches_brute_force(rng):
    for _ in range(25):
        frames, width = rng.randint(1, 6), rng.randint(2, 4)
        y = random_posterior_matrix(rng, frames, width)
        lat = ctc_lattice(y, INF)
        ids = [y.label_id(k) for k in range(width)]
        expected = ctc_string_probs(y.log_probs, 0, ids)
        assert maps_close(weight_map(lat), expected, 1e-9)


def test_ctc_lattice_one_hot_matches_argmax_collapse(rng):
    table_labels = ["a", "b", "c"]
    seq = [random.Random(5).choice([BLANK_SYMBOL] + table_labels) for _ in range(6)]
    y = matrix_from_probs([{s: 1.0} for s in seq], table_labels)
    lat = ctc_lattice(y, INF)
    labels, _ = shortest_path(lat)
    collapsed = []
    prev = None
    for s in seq:
        if s != prev:
            collapsed.append(s)
        prev = s
    collapsed = [s for s in collapsed if s != BLANK_SYMBOL]
    assert [y.labels.symbol(l) for l in labels] == collapsed


def test_posterior_file_roundtrip(tmp_path, rng):
    y = random_posterior_matrix(rng, 3, 3, labels=["ハ", "シ'"])
    path = tmp_path / "grid.post"
    save_posterior_file(path, y)
    back = load_posterior_file(path)
    assert np.array_equal(back.log_probs, y.log_probs)
    assert list(back.labels.items()) == list(y.labels.items())


def test_posterior_validation_rejects_bad_rows():
    table_err = pytest.raises(FormatError)
    with table_err:
        PosteriorMatrix(np.log([[0.4, 0.4]]), SymbolTable([BLANK_SYMBOL, "a"]))
    with pytest.raises(FormatError):
        PosteriorMatrix(np.log([[0.5, 0.5]]), SymbolTable(["a", "b"]))  # no blank
    with pytest.raises(FormatError):
        PosteriorMatrix(np.log([[1.0]]), SymbolTable([BLANK_SYMBOL]))  # one column


def test_posterior_file_errors(tmp_path):
    ragged = tmp_path / "ragged.post"
    ragged.write_text("<blank>\ta\n0.0\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_posterior_file(ragged)
    unnormalized = tmp_path / "bad.post"
    unnormalized.write_text(
        "<blank>\ta\n-0.9162907318741551\t-0.9162907318741551\n", encoding="utf-8"
    )
    with pytest.raises(FormatError):
        load_posterior_file(unnormalized)
