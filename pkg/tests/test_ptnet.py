from __future__ import annotations

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ALPHABET, expressions
from nets import border_net, single_join
from jlang.compiler import compile
from jlang.errors import NetShapeError
from jlang.ptnet import (
    Marking,
    PTSystem,
    accepts_by_simulation,
    accepts_vector,
    analyze_topology,
    is_dead,
    replay,
    split_self_loops,
    step,
    to_join_normal_form,
)
from jlang.semilinear import vectors_up_to


def test_single_join_accepts_one_token():
    net = single_join()
    assert net.is_jpt
    assert accepts_vector(net, (1,)).accepted
    assert not accepts_vector(net, (0,)).accepted
    # a leftover token leaves the marking alive only if something can consume it
    assert accepts_vector(net, (2,)).accepted


def test_leftover_tokens_reject_when_final_place_consumes():
    net = PTSystem.build(
        ["p1"],
        {"t1": (["p1", "p_init"], ["p_fin"]), "trap": (["p1", "p_fin"], ["p_trap"])},
        "p_init",
        "p_fin",
    )
    assert [v for v in vectors_up_to(1, 4) if accepts_vector(net, v)] == [(1,)]


def test_final_place_must_be_reached_only_at_the_end():
    net = PTSystem.build(
        ["a"],
        {"t1": (["a", "s"], ["f"]), "t2": (["a", "f"], ["g"])},
        "s",
        "f",
        work_places=["g"],
    )
    # after t1 the final place is marked but t2 is enabled, so the run fails
    assert not accepts_vector(net, (2,)).accepted
    assert not accepts_by_simulation(net, (2,)).accepted
    assert accepts_vector(net, (1,)).accepted


@pytest.mark.parametrize(
    "build, message",
    [
        (lambda: PTSystem.build(["a"], {"t": (["a", "s"], ["s2"])}, "s", "s"), "differ"),
        (lambda: PTSystem.build(["a"], {"t": (["a", "s"], ["f"])}, "a", "f"), "work place"),
        (lambda: PTSystem.build(["a"], {"t": (["a", "a"], ["f"])}, "s", "f"), "duplicate"),
    ],
)
def test_shape_errors(build, message):
    with pytest.raises(NetShapeError, match=message):
        build()


def test_non_jpt_needs_simulation():
    net = PTSystem.build(["a", "b"], {"t": (["a", "b", "s"], ["f"])}, "s", "f")
    assert not net.is_jpt
    with pytest.raises(NetShapeError):
        accepts_vector(net, (1, 1))
    assert accepts_by_simulation(net, (1, 1)).accepted


def test_topology_of_border_net():
    report = analyze_topology(border_net())
    assert report.is_jpt and report.composed_of_joins
    assert not report.forks
    assert sorted(report.cycle_lengths) == [2, 4]
    assert report == analyze_topology(border_net())
    json.dumps(report.to_json())


def test_topology_sequences_and_parallels():
    net = PTSystem.build(
        ["a", "b"],
        {"t1": (["a", "s"], ["m"]), "t2": (["b", "m"], ["f"]), "t3": (["b", "s"], ["f"])},
        "s",
        "f",
    )
    report = analyze_topology(net)
    assert ("t1", "t2") in report.sequences
    assert ("t1", "t3") in report.parallels


def test_fork_detected():
    net = PTSystem.build(["a"], {"t": (["s"], ["a", "f"])}, "s", "f")
    report = analyze_topology(net)
    assert report.forks and not report.composed_of_joins and not net.is_jpt


def test_normal_form_chains_multi_input_transitions():
    net = PTSystem.build(
        ["a", "b"],
        {"t": (["a", "b", "s"], ["m"]), "u": (["a", "m"], ["m"]), "v": (["b", "m"], ["f"])},
        "s",
        "f",
    )
    normal = to_join_normal_form(net)
    assert normal.is_jpt
    for v in vectors_up_to(2, 5):
        assert accepts_vector(normal, v).accepted == accepts_by_simulation(net, v).accepted


def test_normal_form_rejects_forks():
    net = PTSystem.build(["a"], {"t": (["a", "s"], ["f", "g"])}, "s", "f")
    with pytest.raises(NetShapeError, match="fork"):
        to_join_normal_form(net)


def test_normal_form_is_identity_on_jpt():
    net = border_net()
    assert to_join_normal_form(net) is net


def test_split_self_loops_preserves_acceptance():
    looped = PTSystem.build(["a", "b"], {"l": (["a", "s"], ["s"]), "e": (["b", "s"], ["f"])}, "s", "f")
    split = split_self_loops(looped)
    assert split.is_jpt and not looped.is_jpt
    for v in vectors_up_to(2, 5):
        assert accepts_vector(split, v).accepted == accepts_by_simulation(looped, v).accepted
    assert split.work_places == ("f", "s", "s_b")


def test_json_round_trip():
    net = border_net()
    assert PTSystem.from_json(json.loads(net.dumps())) == net
    assert "digraph" in net.to_dot()


def test_marking_rejects_negative():
    with pytest.raises(ValueError):
        Marking.of({"a": -1})


def test_initial_configuration_checks_length():
    with pytest.raises(ValueError):
        border_net().initial_configuration((1,))


@settings(max_examples=40)
@given(expressions, st.lists(st.integers(0, 2), min_size=3, max_size=3))
def test_single_work_token_and_input_decrease(e, v):
    net = compile(e, ALPHABET)
    inputs = set(net.input_places)
    start = net.initial_configuration(v)
    seen = {start}
    todo = [start]
    while todo:
        m = todo.pop()
        counts = m.as_dict()
        assert sum(k for p, k in counts.items() if p not in inputs) == 1
        for _, nxt in step(net, m):
            assert sum(nxt[p] for p in inputs) == sum(m[p] for p in inputs) - 1
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)


@settings(max_examples=40)
@given(expressions)
def test_search_agrees_with_simulation(e):
    net = compile(e, ALPHABET)
    for v in vectors_up_to(3, 4):
        fast = accepts_vector(net, v)
        assert fast.accepted == accepts_by_simulation(net, v).accepted
        bound = math.prod(x + 1 for x in v) * len(net.places)
        assert fast.visited <= bound
        if fast.accepted:
            assert replay(net, v, fast.witness)


def test_replay_rejects_wrong_witness():
    net = single_join()
    assert replay(net, (1,), ["t1"])
    assert not replay(net, (1,), [])
    assert not replay(net, (0,), ["t1"])


def test_dead_marking():
    net = single_join()
    assert is_dead(net, Marking.of({"p_fin": 1}))
    assert not is_dead(net, net.initial_configuration((1,)))
