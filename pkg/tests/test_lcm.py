from __future__ import annotations

import json

import pytest
from hypothesis import given, settings

from conftest import ALPHABET, expressions
from jlang.errors import SpaceBoundViolation
from jlang.jexpr import matches, parse, words_up_to
from jlang.lcm import POSITIVE, ZERO, LCMachine, Move, build_lcm, replay, run_lcm


def test_shared_exponent_machine():
    m = build_lcm(parse("a^p b^3 a^p"))
    run = run_lcm(m, tuple("aabbbaa"))
    assert run.accepted and run.max_counter_seen == 2
    assert replay(m, tuple("aabbbaa"), run.witness)
    assert not run_lcm(m, tuple("aabbba")).accepted


def test_empty_word():
    m = build_lcm(parse("a | eps"))
    assert run_lcm(m, ()).accepted
    assert run_lcm(m, ("a",)).accepted
    assert not run_lcm(m, ("a", "a")).accepted


def test_counter_per_extra_occurrence():
    assert build_lcm(parse("a^p b^p c^p")).counters == 2
    assert build_lcm(parse("a^p b c")).counters == 0


def test_unguarded_decrement_rejected():
    with pytest.raises(ValueError, match="guarded"):
        LCMachine(("s", "f"), "s", "f", 1, ("a",), (Move("s", "a", "f", (), ((0, -1),)),))


def test_space_bound_violation():
    # an epsilon loop that keeps incrementing outgrows any input
    m = LCMachine(("s", "f"), "s", "f", 1, ("a",), (Move("s", None, "s", (), ((0, 1),)), Move("s", "a", "f")))
    with pytest.raises(SpaceBoundViolation):
        run_lcm(m, ("a",))


def test_unknown_symbol():
    with pytest.raises(ValueError):
        run_lcm(build_lcm(parse("a")), ("z",))


def test_replay_rejects_bad_witness():
    m = build_lcm(parse("a b"))
    run = run_lcm(m, ("a", "b"))
    assert replay(m, ("a", "b"), run.witness)
    assert not replay(m, ("a", "b"), run.witness[:-1])
    assert not replay(m, ("a", "b"), (len(m.moves),))


def test_json_round_trip():
    m = build_lcm(parse("a^p (b c)^q c^3 a^p b^2 (c d)^q"))
    assert LCMachine.from_json(json.loads(m.dumps())) == m
    assert "digraph" in m.to_dot()


@settings(max_examples=50)
@given(expressions)
def test_machine_agrees_with_matcher(e):
    m = build_lcm(e, ALPHABET)
    for w in words_up_to(ALPHABET, 5):
        run = run_lcm(m, w)
        assert run.accepted == matches(e, w)
        assert run.max_counter_seen <= len(w)
        n = len(w)
        assert run.visited <= len(m.states) * (n + 1) * (n + 1) ** m.counters
        if run.accepted:
            assert replay(m, w, run.witness)


@given(expressions)
def test_decrements_are_guarded(e):
    m = build_lcm(e, ALPHABET)
    for mv in m.moves:
        for c, d in mv.actions:
            if d < 0:
                assert (c, POSITIVE) in mv.guards
        assert all(g in (ZERO, POSITIVE) for _, g in mv.guards)
