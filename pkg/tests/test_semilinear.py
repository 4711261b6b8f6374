from __future__ import annotations

import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ALPHABET, expressions
from jlang.corpus import random_semilinear
from jlang.errors import ResourceLimitError
from jlang.jexpr import Exponentiation, enumerate_words, parse, subexpressions
from jlang.semilinear import (
    LinearSet,
    SemilinearSet,
    build_generator,
    ls_expression,
    member,
    minkowski_sum,
    parikh,
    parikh_vector,
    plus_closure,
    run_generator,
    sorted_language,
    union,
    vectors_up_to,
)


def image(e, n):
    return {parikh_vector(w, ALPHABET) for w in enumerate_words(e, n)}


def vectors(dim, max_entry, nonzero=False):
    return st.tuples(*[st.integers(0, max_entry)] * dim).filter(lambda v: any(v) or not nonzero)


def linear_sets(dim):
    return st.builds(LinearSet, vectors(dim, 3), st.lists(vectors(dim, 2, nonzero=True), max_size=2).map(tuple))


def semilinear_sets(dim):
    return st.lists(linear_sets(dim), min_size=1, max_size=2).map(lambda cs: SemilinearSet(dim, tuple(cs)))


def brute(s: SemilinearSet, total: int) -> set:
    out = set()
    for c in s.components:
        for coeffs in itertools.product(range(total + 1), repeat=len(c.periods)):
            v = list(c.constant)
            for k, p in zip(coeffs, c.periods):
                v = [a + k * b for a, b in zip(v, p)]
            if sum(v) <= total:
                out.add(tuple(v))
    return out


def test_linear_membership():
    s = LinearSet((1, 0), ((2, 0), (0, 3)))
    assert (1, 0) in s and (3, 3) in s and (5, 6) in s
    assert (2, 0) not in s and (1, 2) not in s


def test_canonical_periods():
    assert LinearSet((0,), ((2,), (0,), (2,))).periods == ((2,),)


def test_shared_variable_exponentiation_image():
    e = parse("a^p (b c)^q c^3 a^p b^2 (c d)^q")
    s = parikh(e, ["a", "b", "c", "d"])
    assert s.components == (LinearSet((2, 3, 5, 1), ((2, 0, 0, 0), (0, 1, 2, 1))),)


@given(expressions)
def test_exponentiation_image_is_linear(e):
    for node in subexpressions(e):
        if isinstance(node, Exponentiation):
            assert len(parikh(node, ALPHABET).components) == 1


@settings(max_examples=60)
@given(expressions)
def test_parikh_matches_enumeration(e):
    n = 6
    s = parikh(e, ALPHABET)
    img = image(e, n)
    for v in vectors_up_to(3, n):
        assert member(s, v) == (v in img)


@given(semilinear_sets(2), semilinear_sets(2))
def test_union_and_sum(a, b):
    u, m = union(a, b), minkowski_sum(a, b)
    for v in vectors_up_to(2, 6):
        assert member(u, v) == (member(a, v) or member(b, v))
        split = any(
            member(a, x) and member(b, tuple(p - q for p, q in zip(v, x)))
            for x in itertools.product(range(v[0] + 1), range(v[1] + 1))
        )
        assert member(m, v) == split


@given(semilinear_sets(2))
def test_plus_closure_is_k_fold_sum(a):
    limit = 6
    base = {v for v in brute(a, 2 * limit) if max(v) <= limit}
    sums = set(base)
    frontier = set(base)
    while frontier:
        frontier = {
            (x[0] + y[0], x[1] + y[1]) for x in frontier for y in base if max(x[0] + y[0], x[1] + y[1]) <= limit
        } - sums
        sums |= frontier
    c = plus_closure(a)
    for v in itertools.product(range(limit + 1), repeat=2):
        assert member(c, v) == (v in sums)


@given(semilinear_sets(3), st.integers(0, 8))
def test_generator_realises_the_set(s, bound):
    assert run_generator(build_generator(s), bound) == brute(s, bound)


def test_generator_of_empty_set():
    assert run_generator(build_generator(SemilinearSet.empty(2)), 5) == set()


@settings(max_examples=50)
@given(st.integers(0, 10_000))
def test_ls_expression_language(seed):
    s = random_semilinear(random.Random(seed))
    alphabet = tuple("abc"[: s.dimension])
    e = ls_expression(s, alphabet)
    got = enumerate_words(e, 8)
    assert got == sorted_language(s, alphabet, 8)
    for w in got:
        assert list(w) == sorted(w, key=alphabet.index)
        assert member(s, parikh_vector(w, alphabet))


def test_ls_expression_subsets_and_eps():
    s = SemilinearSet.linear((0, 0), [(1, 0), (0, 2)])
    e = ls_expression(s, ("a", "b"))
    expected = {"", "a", "aa", "aaa", "aaaa", "bb", "abb", "aabb", "bbbb"}
    assert enumerate_words(e, 4) == {tuple(w) for w in expected}


def test_ls_expression_term_cap():
    s = SemilinearSet.linear((1, 1), [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)])
    with pytest.raises(ResourceLimitError):
        ls_expression(s, ("a", "b"), max_terms=8)


@given(semilinear_sets(3))
def test_json_round_trip(s):
    data = json.loads(json.dumps(s.to_json(["a", "b", "c"])))
    assert SemilinearSet.from_json(data) == s
    assert data["alphabet"] == ["a", "b", "c"]
