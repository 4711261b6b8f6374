from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ALPHABET, expressions
from jlang.errors import JParseError, ResourceLimitError, ValidationError
from jlang.jexpr import (
    EPS,
    Concat,
    Exponentiation,
    Fixed,
    Plus,
    Sym,
    Union,
    Var,
    check,
    enumerate_words,
    format_word,
    length,
    matches,
    normalize,
    parse,
    parse_word,
    subexpressions,
    to_text,
    validate,
    words_up_to,
)


def words(text: str, n: int = 6) -> set[str]:
    return {format_word(w) for w in enumerate_words(parse(text), n)}


def test_union_with_eps():
    assert words("a | eps") == {"a", "ε"}


def test_shared_variable_language():
    e = parse("a^p b^3 a^p")
    assert matches(e, tuple("abbba"))
    assert matches(e, tuple("aabbbaa"))
    assert not matches(e, tuple("aabbba"))
    assert not matches(e, tuple("bbb"))
    assert words("a^p b^3 a^p", 9) == {"abbba", "aabbbaa", "aaabbbaaa"}


def test_exponent_grouping():
    e = parse("a^p (b c)^q c^3 a^p b^2 (c d)^q")
    assert isinstance(e, Exponentiation)
    assert [x for _, x in e.terms] == [Var("p"), Var("q"), Fixed(3), Var("p"), Fixed(2), Var("q")]


def test_normalize_expands_fixed_exponents():
    e = parse("a^p (b c)^q c^3 a^p b^2 (c d)^q")
    assert to_text(normalize(e)) == "a^p (b c)^q c c c a^p b b (c d)^q"


def test_run_ends_at_union_and_closure():
    e = parse("a^p b (c | a) b+")
    assert isinstance(e, Concat)
    assert isinstance(e.factors[0], Exponentiation)
    assert isinstance(e.factors[1], Union)
    assert e.factors[2] == Plus(Sym("b"))


def test_parenthesised_union_is_not_closed():
    assert parse("(a | b) c") == Concat((Union(Sym("a"), Sym("b")), Sym("c")))


def test_multi_letter_symbols():
    e = parse("ab^p cd", ["ab", "cd"])
    assert matches(e, ("ab", "ab", "cd"))
    assert parse_word("ab ab cd", ["ab", "cd"]) == ("ab", "ab", "cd")


@pytest.mark.parametrize(
    "text",
    ["", "a |", "(a", "a^0", "a^", "a)", "a # b"],
)
def test_parse_errors(text):
    with pytest.raises(JParseError):
        parse(text)


def test_unknown_symbol_against_alphabet():
    with pytest.raises(JParseError):
        parse("a d", ALPHABET)


def test_variable_symbol_clash():
    with pytest.raises(JParseError):
        parse("a^b b")


@pytest.mark.parametrize(
    "e, rule",
    [
        (parse("a^p | b^p"), "reused"),
        (Exponentiation(((Union(Sym("a"), Sym("b")), Var("p")),)), "union"),
        (Exponentiation(((Plus(Sym("a")), Var("p")),)), "positive closure"),
        (Concat((Sym("a"), EPS)), "ε"),
        (Plus(EPS), "ε"),
        (Exponentiation(((Sym("a"), Fixed(0)),)), "below 1"),
    ],
)
def test_validation_names_the_rule(e, rule):
    problems = validate(e)
    assert problems and any(rule in p.rule for p in problems)
    with pytest.raises(ValidationError):
        check(e)


def test_validation_alphabet():
    assert validate(parse("a b"), ["a"])


def test_cardinality_cap():
    with pytest.raises(ResourceLimitError):
        enumerate_words(parse("(a | b | c)+"), 12, cap=1000)


@given(expressions)
def test_print_parse_round_trip(e):
    assert parse(to_text(e)) == e


@given(expressions)
def test_generated_expressions_are_valid(e):
    assert validate(e, ALPHABET) == []


@settings(max_examples=60)
@given(expressions)
def test_matcher_agrees_with_enumeration(e):
    n = 5
    lang = enumerate_words(e, n)
    for w in words_up_to(ALPHABET, n):
        assert matches(e, w) == (w in lang)


@settings(max_examples=80)
@given(expressions)
def test_normalize_preserves_language(e):
    assert enumerate_words(normalize(e), 8) == enumerate_words(e, 8)


@given(expressions)
def test_normalize_does_not_shrink(e):
    n = normalize(e)
    assert length(n) >= length(e)
    fixed = [x for node in _exponentiations(e) for _, x in node.terms if isinstance(x, Fixed)]
    if all(x.value == 1 for x in fixed):
        assert length(n) == length(e)


def _exponentiations(e):
    return [n for n in subexpressions(e) if isinstance(n, Exponentiation)]


bases = st.lists(st.sampled_from(ALPHABET), min_size=0, max_size=2).map(
    lambda xs: EPS if not xs else Sym(xs[0]) if len(xs) == 1 else Concat(tuple(map(Sym, xs)))
)
exponents = st.one_of(st.integers(1, 2).map(Fixed), st.sampled_from(("x", "y")).map(Var))


@given(st.lists(st.tuples(bases, exponents), min_size=1, max_size=3))
def test_exponentiation_term_and_epsilon(terms):
    lang = enumerate_words(Exponentiation(tuple(terms)), 6)
    if () in lang:
        assert lang == {()}
    if len(lang) > 1:
        assert () not in lang


def test_words_up_to_counts():
    assert sum(1 for _ in words_up_to(("a", "b"), 3)) == sum(2**k for k in range(4))
    assert list(itertools.islice(words_up_to(("a",), 2), 3)) == [(), ("a",), ("a", "a")]
