from __future__ import annotations

import pytest
from hypothesis import given, settings

from conftest import ALPHABET, expressions
from nets import border_net, single_join
from jlang.compiler import (
    BorderAnalysis,
    border_analysis,
    compile,
    extract_expression,
    shuffle_form,
    size_bound,
)
from jlang.errors import IncompleteAnalysisError, JLangError, NetShapeError
from jlang.jexpr import enumerate_words, parse, to_text, variables
from jlang.ptnet import PTSystem, accepts_vector, analyze_topology
from jlang.semilinear import parikh_vector, vectors_up_to


def accepted(net, dim, n):
    return {v for v in vectors_up_to(dim, n) if accepts_vector(net, v)}


def image(e, alphabet, n):
    return {parikh_vector(w, alphabet) for w in enumerate_words(e, n)}


def test_compile_single_symbol():
    net = compile(parse("a"))
    assert net.input_places == ("p_a",)
    assert net.is_jpt
    assert accepted(net, 1, 4) == {(1,)}
    assert len(net.places) == 4 and len(net.transitions) == 2


def test_compile_shared_exponent():
    net = compile(parse("a^p b^3 a^p"), ["a", "b"])
    assert accepted(net, 2, 9) == {(2, 3), (4, 3), (6, 3)}


def test_compile_eps_uses_flag():
    net = compile(parse("a | eps"))
    assert net.accepts_empty
    assert accepted(net, 1, 3) == {(0,), (1,)}


def test_shuffle_form_keeps_parikh_image():
    e = parse("a^p (b c)^q c^3 a^p b^2 (c d)^q")
    alphabet = ["a", "b", "c", "d"]
    assert not variables(shuffle_form(e))
    assert image(shuffle_form(e), alphabet, 12) == image(e, alphabet, 12)


def test_symbol_place_name_clash():
    e = parse("init fin", ["init", "fin"])
    net = compile(e)
    assert len(set(net.places)) == len(net.places)
    assert accepted(net, 2, 3) == {(1, 1)}


@settings(max_examples=60)
@given(expressions)
def test_compiled_net_accepts_parikh_image(e):
    net = compile(e, ALPHABET)
    assert net.is_jpt and analyze_topology(net).composed_of_joins
    assert accepted(net, 3, 5) == image(e, ALPHABET, 5)


@given(expressions)
def test_compiled_size(e):
    net = compile(e, ALPHABET)
    k = size_bound(e)
    assert len(net.places) <= 2 * k + len(ALPHABET) + 3
    assert len(net.transitions) <= 4 * (k + 1) ** 2 + len(ALPHABET)


@settings(max_examples=30)
@given(expressions)
def test_extract_after_compile(e):
    net = compile(e, ALPHABET)
    extracted, analysis = extract_expression(net, bound=5)
    assert analysis.certified
    assert image(extracted, analysis.symbols, 5) == image(e, ALPHABET, 5)


def test_extract_border_example():
    e, analysis = extract_expression(border_net(), bound=16)
    assert analysis.borders == ((4, 6),)
    assert analysis.added == {(4, 6): ((1, 3), (2, 0))}
    assert to_text(e) == "p1^4 p2^6 | p1^4 (p1 p1)^k1 p2^6 | p1^4 p1^k2 p2^6 (p2 p2 p2)^k2"


def test_extract_single_join():
    # without a trap the final place ignores leftover tokens
    e, analysis = extract_expression(single_join())
    assert analysis.borders == ((1,),) and analysis.added == {(1,): ((1,),)}
    assert to_text(e) == "p1 | p1 p1^k1"


def test_extract_rejects_empty_language():
    net = PTSystem.build(["a"], {"t": (["a", "s"], ["m"])}, "s", "f")
    with pytest.raises(JLangError):
        extract_expression(net)


def test_extract_needs_jpt():
    net = PTSystem.build(["a", "b"], {"t": (["a", "b", "s"], ["f"])}, "s", "f")
    with pytest.raises(NetShapeError):
        extract_expression(net)


def test_extract_budget_reports_partial():
    with pytest.raises(IncompleteAnalysisError) as info:
        extract_expression(border_net(), max_paths=15)
    assert not info.value.partial.certified
    e, analysis = extract_expression(border_net(), max_paths=15, allow_partial=True)
    assert not analysis.certified
    assert to_text(e) == "p1^4 p2^6 | p1^4 (p1 p1)^k1 p2^6"


def test_analysis_json_round_trip():
    analysis = border_analysis(border_net())
    data = analysis.to_json()
    assert data["added"] == {"4,6": [[1, 3], [2, 0]]}
    assert BorderAnalysis.from_json(data) == analysis
