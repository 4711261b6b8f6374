"""One test per acceptance criterion; each prints a PASS/FAIL line that is
repeated in the terminal summary."""

from __future__ import annotations

import itertools
import random
import re
import subprocess
import sys
import time

import pytest

from conftest import record_acceptance
from nets import border_net
from jlang.compiler import compile, extract_expression
from jlang.corpus import CorpusSpec, random_semilinear
from jlang.grammar import enumerate_grammar, grammar_from_jexpr, validate_grammar
from jlang.jexpr import (
    enumerate_words,
    format_word,
    matches,
    normalize,
    parse,
    to_text,
    union_terms,
    words_up_to,
)
from jlang.lcm import build_lcm, run_lcm
from jlang.ptnet import accepts_vector
from jlang.semilinear import build_generator, ls_expression, member, parikh, parikh_vector, run_generator, vectors_up_to

SPEC = CorpusSpec(alphabet_size=3, max_depth=3, max_vars=2, count=200, seed=42)
ALPHABET = SPEC.alphabet
BOUND = 6


def report(number: int, title: str, ok: bool, detail: str) -> None:
    record_acceptance(f"criterion {number} {'PASS' if ok else 'FAIL'}  {title}: {detail}")


@pytest.fixture(scope="module")
def images(corpus):
    return [
        (e, {parikh_vector(w, ALPHABET) for w in enumerate_words(e, BOUND)})
        for e in corpus
    ]


def test_corpus_shape(corpus):
    assert len(corpus) >= 200
    assert len({to_text(e) for e in corpus}) == len(corpus)


def test_criterion_1_expression_net_equivalence(images):
    start = time.perf_counter()
    grid = list(vectors_up_to(len(ALPHABET), BOUND))
    bad = []
    for e, img in images:
        net = compile(e, ALPHABET)
        for v in grid:
            if accepts_vector(net, v).accepted != (v in img):
                bad.append((to_text(e), v))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 300
    report(1, "expression/net equivalence", ok,
           f"{len(images)} expressions x {len(grid)} vectors, {len(bad)} disagreements, {elapsed:.1f}s (limit 300s)")
    assert not bad, bad[:5]
    assert elapsed < 300


def test_criterion_2_parikh_semilinearity(images):
    grid = list(vectors_up_to(len(ALPHABET), BOUND))
    bad = []
    for e, img in images:
        s = parikh(e, ALPHABET)
        bad += [(to_text(e), v) for v in grid if member(s, v) != (v in img)]
    report(2, "Parikh semilinearity", not bad,
           f"{len(images)} expressions x {len(grid)} vectors, {len(bad)} disagreements")
    assert not bad, bad[:5]


def test_criterion_3_generator(images):
    bad = []
    for e, img in images[:50]:
        if run_generator(build_generator(parikh(e, ALPHABET)), BOUND) != img:
            bad.append(to_text(e))
    report(3, "finite-state generator", not bad, f"50 expressions, {len(bad)} disagreements")
    assert not bad, bad


def _brute_sorted_language(s, alphabet, max_len):
    """Sorted words whose Parikh vectors satisfy c + sum(i_j p_j) with
    coefficients found by exhaustive search."""
    def in_set(v):
        for comp in s.components:
            for coeffs in itertools.product(range(max_len + 1), repeat=len(comp.periods)):
                u = list(comp.constant)
                for k, p in zip(coeffs, comp.periods):
                    u = [a + k * b for a, b in zip(u, p)]
                if tuple(u) == v:
                    return True
        return False

    out = set()
    for v in vectors_up_to(len(alphabet), max_len):
        if in_set(v):
            out.add(tuple(x for x, k in zip(alphabet, v) for _ in range(k)))
    return out


def test_criterion_4_ls_converse():
    rng = random.Random(SPEC.seed)
    bad = []
    for _ in range(50):
        s = random_semilinear(rng, max_dim=3, max_components=2, max_periods=2, max_entry=3)
        alphabet = ("a", "b", "c")[: s.dimension]
        if enumerate_words(ls_expression(s, alphabet), 8) != _brute_sorted_language(s, alphabet, 8):
            bad.append(s)
    report(4, "L_S is a J language", not bad, f"50 semilinear sets, words up to length 8, {len(bad)} disagreements")
    assert not bad, bad


def test_criterion_5_lcm(corpus):
    words = list(words_up_to(ALPHABET, 5))
    bad, over = [], []
    for e in corpus:
        m = build_lcm(e, ALPHABET)
        for w in words:
            run = run_lcm(m, w)
            if run.accepted != matches(e, w):
                bad.append((to_text(e), format_word(w)))
            if run.max_counter_seen > len(w):
                over.append((to_text(e), format_word(w)))
    ok = not bad and not over
    report(5, "LCM agreement", ok,
           f"{len(corpus)} expressions x {len(words)} words, {len(bad)} disagreements, {len(over)} counter-bound breaches")
    assert ok, (bad[:5], over[:5])


def test_criterion_6_grammar(corpus):
    bad, invalid = [], []
    for e in corpus:
        g = grammar_from_jexpr(e, ALPHABET)
        if validate_grammar(g, restricted=True):
            invalid.append(to_text(e))
        if enumerate_grammar(g, BOUND) != enumerate_words(e, BOUND):
            bad.append(to_text(e))
    ok = not bad and not invalid
    report(6, "grammar agreement", ok,
           f"{len(corpus)} grammars, {len(bad)} language disagreements, {len(invalid)} invalid grammars")
    assert ok, (bad[:5], invalid[:5])


def _shape(text: str) -> set[str]:
    return {re.sub(r"\^k\d+", "^k", t.strip()) for t in text.split("|")}


def test_criterion_7_worked_examples():
    checks = {}
    lang = enumerate_words(parse("a | eps"), 4)
    checks["a | eps"] = lang == {(), ("a",)}

    e = parse("a^p b^3 a^p")
    members = [w for w in ("abbba", "aabbbaa", "aaabbbaaa") if matches(e, tuple(w))]
    others = [w for w in ("bbb", "abbbaa", "aabbba", "abbb", "abba") if matches(e, tuple(w))]
    checks["a^p b^3 a^p"] = len(members) == 3 and not others

    checks["normalization"] = (
        to_text(normalize(parse("a^p (b c)^q c^3 a^p b^2 (c d)^q")))
        == "a^p (b c)^q c c c a^p b b (c d)^q"
    )

    extracted, analysis = extract_expression(border_net(), bound=16)
    expected = {"p1^4 p2^6", "p1^4 (p1 p1)^k p2^6", "p1^4 p1^k p2^6 (p2 p2 p2)^k"}
    checks["border expression"] = (
        analysis.borders == ((4, 6),)
        and analysis.added[(4, 6)] == ((1, 3), (2, 0))
        and _shape(to_text(extracted)) == expected
        and len(union_terms(extracted)) == 3
    )
    ok = all(checks.values())
    detail = ", ".join(f"{k} {'ok' if v else 'wrong'}" for k, v in checks.items())
    report(7, "worked examples", ok, f"{detail}; extracted {to_text(extracted)}")
    assert ok, checks


def test_criterion_8_determinism():
    cmd = [sys.executable, "-m", "jlang", "crosscheck", "--seed", "42"]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    same = first.stdout == second.stdout and first.returncode == second.returncode
    clean = first.returncode == 0 and first.stdout.decode().splitlines()[-1] == "0 disagreements"
    report(8, "determinism", same and clean,
           f"two runs of crosscheck --seed 42: {'byte-identical' if same else 'different'}, "
           f"{len(first.stdout)} bytes, last line {first.stdout.decode().splitlines()[-1]!r}")
    assert same and clean, first.stderr.decode()
