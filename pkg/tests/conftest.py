from __future__ import annotations

import itertools
import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from jlang.corpus import CorpusSpec, generate_corpus
from jlang.jexpr import EPS, Concat, Exponentiation, Fixed, JExpr, Plus, Sym, Union, Var, variables

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", parent=settings.get_profile("default"), max_examples=1000)
settings.load_profile(os.environ.get("JLANG_HYPOTHESIS_PROFILE", "default"))

ALPHABET = ("a", "b", "c")
ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def corpus() -> list[JExpr]:
    return generate_corpus(CorpusSpec(count=200, seed=42))


def _freshen(e: JExpr) -> JExpr:
    """Give each exponentiation node its own variable names."""
    counter = itertools.count(1)

    def go(node: JExpr) -> JExpr:
        if isinstance(node, Union):
            return Union(go(node.left), go(node.right))
        if isinstance(node, Concat):
            return Concat(tuple(go(f) for f in node.factors))
        if isinstance(node, Plus):
            return Plus(go(node.body))
        if isinstance(node, Exponentiation):
            names = {v: f"v{next(counter)}" for v in node.variables()}
            return Exponentiation(tuple((b, Var(names[x.name]) if isinstance(x, Var) else x) for b, x in node.terms))
        return node

    return go(e)


_symbols = st.sampled_from(ALPHABET).map(Sym)
_bases = st.lists(_symbols, min_size=1, max_size=2).map(lambda xs: xs[0] if len(xs) == 1 else Concat(tuple(xs)))
_exponents = st.one_of(st.integers(1, 3).map(Fixed), st.sampled_from(("x", "y")).map(Var))
_exponentiations = st.lists(st.tuples(_bases, _exponents), min_size=1, max_size=3).map(
    lambda ts: Exponentiation(tuple(ts))
)


def _extend(children):
    non_eps = children.filter(lambda c: c != EPS)
    return st.one_of(
        st.builds(Union, children, children),
        st.lists(non_eps, min_size=2, max_size=3).map(lambda fs: Concat(tuple(fs))),
        non_eps.map(Plus),
    )


expressions = (
    st.recursive(st.one_of(_symbols, _exponentiations, st.just(EPS)), _extend, max_leaves=5)
    .map(_freshen)
    .filter(lambda e: len(variables(e)) <= 3)
)
