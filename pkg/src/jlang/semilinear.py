"""Linear and semilinear sets of non-negative integer vectors.

A linear set is ``{c + i1*p1 + ... + it*pt : i_j >= 0}`` for a constant ``c``
and finitely many periods ``p_j``; a semilinear set is a finite union of
linear sets. This module also computes Parikh images of J expressions, builds
the J expression of the sorted language ``L_S`` of a semilinear set, and
realises semilinear sets as finite-state generators (tapeless automata whose
moves increment at most one counter).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import ResourceLimitError, ValidationError
from .jexpr import (
    Concat,
    Epsilon,
    Exponentiation,
    Fixed,
    JExpr,
    Plus,
    Sym,
    Union,
    Var,
    check,
    union_of,
    word_expression,
)

Vector = tuple[int, ...]

MAX_LS_TERMS = 2**10


def zero(n: int) -> Vector:
    return (0,) * n


def add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def scale(k: int, v: Sequence[int]) -> Vector:
    return tuple(k * a for a in v)


def vectors_up_to(dim: int, total: int) -> Iterator[Vector]:
    """All vectors of ``dim`` non-negative entries summing to at most ``total``."""
    if dim == 0:
        yield ()
        return
    for head in range(total + 1):
        for rest in vectors_up_to(dim - 1, total - head):
            yield (head,) + rest


@dataclass(frozen=True)
class LinearSet:
    constant: Vector
    periods: tuple[Vector, ...] = ()

    def __post_init__(self) -> None:
        constant = tuple(self.constant)
        if any(x < 0 for x in constant):
            raise ValueError("constant vector must be non-negative")
        periods = set()
        for p in self.periods:
            p = tuple(p)
            if len(p) != len(constant):
                raise ValueError("period and constant dimensions differ")
            if any(x < 0 for x in p):
                raise ValueError("periods must be non-negative")
            if any(p):
                periods.add(p)
        object.__setattr__(self, "constant", constant)
        object.__setattr__(self, "periods", tuple(sorted(periods)))

    @property
    def dimension(self) -> int:
        return len(self.constant)

    def __contains__(self, v: Sequence[int]) -> bool:
        return _linear_member(self.constant, self.periods, tuple(v))


@lru_cache(maxsize=200_000)
def _linear_member(constant: Vector, periods: tuple[Vector, ...], v: Vector) -> bool:
    rest = tuple(a - b for a, b in zip(v, constant))
    if any(x < 0 for x in rest):
        return False
    return _decompose(periods, rest)


@lru_cache(maxsize=200_000)
def _decompose(periods: tuple[Vector, ...], rest: Vector) -> bool:
    # coefficients are bounded because every period is non-zero and non-negative
    if not any(rest):
        return True
    if not periods:
        return False
    head, tail = periods[0], periods[1:]
    current = rest
    while True:
        if _decompose(tail, current):
            return True
        current = tuple(a - b for a, b in zip(current, head))
        if any(x < 0 for x in current):
            return False


@dataclass(frozen=True)
class SemilinearSet:
    dimension: int
    components: tuple[LinearSet, ...] = ()

    def __post_init__(self) -> None:
        for c in self.components:
            if c.dimension != self.dimension:
                raise ValueError("component dimension mismatch")
        unique = sorted(set(self.components), key=lambda c: (c.constant, c.periods))
        object.__setattr__(self, "components", tuple(unique))

    @classmethod
    def linear(cls, constant: Sequence[int], periods: Iterable[Sequence[int]] = ()) -> "SemilinearSet":
        lin = LinearSet(tuple(constant), tuple(tuple(p) for p in periods))
        return cls(lin.dimension, (lin,))

    @classmethod
    def empty(cls, dimension: int) -> "SemilinearSet":
        return cls(dimension, ())

    def __contains__(self, v: Sequence[int]) -> bool:
        return member(self, v)

    def to_json(self, alphabet: Sequence[str] | None = None) -> dict:
        out: dict = {"dimension": self.dimension}
        if alphabet is not None:
            out["alphabet"] = list(alphabet)
        out["components"] = [
            {"constant": list(c.constant), "periods": [list(p) for p in c.periods]} for c in self.components
        ]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SemilinearSet":
        dim = int(data["dimension"])
        comps = tuple(
            LinearSet(tuple(c["constant"]), tuple(tuple(p) for p in c.get("periods", ())))
            for c in data.get("components", ())
        )
        return cls(dim, comps)


def _same_dimension(*sets: SemilinearSet) -> int:
    dims = {s.dimension for s in sets}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def member(s: SemilinearSet, v: Sequence[int]) -> bool:
    v = tuple(v)
    if len(v) != s.dimension:
        raise ValueError(f"vector of dimension {len(v)} tested against a set of dimension {s.dimension}")
    return any(_linear_member(c.constant, c.periods, v) for c in s.components)


def union(a: SemilinearSet, b: SemilinearSet) -> SemilinearSet:
    return SemilinearSet(_same_dimension(a, b), a.components + b.components)


def minkowski_sum(a: SemilinearSet, b: SemilinearSet) -> SemilinearSet:
    """``{x + y : x in a, y in b}``."""
    n = _same_dimension(a, b)
    return SemilinearSet(
        n,
        tuple(
            LinearSet(add(x.constant, y.constant), x.periods + y.periods) for x in a.components for y in b.components
        ),
    )


def plus_closure(a: SemilinearSet) -> SemilinearSet:
    """Sums of one or more members of ``a``.

    For each non-empty set ``T`` of components the sums that use exactly the
    components of ``T`` form the linear set whose constant adds their constants
    and whose periods are their periods together with their constants.
    """
    comps = a.components
    out = []
    for r in range(1, len(comps) + 1):
        for subset in itertools.combinations(comps, r):
            constant = zero(a.dimension)
            periods: list[Vector] = []
            for c in subset:
                constant = add(constant, c.constant)
                periods.extend(c.periods)
                periods.append(c.constant)
            out.append(LinearSet(constant, tuple(periods)))
    return SemilinearSet(a.dimension, tuple(out))


# ---------------------------------------------------------------------------
# Parikh images
# ---------------------------------------------------------------------------


def parikh_vector(word: Sequence[str], alphabet: Sequence[str]) -> Vector:
    index = {s: i for i, s in enumerate(alphabet)}
    v = [0] * len(alphabet)
    for s in word:
        v[index[s]] += 1
    return tuple(v)


def parikh(e: JExpr, alphabet: Sequence[str]) -> SemilinearSet:
    """The Parikh image of L(e) as a semilinear set over ``alphabet``."""
    check(e, alphabet)
    n = len(alphabet)
    index = {s: i for i, s in enumerate(alphabet)}

    def unit(name: str) -> Vector:
        v = [0] * n
        v[index[name]] = 1
        return tuple(v)

    def base_vector(base: JExpr) -> Vector:
        v = zero(n)
        for node in _leaves(base):
            v = add(v, unit(node.name))
        return v

    def go(node: JExpr) -> SemilinearSet:
        if isinstance(node, Epsilon):
            return SemilinearSet.linear(zero(n))
        if isinstance(node, Sym):
            return SemilinearSet.linear(unit(node.name))
        if isinstance(node, Union):
            return union(go(node.left), go(node.right))
        if isinstance(node, Concat):
            acc = SemilinearSet.linear(zero(n))
            for f in node.factors:
                acc = minkowski_sum(acc, go(f))
            return acc
        if isinstance(node, Plus):
            return plus_closure(go(node.body))
        if isinstance(node, Exponentiation):
            constant = zero(n)
            periods: dict[str, Vector] = {}
            for base, x in node.terms:
                v = base_vector(base)
                if isinstance(x, Fixed):
                    constant = add(constant, scale(x.value, v))
                else:
                    constant = add(constant, v)
                    periods[x.name] = add(periods.get(x.name, zero(n)), v)
            return SemilinearSet.linear(constant, periods.values())
        raise TypeError(f"not a J expression: {node!r}")

    return go(e)


def _leaves(base: JExpr) -> Iterator[Sym]:
    if isinstance(base, Sym):
        yield base
    elif isinstance(base, Concat):
        for f in base.factors:
            yield from _leaves(f)


# ---------------------------------------------------------------------------
# The sorted language L_S
# ---------------------------------------------------------------------------


class _VarNames:
    def __init__(self, prefix: str = "k", avoid: Iterable[str] = ()):
        self.prefix = prefix
        self.avoid = set(avoid)
        self.count = 0

    def __call__(self) -> str:
        while True:
            self.count += 1
            name = f"{self.prefix}{self.count}"
            if name not in self.avoid:
                return name


def _block(symbol: str, times: int) -> JExpr:
    return Sym(symbol) if times == 1 else Concat((Sym(symbol),) * times)


def layout(
    alphabet: Sequence[str],
    constant: Sequence[int],
    periods: Sequence[Sequence[int]],
    fresh,
    expand_constant: bool = True,
) -> JExpr:
    """One exponentiation laying out ``constant + sum k_j * periods[j]`` with
    every ``k_j >= 1``, grouped per symbol in alphabet order.

    Each period gets one fresh variable shared by its blocks. The constant
    part is written as repeated symbols, or as fixed powers when
    ``expand_constant`` is false.
    """
    if not periods:
        if expand_constant or all(c <= 1 for c in constant):
            return word_expression([s for s, c in zip(alphabet, constant) for _ in range(c)])
        return Exponentiation(tuple((Sym(s), Fixed(c)) for s, c in zip(alphabet, constant) if c))
    names = [fresh() for _ in periods]
    terms: list[tuple[JExpr, Fixed | Var]] = []
    for i, s in enumerate(alphabet):
        if constant[i]:
            if expand_constant:
                terms.extend((Sym(s), Fixed(1)) for _ in range(constant[i]))
            else:
                terms.append((Sym(s), Fixed(constant[i])))
        for name, p in zip(names, periods):
            if p[i]:
                terms.append((_block(s, p[i]), Var(name)))
    return Exponentiation(tuple(terms))


def ls_expression(s: SemilinearSet, alphabet: Sequence[str], max_terms: int = MAX_LS_TERMS) -> JExpr:
    """A J expression for ``{a1^s1 ... an^sn : (s1, ..., sn) in s}``.

    Variables range over positive integers, so a period with coefficient zero
    is expressed by leaving it out: each linear component contributes one union
    term per subset of its periods.
    """
    if len(alphabet) != s.dimension:
        raise ValueError("alphabet size must equal the set dimension")
    if not s.components:
        raise ValueError("the empty set has no J expression: every J language is non-empty")
    total = sum(2 ** len(c.periods) for c in s.components)
    if total > max_terms:
        raise ResourceLimitError(f"L_S expression would need {total} union terms (cap {max_terms})")
    fresh = _VarNames(avoid=alphabet)
    terms: list[JExpr] = []
    for c in s.components:
        for r in range(len(c.periods) + 1):
            for subset in itertools.combinations(c.periods, r):
                term = layout(alphabet, c.constant, subset, fresh)
                if term not in terms:
                    terms.append(term)
    return union_of(terms)


def sorted_language(s: SemilinearSet, alphabet: Sequence[str], max_len: int) -> set[tuple[str, ...]]:
    """Brute-force listing of L_S up to ``max_len`` (membership over the grid)."""
    out = set()
    for v in vectors_up_to(s.dimension, max_len):
        if member(s, v):
            out.add(tuple(sym for sym, k in zip(alphabet, v) for _ in range(k)))
    return out


# ---------------------------------------------------------------------------
# Finite-state generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    """Tapeless nondeterministic automaton with increment-only counters.

    ``edges`` are ``(source, counter, target)`` with ``counter`` either a
    counter index to increment or ``None`` for a silent move.
    """

    states: tuple[str, ...]
    start: str
    halting: frozenset[str]
    edges: tuple[tuple[str, int | None, str], ...]
    counters: int
    _out: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        known = set(self.states)
        if self.start not in known or not self.halting <= known:
            raise ValidationError(["generator references unknown states"])
        for src, c, dst in self.edges:
            if src not in known or dst not in known:
                raise ValidationError([f"edge {src}->{dst} references unknown states"])
            if c is not None and not 0 <= c < self.counters:
                raise ValidationError([f"edge {src}->{dst} increments counter {c} out of range"])
        for src, c, dst in self.edges:
            self._out.setdefault(src, []).append((c, dst))

    def successors(self, state: str) -> list[tuple[int | None, str]]:
        return self._out.get(state, [])

    def to_dot(self) -> str:
        lines = ["digraph generator {", "  rankdir=LR;", '  __start [shape=point];']
        for s in self.states:
            shape = "doublecircle" if s in self.halting else "circle"
            lines.append(f'  "{s}" [shape={shape}];')
        lines.append(f'  __start -> "{self.start}";')
        for src, c, dst in self.edges:
            label = "ε" if c is None else f"+c{c}"
            lines.append(f'  "{src}" -> "{dst}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_generator(s: SemilinearSet) -> Generator:
    """A generator whose halting counter values are exactly ``s``.

    Per component: a chain that counts out the constant, ending in a halting
    hub, and one loop through the hub per period.
    """
    states = ["start"]
    edges: list[tuple[str, int | None, str]] = []
    halting = []
    for ci, comp in enumerate(s.components):
        hub = f"c{ci}"
        steps = [i for i, k in enumerate(comp.constant) for _ in range(k)]
        prev = "start"
        for si, counter in enumerate(steps[:-1]):
            node = f"c{ci}_v{si}"
            states.append(node)
            edges.append((prev, counter, node))
            prev = node
        states.append(hub)
        halting.append(hub)
        edges.append((prev, steps[-1] if steps else None, hub))
        for pi, period in enumerate(comp.periods):
            incs = [i for i, k in enumerate(period) for _ in range(k)]
            prev = hub
            for si, counter in enumerate(incs[:-1]):
                node = f"c{ci}_p{pi}_{si}"
                states.append(node)
                edges.append((prev, counter, node))
                prev = node
            edges.append((prev, incs[-1], hub))
    if not s.components:
        # the halting state exists but nothing leads to it
        states.append("halt")
        halting.append("halt")
    return Generator(tuple(states), "start", frozenset(halting), tuple(edges), s.dimension)


def run_generator(m: Generator, bound: int) -> set[Vector]:
    """Every counter vector with total at most ``bound`` at which ``m`` can halt."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    start = (m.start, zero(m.counters))
    seen = {start}
    todo = [start]
    out: set[Vector] = set()
    while todo:
        state, counts = todo.pop()
        if state in m.halting:
            out.add(counts)
        total = sum(counts)
        for c, nxt in m.successors(state):
            if c is None:
                conf = (nxt, counts)
            elif total < bound:
                conf = (nxt, counts[:c] + (counts[c] + 1,) + counts[c + 1 :])
            else:
                continue
            if conf not in seen:
                seen.add(conf)
                todo.append(conf)
    return out
