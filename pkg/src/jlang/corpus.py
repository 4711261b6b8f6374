"""Seeded random corpora of valid J expressions and semilinear sets."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .jexpr import (
    EPS,
    Concat,
    Exponentiation,
    Fixed,
    JExpr,
    Plus,
    Sym,
    Union,
    Var,
    parse,
    to_text,
    validate,
)
from .semilinear import LinearSet, SemilinearSet

VARIABLE_NAMES = ("p", "q", "r", "s")
LETTERS = "abcdefgh"


@dataclass(frozen=True)
class CorpusSpec:
    alphabet_size: int = 3
    max_depth: int = 3
    max_vars: int = 2
    count: int = 200
    seed: int = 42
    max_exp: int = 3
    symbols: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.symbols is not None:
            object.__setattr__(self, "symbols", tuple(self.symbols))
            object.__setattr__(self, "alphabet_size", len(self.symbols))
            if len(set(self.symbols)) != len(self.symbols) or set(self.symbols) & set(VARIABLE_NAMES):
                raise ValueError(f"symbols must be distinct and differ from the variable names {VARIABLE_NAMES}")
        if not 1 <= self.alphabet_size <= len(LETTERS):
            raise ValueError(f"alphabet size must be between 1 and {len(LETTERS)}")
        if self.max_depth < 1 or self.count < 1 or self.max_exp < 1:
            raise ValueError("corpus bounds must be positive")
        if not 0 <= self.max_vars <= len(VARIABLE_NAMES):
            raise ValueError(f"at most {len(VARIABLE_NAMES)} variables are supported")

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.symbols or tuple(LETTERS[: self.alphabet_size])


class _Generator:
    def __init__(self, spec: CorpusSpec, rng: random.Random):
        self.spec = spec
        self.rng = rng
        self.free = list(VARIABLE_NAMES[: spec.max_vars])

    def symbol(self) -> Sym:
        return Sym(self.rng.choice(self.spec.alphabet))

    def base(self) -> JExpr:
        n = self.rng.choice((1, 1, 1, 2))
        syms = tuple(self.symbol() for _ in range(n))
        return syms[0] if n == 1 else Concat(syms)

    def exponentiation(self) -> Exponentiation:
        rng = self.rng
        names: list[str] = []
        if self.free and rng.random() < 0.85:
            names.append(self.free.pop(0))
            if self.free and rng.random() < 0.3:
                names.append(self.free.pop(0))
        terms = []
        for name in names:
            terms += [(self.base(), Var(name)) for _ in range(rng.choice((1, 2, 2, 3)))]
        fixed = rng.choice((0, 1, 1, 2)) if names else rng.choice((1, 2))
        terms += [(self.base(), Fixed(rng.randint(1, self.spec.max_exp))) for _ in range(fixed)]
        rng.shuffle(terms)
        return Exponentiation(tuple(terms))

    def expr(self, depth: int) -> JExpr:
        rng = self.rng
        if depth <= 1 or rng.random() < 0.2:
            r = rng.random()
            if r < 0.08:
                return EPS
            if r < 0.45:
                return self.exponentiation()
            return self.symbol()
        kind = rng.choice(("union", "concat", "concat", "plus", "exp"))
        if kind == "exp":
            return self.exponentiation()
        if kind == "plus":
            body = self.expr(depth - 1)
            return self.expr(depth) if body == EPS else Plus(body)
        if kind == "union":
            return Union(self.expr(depth - 1), self.expr(depth - 1))
        factors = tuple(f for f in (self.expr(depth - 1) for _ in range(rng.choice((2, 2, 3)))) if f != EPS)
        if not factors:
            return self.symbol()
        return factors[0] if len(factors) == 1 else Concat(factors)


def generate_corpus(spec: CorpusSpec) -> list[JExpr]:
    """``spec.count`` distinct valid expressions, reproducible from the seed.

    Every expression prints and re-parses to itself.
    """
    rng = random.Random(spec.seed)
    out: list[JExpr] = []
    seen: set[str] = set()
    attempts = 0
    while len(out) < spec.count:
        attempts += 1
        if attempts > spec.count * 200:
            raise RuntimeError("could not generate enough distinct expressions")
        e = _Generator(spec, rng).expr(spec.max_depth)
        text = to_text(e)
        if text in seen or validate(e, spec.alphabet) or parse(text, spec.alphabet) != e:
            continue
        seen.add(text)
        out.append(e)
    return out


def random_semilinear(
    rng: random.Random,
    max_dim: int = 3,
    max_components: int = 2,
    max_periods: int = 2,
    max_entry: int = 3,
) -> SemilinearSet:
    dim = rng.randint(1, max_dim)

    def vec(nonzero: bool) -> tuple[int, ...]:
        while True:
            v = tuple(rng.randint(0, max_entry) for _ in range(dim))
            if any(v) or not nonzero:
                return v

    comps = []
    for _ in range(rng.randint(1, max_components)):
        comps.append(LinearSet(vec(False), tuple(vec(True) for _ in range(rng.randint(0, max_periods)))))
    return SemilinearSet(dim, tuple(comps))
