"""J expressions: abstract syntax, concrete syntax, validation and semantics.

A J expression is built from ``eps``, alphabet symbols, union, concatenation,
positive closure and *exponentiation*. An exponentiation is a flat sequence of
terms ``base^exponent`` where each exponent is either a fixed positive integer
or an integer variable ranging over 1, 2, 3, ...; all terms carrying the same
variable are repeated the same number of times.

Concrete syntax::

    expr     := union
    union    := concat ("|" concat)*
    concat   := factor+
    factor   := atom postfix?
    postfix  := "+" | "^" exponent
    atom     := SYMBOL | "eps" | "(" expr ")"
    exponent := INTEGER | VARIABLE

Inside a concatenation, a maximal run of symbol-sequence factors that contains
at least one explicit ``^`` exponent is read as a single exponentiation node;
the un-exponentiated factors of the run get exponent 1. So ``a^p b^3 a^p`` is
one exponentiation with three terms sharing ``p``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import JParseError, NormalizationError, ResourceLimitError, ValidationError

Word = tuple[str, ...]

DEFAULT_CAP = 1_000_000
RESERVED = "eps"
_IDENT = re.compile(r"[a-z][a-z0-9_]*\Z")


# ---------------------------------------------------------------------------
# Abstract syntax
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fixed:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


Exponent = Fixed | Var


class JExpr:
    """Base class of expression nodes. Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Epsilon(JExpr):
    def __repr__(self) -> str:
        return "Epsilon()"


@dataclass(frozen=True, repr=False)
class Sym(JExpr):
    name: str

    def __repr__(self) -> str:
        return f"Sym({self.name!r})"


@dataclass(frozen=True, repr=False)
class Union(JExpr):
    left: JExpr
    right: JExpr

    def __repr__(self) -> str:
        return f"Union({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Concat(JExpr):
    factors: tuple[JExpr, ...]

    def __repr__(self) -> str:
        return f"Concat({list(self.factors)!r})"


@dataclass(frozen=True, repr=False)
class Plus(JExpr):
    body: JExpr

    def __repr__(self) -> str:
        return f"Plus({self.body!r})"


@dataclass(frozen=True, repr=False)
class Exponentiation(JExpr):
    terms: tuple[tuple[JExpr, Exponent], ...]

    def __repr__(self) -> str:
        inner = ", ".join(f"({b!r}, {x})" for b, x in self.terms)
        return f"Exponentiation([{inner}])"

    def variables(self) -> list[str]:
        """Variable names in order of first occurrence."""
        seen: dict[str, None] = {}
        for _, x in self.terms:
            if isinstance(x, Var):
                seen.setdefault(x.name)
        return list(seen)


EPS = Epsilon()


def union_of(items: Sequence[JExpr]) -> JExpr:
    """Left-associated union of one or more expressions."""
    if not items:
        raise ValueError("union of nothing")
    result = items[0]
    for item in items[1:]:
        result = Union(result, item)
    return result


def union_terms(e: JExpr) -> list[JExpr]:
    if isinstance(e, Union):
        return union_terms(e.left) + union_terms(e.right)
    return [e]


def word_expression(word: Sequence[str]) -> JExpr:
    """The expression denoting exactly one word."""
    if not word:
        return EPS
    if len(word) == 1:
        return Sym(word[0])
    return Concat(tuple(Sym(s) for s in word))


def subexpressions(e: JExpr) -> Iterator[JExpr]:
    yield e
    if isinstance(e, Union):
        yield from subexpressions(e.left)
        yield from subexpressions(e.right)
    elif isinstance(e, Concat):
        for f in e.factors:
            yield from subexpressions(f)
    elif isinstance(e, Plus):
        yield from subexpressions(e.body)
    elif isinstance(e, Exponentiation):
        for base, _ in e.terms:
            yield from subexpressions(base)


def symbols(e: JExpr) -> set[str]:
    return {s.name for s in subexpressions(e) if isinstance(s, Sym)}


def variables(e: JExpr) -> set[str]:
    out: set[str] = set()
    for node in subexpressions(e):
        if isinstance(node, Exponentiation):
            out.update(node.variables())
    return out


def length(e: JExpr) -> int:
    """Number of occurrences of alphabet symbols and ``eps`` in ``e``."""
    return sum(isinstance(n, (Sym, Epsilon)) for n in subexpressions(e))


def symbol_sequence(e: JExpr) -> Word | None:
    """The single word of a union-free, closure-free base, or None."""
    if isinstance(e, Epsilon):
        return ()
    if isinstance(e, Sym):
        return (e.name,)
    if isinstance(e, Concat) and all(isinstance(f, Sym) for f in e.factors):
        return tuple(f.name for f in e.factors)
    return None


# ---------------------------------------------------------------------------
# Concrete syntax
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<ident>[a-z][a-z0-9_]*)|(?P<int>[0-9]+)|(?P<op>[|()+^]))")


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise JParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


@dataclass
class _Factor:
    atom: JExpr
    exponent: Exponent | None = None
    plus: bool = False


class _Parser:
    def __init__(self, text: str, alphabet: Sequence[str] | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.alphabet = set(alphabet) if alphabet is not None else None
        self.symbol_uses: dict[str, int] = {}
        self.variable_uses: dict[str, int] = {}

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def starts_factor(self) -> bool:
        return self.tok.kind == "ident" or self.tok.text == "("

    def parse(self) -> JExpr:
        e = self.union()
        if self.tok.kind != "end":
            raise JParseError(f"unexpected {self.tok.text!r}", self.tok.pos, ("'|'", "symbol", "'('", "end of input"))
        self.check_namespaces()
        return e

    def union(self) -> JExpr:
        left = self.concat()
        while self.tok.text == "|":
            self.advance()
            left = Union(left, self.concat())
        return left

    def concat(self) -> JExpr:
        if not self.starts_factor():
            raise JParseError(
                f"unexpected {self.tok.text or 'end of input'!r}", self.tok.pos, ("symbol", "'eps'", "'('")
            )
        factors = []
        while self.starts_factor():
            factors.append(self.factor())
        return _group_factors(factors)

    def factor(self) -> _Factor:
        atom = self.atom()
        if self.tok.text == "+":
            self.advance()
            return _Factor(atom, plus=True)
        if self.tok.text == "^":
            self.advance()
            t = self.advance()
            if t.kind == "int":
                value = int(t.text)
                if value < 1:
                    raise JParseError("fixed exponent must be positive", t.pos)
                return _Factor(atom, Fixed(value))
            if t.kind == "ident" and t.text != RESERVED:
                self.variable_uses.setdefault(t.text, t.pos)
                return _Factor(atom, Var(t.text))
            raise JParseError(f"unexpected {t.text or 'end of input'!r}", t.pos, ("integer", "variable"))
        return _Factor(atom)

    def atom(self) -> JExpr:
        t = self.advance()
        if t.text == "(":
            inner = self.union()
            if self.tok.text != ")":
                raise JParseError(f"unexpected {self.tok.text or 'end of input'!r}", self.tok.pos, ("')'",))
            self.advance()
            return inner
        if t.kind == "ident":
            if t.text == RESERVED:
                return EPS
            self.symbol_uses.setdefault(t.text, t.pos)
            return Sym(t.text)
        raise JParseError(f"unexpected {t.text or 'end of input'!r}", t.pos, ("symbol", "'eps'", "'('"))

    def check_namespaces(self) -> None:
        for name, pos in self.variable_uses.items():
            if name in self.symbol_uses or (self.alphabet is not None and name in self.alphabet):
                raise JParseError(f"variable {name!r} clashes with an alphabet symbol", pos)
        if self.alphabet is not None:
            for name, pos in self.symbol_uses.items():
                if name not in self.alphabet:
                    raise JParseError(f"unknown symbol {name!r}", pos, tuple(sorted(self.alphabet)))


def _joinable(f: _Factor) -> bool:
    if f.plus:
        return False
    if f.exponent is not None:
        return True
    return symbol_sequence(f.atom) is not None


def _group_factors(factors: list[_Factor]) -> JExpr:
    out: list[JExpr] = []
    run: list[_Factor] = []

    def flush() -> None:
        if any(f.exponent is not None for f in run):
            out.append(Exponentiation(tuple((f.atom, f.exponent or Fixed(1)) for f in run)))
        else:
            out.extend(f.atom for f in run)
        run.clear()

    for f in factors:
        if _joinable(f):
            run.append(f)
            continue
        flush()
        out.append(Plus(f.atom) if f.plus else f.atom)
    flush()
    return out[0] if len(out) == 1 else Concat(tuple(out))


def parse(text: str, alphabet: Sequence[str] | None = None) -> JExpr:
    """Parse expression text. With ``alphabet=None`` every symbol is accepted."""
    if alphabet is not None:
        for s in alphabet:
            if not _IDENT.match(s) or s == RESERVED:
                raise ValueError(f"invalid alphabet symbol {s!r}")
    return _Parser(text, alphabet).parse()


def _printed_joinable(e: JExpr) -> bool:
    return isinstance(e, Exponentiation) or symbol_sequence(e) is not None


def _base_text(base: JExpr) -> str:
    if isinstance(base, (Sym, Epsilon)):
        return to_text(base)
    return f"({to_text(base)})"


def to_text(e: JExpr) -> str:
    """Canonical text; ``parse(to_text(e)) == e`` for parser-shaped trees."""
    if isinstance(e, Epsilon):
        return RESERVED
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Union):
        right = to_text(e.right)
        if isinstance(e.right, Union):
            right = f"({right})"
        return f"{to_text(e.left)} | {right}"
    if isinstance(e, Concat):
        parts = []
        for k, f in enumerate(e.factors):
            text = to_text(f)
            if isinstance(f, (Union, Concat)):
                text = f"({text})"
            elif isinstance(f, Exponentiation):
                neighbours = e.factors[max(k - 1, 0) : k] + e.factors[k + 1 : k + 2]
                if any(_printed_joinable(n) for n in neighbours):
                    text = f"({text})"
            parts.append(text)
        return " ".join(parts)
    if isinstance(e, Plus):
        body = to_text(e.body)
        if not isinstance(e.body, Sym):
            body = f"({body})"
        return body + "+"
    if isinstance(e, Exponentiation):
        all_one = all(x == Fixed(1) for _, x in e.terms)
        parts = []
        for k, (base, x) in enumerate(e.terms):
            text = _base_text(base)
            if x != Fixed(1) or (all_one and k == 0) or symbol_sequence(base) is None:
                text += f"^{x}"
            parts.append(text)
        return " ".join(parts)
    raise TypeError(f"not a J expression: {e!r}")


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    rule: str
    subexpression: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.subexpression}"


def validate(e: JExpr, alphabet: Sequence[str] | None = None) -> list[Violation]:
    """Return every well-formedness violation of ``e``; empty means valid."""
    found: list[Violation] = []
    owners: dict[str, Exponentiation] = {}
    alpha = set(alphabet) if alphabet is not None else None

    def add(rule: str, node: JExpr) -> None:
        v = Violation(rule, to_text(node))
        if v not in found:
            found.append(v)

    def walk(node: JExpr) -> None:
        if isinstance(node, Sym):
            if not _IDENT.match(node.name) or node.name == RESERVED:
                add("malformed symbol name", node)
            elif alpha is not None and node.name not in alpha:
                add("symbol outside the alphabet", node)
        elif isinstance(node, Union):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Concat):
            if not node.factors:
                add("empty concatenation", node)
            for f in node.factors:
                if isinstance(f, Epsilon):
                    add("ε as concatenation operand", node)
                walk(f)
        elif isinstance(node, Plus):
            if isinstance(node.body, Epsilon):
                add("ε as positive-closure operand", node)
            walk(node.body)
        elif isinstance(node, Exponentiation):
            if not node.terms:
                add("empty exponentiation", node)
            for base, x in node.terms:
                inner = list(subexpressions(base))
                if any(isinstance(n, Union) for n in inner):
                    add("union inside exponentiation-term", node)
                if any(isinstance(n, Plus) for n in inner):
                    add("positive closure inside exponentiation-term", node)
                if any(isinstance(n, Exponentiation) for n in inner):
                    add("nested exponentiation", node)
                if isinstance(x, Fixed) and x.value < 1:
                    add("fixed exponent below 1", node)
                if isinstance(x, Var):
                    if not _IDENT.match(x.name) or x.name == RESERVED:
                        add("malformed variable name", node)
                    elif alpha is not None and x.name in alpha:
                        add("variable clashes with an alphabet symbol", node)
                    owner = owners.setdefault(x.name, node)
                    if owner is not node:
                        add(f"variable {x.name!r} reused across exponentiations", node)
                walk(base)
        elif not isinstance(node, Epsilon):
            add("unknown node", node)

    walk(e)
    return found


def check(e: JExpr, alphabet: Sequence[str] | None = None) -> JExpr:
    """Return ``e`` unchanged, or raise ValidationError."""
    problems = validate(e, alphabet)
    if problems:
        raise ValidationError(problems)
    return e


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def _base_alternatives(base: JExpr) -> list[Word]:
    """Union-free readings of an exponentiation base, in order, deduplicated."""
    if isinstance(base, Epsilon):
        return [()]
    if isinstance(base, Sym):
        return [(base.name,)]
    if isinstance(base, Union):
        out = _base_alternatives(base.left)
        out += [w for w in _base_alternatives(base.right) if w not in out]
        return out
    if isinstance(base, Concat):
        combos: list[Word] = [()]
        for f in base.factors:
            alts = _base_alternatives(f)
            combos = list(dict.fromkeys(c + a for c in combos for a in alts))
        return combos
    if isinstance(base, Plus):
        raise NormalizationError(
            "positive closure inside an exponentiation-term cannot be removed: "
            "alpha+ raised to n is just alpha+, so write it as a separate concatenation factor"
        )
    if isinstance(base, Exponentiation):
        raise NormalizationError("nested exponentiation has no defined meaning")
    raise TypeError(f"not a J expression: {base!r}")


def _fresh(name: str, taken: set[str]) -> str:
    k = 2
    while f"{name}_{k}" in taken:
        k += 1
    new = f"{name}_{k}"
    taken.add(new)
    return new


def normalize(e: JExpr) -> JExpr:
    """Expand fixed exponents into repeated exponent-1 terms and distribute
    unions out of exponentiation-terms.

    A union term carrying a variable exponent picks one alternative for all of
    its repetitions; each union-term branch beyond the first gets fresh
    variable names so that no name is shared between exponentiation nodes.
    """
    taken = variables(e) | symbols(e)
    return _normalize(e, taken)


def _normalize(e: JExpr, taken: set[str]) -> JExpr:
    if isinstance(e, (Epsilon, Sym)):
        return e
    if isinstance(e, Union):
        return Union(_normalize(e.left, taken), _normalize(e.right, taken))
    if isinstance(e, Concat):
        return Concat(tuple(_normalize(f, taken) for f in e.factors))
    if isinstance(e, Plus):
        return Plus(_normalize(e.body, taken))
    if not isinstance(e, Exponentiation):
        raise TypeError(f"not a J expression: {e!r}")

    # fixed repetitions choose independently, so expand them before distributing
    slots: list[tuple[list[Word], Exponent, JExpr]] = []
    for base, x in e.terms:
        alts = _base_alternatives(base)
        if isinstance(x, Fixed):
            slots.extend((alts, Fixed(1), base) for _ in range(x.value))
        else:
            slots.append((alts, x, base))

    branches = []
    for k, choice in enumerate(itertools.product(*(alts for alts, _, _ in slots))):
        rename: dict[str, str] = {}
        terms = []
        for word, (alts, x, original) in zip(choice, slots):
            base = original if len(alts) == 1 and symbol_sequence(original) is not None else word_expression(word)
            if isinstance(x, Var) and k > 0:
                if x.name not in rename:
                    rename[x.name] = _fresh(x.name, taken)
                x = Var(rename[x.name])
            terms.append((base, x))
        branches.append(Exponentiation(tuple(terms)))
    return union_of(branches)


# ---------------------------------------------------------------------------
# Semantics: enumeration and matching
# ---------------------------------------------------------------------------


def _expansions(node: Exponentiation, budget: int) -> Iterator[Word]:
    """Every word of the exponentiation with length at most ``budget``."""
    words: list[Word] = []
    for base, _ in node.terms:
        w = symbol_sequence(base)
        if w is None:
            raise ValidationError([Violation("exponentiation base is not a symbol sequence", to_text(base))])
        words.append(w)
    names = node.variables()
    fixed_len = sum(len(w) * x.value for w, (_, x) in zip(words, node.terms) if isinstance(x, Fixed))
    unit = {q: sum(len(w) for w, (_, x) in zip(words, node.terms) if x == Var(q)) for q in names}
    if fixed_len > budget:
        return

    def assignments(k: int, left: int) -> Iterator[dict[str, int]]:
        if k == len(names):
            yield {}
            return
        q = names[k]
        if unit[q] == 0:
            # a variable over empty bases cannot change the word
            for rest in assignments(k + 1, left):
                yield {q: 1, **rest}
            return
        for value in range(1, left // unit[q] + 1):
            for rest in assignments(k + 1, left - value * unit[q]):
                yield {q: value, **rest}

    for values in assignments(0, budget - fixed_len):
        out: list[str] = []
        for w, (_, x) in zip(words, node.terms):
            out.extend(w * (x.value if isinstance(x, Fixed) else values[x.name]))
        yield tuple(out)


def enumerate_words(e: JExpr, max_len: int, cap: int = DEFAULT_CAP) -> set[Word]:
    """All words of L(e) with length at most ``max_len``."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    check(e)
    return set(_lang(e, max_len, cap))


def _capped(result: set[Word], cap: int) -> set[Word]:
    if len(result) > cap:
        raise ResourceLimitError(f"enumeration exceeded {cap} words")
    return result


def _lang(e: JExpr, n: int, cap: int) -> set[Word]:
    if isinstance(e, Epsilon):
        return {()}
    if isinstance(e, Sym):
        return {(e.name,)} if n >= 1 else set()
    if isinstance(e, Union):
        return _capped(_lang(e.left, n, cap) | _lang(e.right, n, cap), cap)
    if isinstance(e, Concat):
        acc: set[Word] = {()}
        for f in e.factors:
            part = _lang(f, n, cap)
            acc = _capped({x + y for x in acc for y in part if len(x) + len(y) <= n}, cap)
        return acc
    if isinstance(e, Plus):
        body = _lang(e.body, n, cap)
        result = set(body)
        frontier = body
        while frontier:
            frontier = {x + y for x in frontier for y in body if len(x) + len(y) <= n} - result
            result |= frontier
            _capped(result, cap)
        return result
    if isinstance(e, Exponentiation):
        result = set()
        for w in _expansions(e, n):
            result.add(w)
            _capped(result, cap)
        return result
    raise TypeError(f"not a J expression: {e!r}")


def matches(e: JExpr, w: Sequence[str]) -> bool:
    """Whether the word ``w`` belongs to L(e)."""
    word = tuple(w)
    memo: dict[tuple[int, int], frozenset[int]] = {}
    keep: list[JExpr] = []

    def ends(node: JExpr, i: int) -> frozenset[int]:
        key = (id(node), i)
        hit = memo.get(key)
        if hit is not None:
            return hit
        keep.append(node)
        if isinstance(node, Epsilon):
            out = frozenset((i,))
        elif isinstance(node, Sym):
            out = frozenset((i + 1,)) if i < len(word) and word[i] == node.name else frozenset()
        elif isinstance(node, Union):
            out = ends(node.left, i) | ends(node.right, i)
        elif isinstance(node, Concat):
            current = {i}
            for f in node.factors:
                current = {j for k in current for j in ends(f, k)}
            out = frozenset(current)
        elif isinstance(node, Plus):
            reached = set(ends(node.body, i))
            todo = list(reached)
            while todo:
                for j in ends(node.body, todo.pop()):
                    if j not in reached:
                        reached.add(j)
                        todo.append(j)
            out = frozenset(reached)
        elif isinstance(node, Exponentiation):
            out = frozenset(
                i + len(x) for x in _expansions(node, len(word) - i) if word[i : i + len(x)] == x
            )
        else:
            raise TypeError(f"not a J expression: {node!r}")
        memo[key] = out
        return out

    return len(word) in ends(e, 0)


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------


def format_word(w: Sequence[str]) -> str:
    if not w:
        return "ε"
    if all(len(s) == 1 for s in w):
        return "".join(w)
    return " ".join(w)


def parse_word(text: str, alphabet: Iterable[str]) -> Word:
    """Read a word: whitespace-separated symbols, or characters when every
    alphabet symbol is a single character."""
    alpha = list(alphabet)
    text = text.strip()
    if not text or text in ("ε", RESERVED):
        return ()
    if any(ch.isspace() for ch in text) or not all(len(s) == 1 for s in alpha):
        parts = tuple(text.split())
    else:
        parts = tuple(text)
    unknown = [p for p in parts if p not in alpha]
    if unknown:
        raise ValueError(f"symbols outside the alphabet: {', '.join(sorted(set(unknown)))}")
    return parts


def words_up_to(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


@dataclass(frozen=True)
class Expression:
    """An expression paired with its declared, ordered alphabet."""

    tree: JExpr
    alphabet: tuple[str, ...] = field(default=())

    @classmethod
    def parse(cls, text: str, alphabet: Sequence[str] | None = None) -> "Expression":
        tree = parse(text, alphabet)
        return cls(tree, tuple(alphabet) if alphabet is not None else tuple(sorted(symbols(tree))))

    def __str__(self) -> str:
        return to_text(self.tree)
