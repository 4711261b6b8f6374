"""Extended right-linear simple matrix grammars.

Nonterminals split into ``Q`` (rewritten by basic rules) and ``R`` (rewritten
in parallel by matrix rules). Basic rules have five forms::

    1. S -> w          w a terminal or ε
    2. S -> S1 | S2
    3. S -> S1 S2
    4. S -> S S
    5. S -> (A11 .. A1m, ..., Ak1 .. Akm)

and matrix rules two::

    6. [A1 -> S1 A1, ..., Ak -> Sk Ak]
    7. [A1 -> w1, ..., Ak -> wk]

A form-5 rule opens a k-tuple. Column by column, a form-6 rule is applied
r >= 0 times in parallel to the leftmost nonterminal of every coordinate, then
a form-7 rule closes the column. Once no R-nonterminal is left the
coordinates are merged into one string and the derivation continues.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import ClassVar, Mapping, Sequence, Union as TypingUnion

from .errors import ResourceLimitError
from .jexpr import (
    Concat,
    Epsilon,
    Exponentiation,
    Fixed,
    JExpr,
    Plus,
    Sym,
    Union,
    Word,
    check,
    format_word,
    normalize,
    symbol_sequence,
    symbols,
)

DEFAULT_FRONTIER_CAP = 200_000


@dataclass(frozen=True)
class Terminal:
    form: ClassVar[int] = 1
    lhs: str
    word: Word

    def __str__(self) -> str:
        return f"{self.lhs} → {format_word(self.word)}"


@dataclass(frozen=True)
class Choice:
    form: ClassVar[int] = 2
    lhs: str
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.lhs} → {self.left} | {self.right}"


@dataclass(frozen=True)
class Chain:
    form: ClassVar[int] = 3
    lhs: str
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.lhs} → {self.left} {self.right}"


@dataclass(frozen=True)
class Double:
    form: ClassVar[int] = 4
    lhs: str

    def __str__(self) -> str:
        return f"{self.lhs} → {self.lhs} {self.lhs}"


@dataclass(frozen=True)
class Open:
    form: ClassVar[int] = 5
    lhs: str
    coords: tuple[tuple[str, ...], ...]

    @property
    def width(self) -> int:
        return len(self.coords[0]) if self.coords else 0

    def column(self, j: int) -> tuple[str, ...]:
        return tuple(c[j] for c in self.coords)

    def __str__(self) -> str:
        return f"{self.lhs} → (" + ", ".join(" ".join(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class Repeat:
    form: ClassVar[int] = 6
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]

    def __str__(self) -> str:
        return "[" + ", ".join(f"{a} → {s} {a}" for a, s in zip(self.lhs, self.rhs)) + "]"


@dataclass(frozen=True)
class Close:
    form: ClassVar[int] = 7
    lhs: tuple[str, ...]
    words: tuple[Word, ...]

    def __str__(self) -> str:
        return "[" + ", ".join(f"{a} → {format_word(w)}" for a, w in zip(self.lhs, self.words)) + "]"


Rule = TypingUnion[Terminal, Choice, Chain, Double, Open, Repeat, Close]
BASIC = (Terminal, Choice, Chain, Double, Open)


@dataclass(frozen=True)
class ERLSMG:
    terminals: tuple[str, ...]
    q: tuple[str, ...]
    r: tuple[str, ...]
    start: str
    rules: tuple[Rule, ...]

    def basic(self) -> list[tuple[int, Rule]]:
        return [(i, x) for i, x in enumerate(self.rules) if isinstance(x, BASIC)]

    def to_json(self) -> dict:
        rules = []
        for x in self.rules:
            if isinstance(x, Terminal):
                rules.append({"form": 1, "lhs": x.lhs, "word": list(x.word)})
            elif isinstance(x, (Choice, Chain)):
                rules.append({"form": x.form, "lhs": x.lhs, "rhs": [x.left, x.right]})
            elif isinstance(x, Double):
                rules.append({"form": 4, "lhs": x.lhs})
            elif isinstance(x, Open):
                rules.append({"form": 5, "lhs": x.lhs, "tuple": [list(c) for c in x.coords]})
            elif isinstance(x, Repeat):
                rules.append({"form": 6, "lhs": list(x.lhs), "rhs_state": list(x.rhs)})
            else:
                rules.append({"form": 7, "lhs": list(x.lhs), "words": [list(w) for w in x.words]})
        return {
            "terminals": list(self.terminals),
            "Q": list(self.q),
            "R": list(self.r),
            "start": self.start,
            "rules": rules,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ERLSMG":
        rules: list[Rule] = []
        for d in data["rules"]:
            form = d["form"]
            if form == 1:
                rules.append(Terminal(d["lhs"], tuple(d["word"])))
            elif form in (2, 3):
                left, right = d["rhs"]
                rules.append((Choice if form == 2 else Chain)(d["lhs"], left, right))
            elif form == 4:
                rules.append(Double(d["lhs"]))
            elif form == 5:
                rules.append(Open(d["lhs"], tuple(tuple(c) for c in d["tuple"])))
            elif form == 6:
                rules.append(Repeat(tuple(d["lhs"]), tuple(d["rhs_state"])))
            elif form == 7:
                rules.append(Close(tuple(d["lhs"]), tuple(tuple(w) for w in d["words"])))
            else:
                raise ValueError(f"unknown rule form {form!r}")
        return cls(tuple(data["terminals"]), tuple(data["Q"]), tuple(data["R"]), data["start"], tuple(rules))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def pretty(self) -> str:
        lines = [f"Σ = {{{', '.join(self.terminals)}}}", f"Q = {{{', '.join(self.q)}}}", f"R = {{{', '.join(self.r)}}}", f"start {self.start}"]
        lines += [f"{i:>3}  ({x.form})  {x}" for i, x in enumerate(self.rules)]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrammarViolation:
    form: str
    message: str

    def __str__(self) -> str:
        return f"[{self.form}] {self.message}"


def validate_grammar(g: ERLSMG, restricted: bool = False) -> list[GrammarViolation]:
    """Every breach of the rule-form constraints; empty when the grammar is
    well formed. With ``restricted`` the LHS of form-2 and form-4 rules must
    also stay out of form-6 right-hand sides."""
    out: list[GrammarViolation] = []

    def bad(form: str, message: str) -> None:
        out.append(GrammarViolation(form, message))

    q, r, sigma = set(g.q), set(g.r), set(g.terminals)
    if q & r:
        bad("nonterminals", f"Q and R overlap on {sorted(q & r)}")
    if g.start not in q:
        bad("start", f"start symbol {g.start!r} is not in Q")
    if sigma & (q | r):
        bad("nonterminals", f"terminals and nonterminals overlap on {sorted(sigma & (q | r))}")

    basic_rhs: dict[str, list[Rule]] = {}
    for x in g.rules:
        if isinstance(x, (Choice, Chain)):
            for s in (x.left, x.right):
                basic_rhs.setdefault(s, []).append(x)
        elif isinstance(x, Double):
            basic_rhs.setdefault(x.lhs, []).append(x)
    in_matrix = {s for x in g.rules if isinstance(x, Repeat) for s in x.rhs}
    columns: set[tuple[str, ...]] = set()
    lhs_forms: dict[str, set[int]] = {}
    for x in g.rules:
        if isinstance(x, BASIC):
            lhs_forms.setdefault(x.lhs, set()).add(x.form)

    for x in g.rules:
        if isinstance(x, BASIC):
            if x.lhs not in q:
                bad(f"form {x.form}", f"{x}: left-hand side is not in Q")
            users = basic_rhs.get(x.lhs, [])
        if isinstance(x, Terminal):
            if len(x.word) > 1 or not set(x.word) <= sigma:
                bad("form 1", f"{x}: right-hand side must be one terminal or ε")
        if isinstance(x, (Choice, Chain)):
            if len({x.lhs, x.left, x.right}) != 3:
                bad(f"form {x.form}", f"{x}: the three nonterminals must be distinct")
            for s in (x.left, x.right):
                if s not in q:
                    bad(f"form {x.form}", f"{x}: {s!r} is not in Q")
        if isinstance(x, (Terminal, Choice, Chain)) and users:
            bad(f"form {x.form}", f"{x}: {x.lhs} appears on the right-hand side of basic rule {users[0]}")
        if isinstance(x, Double):
            others = [u for u in users if not (isinstance(u, Double) and u.lhs == x.lhs)]
            if others:
                bad("form 4", f"{x}: {x.lhs} appears on the right-hand side of basic rule {others[0]}")
        if isinstance(x, Open):
            if not x.coords or not x.coords[0]:
                bad("form 5", f"{x}: needs k >= 1 coordinates of m >= 1 nonterminals")
            elif len({len(c) for c in x.coords}) != 1:
                bad("form 5", f"{x}: coordinates have different lengths")
            else:
                columns.update(x.column(j) for j in range(x.width))
            for a in (a for c in x.coords for a in c):
                if a not in r:
                    bad("form 5", f"{x}: {a!r} is not in R")
            if x.lhs in in_matrix:
                bad("form 5", f"{x}: {x.lhs} appears in a matrix rule")

    repeats: dict[tuple[str, ...], tuple[str, ...]] = {}
    for x in g.rules:
        if isinstance(x, (Repeat, Close)):
            k = len(x.lhs)
            if k == 0:
                bad(f"form {x.form}", f"{x}: needs k >= 1 components")
            for a in x.lhs:
                if a not in r:
                    bad(f"form {x.form}", f"{x}: {a!r} is not in R")
            if x.lhs not in columns:
                bad(f"form {x.form}", f"{x}: left-hand side matches no column of a form-5 tuple")
        if isinstance(x, Repeat):
            if len(x.rhs) != len(x.lhs):
                bad("form 6", f"{x}: left and right tuples differ in width")
            for s in x.rhs:
                if s not in q:
                    bad("form 6", f"{x}: {s!r} is not in Q")
                elif 5 in lhs_forms.get(s, ()):
                    bad("form 6", f"{x}: {s} is the left-hand side of a form-5 rule")
            if x.lhs in repeats and repeats[x.lhs] != x.rhs:
                bad("restriction 1", f"{x}: a different form-6 rule exists for the same left-hand side")
            repeats.setdefault(x.lhs, x.rhs)
            if restricted:
                for s in x.rhs:
                    if lhs_forms.get(s, set()) & {2, 4}:
                        bad("restricted form", f"{x}: {s} is the left-hand side of a form-2 or form-4 rule")
        if isinstance(x, Close):
            if len(x.words) != len(x.lhs):
                bad("form 7", f"{x}: left and right tuples differ in width")
            for w in x.words:
                if not set(w) <= sigma:
                    bad("form 7", f"{x}: non-terminal symbols in {format_word(w)}")
    known = q | r
    for x in g.rules:
        names = {x.lhs} if isinstance(x, BASIC) else set(x.lhs)
        if isinstance(x, (Choice, Chain)):
            names |= {x.left, x.right}
        elif isinstance(x, Open):
            names |= {a for c in x.coords for a in c}
        elif isinstance(x, Repeat):
            names |= set(x.rhs)
        for n in sorted(names - known):
            bad("nonterminals", f"{x}: undeclared nonterminal {n!r}")
    return out


def is_valid(g: ERLSMG, restricted: bool = False) -> bool:
    return not validate_grammar(g, restricted)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

Trace = tuple[int, ...]


def enumerate_grammar(g: ERLSMG, max_len: int, cap: int = DEFAULT_FRONTIER_CAP) -> set[Word]:
    """All words of length at most ``max_len`` generated from the start symbol."""
    return set(derivations(g, max_len, cap))


def derivations(g: ERLSMG, max_len: int, cap: int = DEFAULT_FRONTIER_CAP) -> dict[Word, Trace]:
    """Each word of length at most ``max_len`` with one leftmost derivation,
    given as the sequence of applied rule indices."""
    return _Enumerator(g, max_len, cap).run()


class _Enumerator:
    def __init__(self, g: ERLSMG, n: int, cap: int):
        self.g, self.n, self.cap = g, n, cap
        self.lang: dict[str, dict[Word, Trace]] = {s: {} for s in g.q}
        self.repeat: dict[tuple[str, ...], tuple[int, Repeat]] = {}
        self.close: dict[tuple[str, ...], list[tuple[int, Close]]] = {}
        for i, x in enumerate(g.rules):
            if isinstance(x, Repeat):
                self.repeat.setdefault(x.lhs, (i, x))
            elif isinstance(x, Close):
                self.close.setdefault(x.lhs, []).append((i, x))

    def run(self) -> dict[Word, Trace]:
        changed = True
        while changed:
            changed = False
            for i, x in self.g.basic():
                target = self.lang.setdefault(x.lhs, {})
                for w, t in self.apply(i, x):
                    if w not in target:
                        target[w] = t
                        changed = True
        return dict(sorted(self.lang.get(self.g.start, {}).items()))

    def apply(self, i: int, x: Rule) -> list[tuple[Word, Trace]]:
        n = self.n
        if isinstance(x, Terminal):
            return [(x.word, (i,))] if len(x.word) <= n else []
        if isinstance(x, Choice):
            return [(w, (i,) + t) for s in (x.left, x.right) for w, t in list(self.lang.get(s, {}).items())]
        if isinstance(x, (Chain, Double)):
            left, right = (x.left, x.right) if isinstance(x, Chain) else (x.lhs, x.lhs)
            out = []
            for u, tu in list(self.lang.get(left, {}).items()):
                for v, tv in list(self.lang.get(right, {}).items()):
                    if len(u) + len(v) <= n:
                        out.append((u + v, (i,) + tu + tv))
            return out
        return self.open_tuple(i, x)

    def open_tuple(self, i: int, x: Open) -> list[tuple[Word, Trace]]:
        k, n = len(x.coords), self.n
        # state: coordinate words -> (matrix rule trace, per-coordinate sub-derivations)
        states: dict[tuple[Word, ...], tuple[Trace, tuple[Trace, ...]]] = {((),) * k: ((), ((),) * k)}
        for j in range(x.width):
            col = x.column(j)
            if col in self.repeat:
                idx, rule = self.repeat[col]
                langs = [list(self.lang.get(s, {}).items()) for s in rule.rhs]
                frontier = list(states)
                while frontier:
                    nxt = []
                    for words in frontier:
                        mt, subs = states[words]
                        room = n - sum(map(len, words))
                        for choice in _bounded_product(langs, room):
                            grown = tuple(w + u for w, (u, _) in zip(words, choice))
                            if grown not in states:
                                states[grown] = (mt + (idx,), tuple(s + t for s, (_, t) in zip(subs, choice)))
                                nxt.append(grown)
                                if len(states) > self.cap:
                                    raise ResourceLimitError(f"tuple frontier exceeded {self.cap} states")
                    frontier = nxt
            closed: dict[tuple[Word, ...], tuple[Trace, tuple[Trace, ...]]] = {}
            for idx, rule in self.close.get(col, []):
                extra = sum(map(len, rule.words))
                for words, (mt, subs) in states.items():
                    if sum(map(len, words)) + extra <= n:
                        grown = tuple(w + u for w, u in zip(words, rule.words))
                        closed.setdefault(grown, (mt + (idx,), subs))
            states = closed
        out = []
        for words, (mt, subs) in states.items():
            out.append((tuple(itertools.chain.from_iterable(words)), (i,) + mt + tuple(itertools.chain.from_iterable(subs))))
        return out


def _bounded_product(langs: list[list[tuple[Word, Trace]]], room: int):
    """Choices of one (word, trace) per coordinate with total length <= room."""
    if not langs:
        yield ()
        return
    head, rest = langs[0], langs[1:]
    for item in head:
        if len(item[0]) <= room:
            for tail in _bounded_product(rest, room - len(item[0])):
                yield (item,) + tail


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


@dataclass
class _Tuple:
    coords: list[list[str]]  # each coordinate: terminals / Q / R names
    r_names: frozenset[str] = field(default_factory=frozenset)

    def front(self) -> tuple[str, ...] | None:
        heads = []
        for c in self.coords:
            h = next((x for x in c if x in self.r_names), None)
            if h is None:
                return None
            heads.append(h)
        return tuple(heads)


class DerivationError(ValueError):
    pass


def replay(g: ERLSMG, trace: Sequence[int]) -> Word:
    """Apply ``trace`` as a leftmost derivation from the start symbol and
    return the derived word. Tuples are merged as soon as no R-nonterminal is
    left in any coordinate."""
    q, r = set(g.q), frozenset(g.r)
    form: list = [g.start]
    for step, idx in enumerate(trace):
        if not 0 <= idx < len(g.rules):
            raise DerivationError(f"step {step}: no rule {idx}")
        x = g.rules[idx]
        pos = next((p for p, item in enumerate(form) if isinstance(item, _Tuple) or item in q), None)
        if pos is None:
            raise DerivationError(f"step {step}: nothing left to rewrite")
        item = form[pos]
        if isinstance(x, BASIC):
            if isinstance(item, _Tuple) or item != x.lhs:
                raise DerivationError(f"step {step}: rule {x} does not apply to the leftmost nonterminal")
            if isinstance(x, Terminal):
                new = list(x.word)
            elif isinstance(x, Choice):
                # the branch is the left-hand side of the next rule
                nxt = g.rules[trace[step + 1]] if step + 1 < len(trace) and 0 <= trace[step + 1] < len(g.rules) else None
                if not isinstance(nxt, BASIC) or nxt.lhs not in (x.left, x.right):
                    raise DerivationError(f"step {step}: {x} is not followed by a rule for either branch")
                new = [nxt.lhs]
            elif isinstance(x, Chain):
                new = [x.left, x.right]
            elif isinstance(x, Double):
                new = [x.lhs, x.lhs]
            else:
                new = [_Tuple([list(c) for c in x.coords], r)]
            form[pos : pos + 1] = new
            continue
        if not isinstance(item, _Tuple) or item.front() != x.lhs:
            raise DerivationError(f"step {step}: matrix rule {x} does not match the open tuple")
        for c, a, rep in zip(item.coords, x.lhs, x.rhs if isinstance(x, Repeat) else x.words):
            at = c.index(a)
            c[at : at + 1] = [rep, a] if isinstance(x, Repeat) else list(rep)
        if all(not any(s in r for s in c) for c in item.coords):
            form[pos : pos + 1] = [s for c in item.coords for s in c]
    if any(isinstance(x, _Tuple) or x in q or x in r for x in form):
        raise DerivationError("derivation incomplete")
    return tuple(form)


# ---------------------------------------------------------------------------
# From J expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Template:
    """A tuple before naming: ``k`` coordinates and a list of columns, each a
    per-coordinate repetition nonterminal tuple (or None: no form-6 rule) and
    the form-7 word tuple."""

    k: int
    columns: tuple[tuple[tuple[str, ...] | None, tuple[Word, ...]], ...]

    def then(self, other: "_Template", pad: str) -> "_Template":
        def widen(col, left: int, right: int):
            rep, words = col
            if rep is not None:
                rep = (pad,) * left + rep + (pad,) * right
            return rep, ((),) * left + words + ((),) * right

        cols = tuple(widen(c, 0, other.k) for c in self.columns) + tuple(widen(c, self.k, 0) for c in other.columns)
        return _Template(self.k + other.k, cols)


class _GrammarBuilder:
    def __init__(self, alphabet: Sequence[str]):
        self.alphabet = tuple(alphabet)
        self.rules: list[Rule] = []
        self.q: list[str] = ["S0"]
        self.r: list[str] = []
        self._eps: str | None = None
        self._empty_tuple: str | None = None
        self._words: dict[Word, str] = {}

    def fresh_q(self) -> str:
        name = f"S{len(self.q)}"
        self.q.append(name)
        return name

    def fresh_r(self) -> str:
        name = f"A{len(self.r) + 1}"
        self.r.append(name)
        return name

    def eps(self) -> str:
        """A form-1 nonterminal for ε, used to pad repetitions."""
        if self._eps is None:
            self._eps = self.fresh_q()
            self.rules.append(Terminal(self._eps, ()))
        return self._eps

    def open(self, lhs: str, t: _Template) -> None:
        names = [[self.fresh_r() for _ in t.columns] for _ in range(t.k)]
        self.rules.append(Open(lhs, tuple(tuple(row) for row in names)))
        for j, (rep, words) in enumerate(t.columns):
            col = tuple(row[j] for row in names)
            if rep is not None:
                self.rules.append(Repeat(col, rep))
            self.rules.append(Close(col, words))

    def tuple_for(self, alternatives: list[_Template]) -> str:
        lhs = self.fresh_q()
        for t in alternatives:
            self.open(lhs, t)
        return lhs

    def empty_tuple(self) -> str:
        if self._empty_tuple is None:
            self._empty_tuple = self.tuple_for([_Template(1, ((None, ((),)),))])
        return self._empty_tuple

    def repeater(self, word: Word) -> str:
        """A nonterminal of form 1 or 3 deriving exactly ``word``; it may sit
        on the right of a form-6 rule."""
        if not word:
            return self.eps()
        if word not in self._words:
            if len(word) == 1:
                name = self.fresh_q()
                self.rules.append(Terminal(name, word))
            else:
                block = self.tuple_for([_Template(1, ((None, (word,)),))])
                name = self.fresh_q()
                self.rules.append(Chain(name, block, self.empty_tuple()))
            self._words[word] = name
        return self._words[word]

    def templates(self, e: JExpr) -> list[_Template]:
        if isinstance(e, Epsilon):
            return [_Template(1, ((None, ((),)),))]
        if isinstance(e, Sym):
            return [_Template(1, ((None, ((e.name,),)),))]
        if isinstance(e, Union):
            return self.templates(e.left) + self.templates(e.right)
        if isinstance(e, Concat):
            acc = [_Template(0, ())]
            for f in e.factors:
                alts = self.templates(f)
                acc = [a.then(b, self.eps()) for a in acc for b in alts]
            return acc
        if isinstance(e, Plus):
            body = self.templates(e.body)
            star = self.fresh_q()
            self.rules.append(Chain(star, self.tuple_for(body), self.empty_tuple()))
            loop = _Template(1, (((star,), ((),)),))
            return [b.then(loop, self.eps()) for b in body]
        if isinstance(e, Exponentiation):
            return [self.exponentiation(e)]
        raise TypeError(f"unexpected node {e!r}")

    def exponentiation(self, e: Exponentiation) -> _Template:
        words: list[Word] = []
        for base, _ in e.terms:
            w = symbol_sequence(base)
            if w is None:
                raise TypeError(f"base {base!r} is not a symbol sequence")
            words.append(w)
        cols = []
        if any(isinstance(x, Fixed) for _, x in e.terms):
            cols.append((None, tuple(w * x.value if isinstance(x, Fixed) else () for w, (_, x) in zip(words, e.terms))))
        for name in e.variables():
            mine = [not isinstance(x, Fixed) and x.name == name for _, x in e.terms]
            rep = tuple(self.repeater(w) if m else self.eps() for w, m in zip(words, mine))
            cols.append((rep, tuple(w if m else () for w, m in zip(words, mine))))
        return _Template(len(e.terms), tuple(cols))

    def top(self, e: JExpr) -> None:
        if isinstance(e, Epsilon):
            self.rules.append(Terminal("S0", ()))
        elif isinstance(e, Union):
            left, right = self.tuple_for(self.templates(e.left)), self.tuple_for(self.templates(e.right))
            self.rules.insert(0, Choice("S0", left, right))
        elif isinstance(e, Plus):
            alts = self.templates(e.body)
            self.rules.insert(0, Double("S0"))
            for t in alts:
                self.open("S0", t)
        else:
            for t in self.templates(e):
                self.open("S0", t)

    def grammar(self) -> ERLSMG:
        return ERLSMG(self.alphabet, tuple(self.q), tuple(self.r), "S0", tuple(self.rules))


def grammar_from_jexpr(e: JExpr, alphabet: Sequence[str] | None = None) -> ERLSMG:
    """A grammar generating L(e) in which no form-2 or form-4 left-hand side
    occurs on the right of a form-6 rule.

    Each exponentiation becomes one tuple with a coordinate per term and a
    column per variable; the column's form-7 word supplies the mandatory
    first repetition and its form-6 rule the optional further ones.
    """
    check(e, alphabet)
    alphabet = sorted(symbols(e)) if alphabet is None else list(alphabet)
    b = _GrammarBuilder(alphabet)
    b.top(normalize(e))
    return b.grammar()
