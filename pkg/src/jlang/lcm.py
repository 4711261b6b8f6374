"""Linear-space multicounter machines.

A machine is a one-way nondeterministic finite automaton with counters that
can be incremented, decremented and tested for zero. It accepts a word when
some run reads the whole word and stops in the final state with every counter
at zero. Counters of the machines built here never exceed the input length.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import SpaceBoundViolation
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
    normalize,
    symbol_sequence,
    symbols,
)

ZERO, POSITIVE = "=0", ">0"


@dataclass(frozen=True)
class Move:
    src: str
    read: str | None
    dst: str
    guards: tuple[tuple[int, str], ...] = ()
    actions: tuple[tuple[int, int], ...] = ()

    def enabled(self, counters: Sequence[int]) -> bool:
        return all((counters[c] == 0) == (g == ZERO) for c, g in self.guards)

    def apply(self, counters: tuple[int, ...]) -> tuple[int, ...]:
        if not self.actions:
            return counters
        out = list(counters)
        for c, d in self.actions:
            out[c] += d
        return tuple(out)

    def label(self) -> str:
        parts = [self.read if self.read is not None else "ε"]
        parts += [f"c{c}{g}" for c, g in self.guards]
        parts += [f"c{c}{'+' if d > 0 else '-'}{abs(d)}" for c, d in self.actions]
        return " ".join(parts)


@dataclass(frozen=True)
class LCMachine:
    states: tuple[str, ...]
    start: str
    final: str
    counters: int
    alphabet: tuple[str, ...]
    moves: tuple[Move, ...]

    def __post_init__(self) -> None:
        known = set(self.states)
        if self.start not in known or self.final not in known:
            raise ValueError("start and final must be states of the machine")
        for m in self.moves:
            if m.src not in known or m.dst not in known:
                raise ValueError(f"move {m} references an unknown state")
            if m.read is not None and m.read not in self.alphabet:
                raise ValueError(f"move reads {m.read!r}, which is outside the alphabet")
            for c, g in m.guards:
                if not 0 <= c < self.counters or g not in (ZERO, POSITIVE):
                    raise ValueError(f"bad guard {(c, g)}")
            for c, d in m.actions:
                if not 0 <= c < self.counters or d not in (1, -1):
                    raise ValueError(f"bad action {(c, d)}")
                if d < 0 and (c, POSITIVE) not in m.guards:
                    raise ValueError("every decrement must be guarded by a non-zero test")

    def outgoing(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {s: [] for s in self.states}
        for k, m in enumerate(self.moves):
            out[m.src].append(k)
        return out

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "start": self.start,
            "final": self.final,
            "counters": self.counters,
            "alphabet": list(self.alphabet),
            "moves": [
                {
                    "from": m.src,
                    "read": m.read,
                    "to": m.dst,
                    "guards": {str(c): g for c, g in m.guards},
                    "actions": {str(c): d for c, d in m.actions},
                }
                for m in self.moves
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LCMachine":
        moves = tuple(
            Move(
                m["from"],
                m.get("read"),
                m["to"],
                tuple(sorted((int(c), g) for c, g in m.get("guards", {}).items())),
                tuple(sorted((int(c), int(d)) for c, d in m.get("actions", {}).items())),
            )
            for m in data["moves"]
        )
        return cls(tuple(data["states"]), data["start"], data["final"], int(data["counters"]), tuple(data["alphabet"]), moves)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_dot(self) -> str:
        lines = ["digraph lcm {", "  rankdir=LR;", '  "" [shape=none];', f'  "" -> "{self.start}";']
        for s in self.states:
            shape = "doublecircle" if s == self.final else "circle"
            lines.append(f'  "{s}" [shape={shape}];')
        for m in self.moves:
            lines.append(f'  "{m.src}" -> "{m.dst}" [label="{m.label()}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class _Builder:
    def __init__(self) -> None:
        self.count = 0
        self.counters = 0
        self.moves: list[Move] = []

    def state(self) -> str:
        self.count += 1
        return f"s{self.count}"

    def counter(self) -> int:
        self.counters += 1
        return self.counters - 1

    def move(self, src: str, read: str | None, dst: str, guards=(), actions=()) -> None:
        self.moves.append(Move(src, read, dst, tuple(sorted(guards)), tuple(sorted(actions))))

    def word(self, src: str, word: Word, dst: str, guards=(), actions=()) -> None:
        """Read ``word`` from ``src`` to ``dst``; guards and actions ride on
        the last symbol."""
        if not word:
            self.move(src, None, dst, guards, actions)
            return
        current = src
        for i, x in enumerate(word):
            last = i == len(word) - 1
            nxt = dst if last else self.state()
            self.move(current, x, nxt, guards if last else (), actions if last else ())
            current = nxt

    def build(self, e: JExpr, src: str, dst: str) -> None:
        if isinstance(e, Epsilon):
            self.move(src, None, dst)
        elif isinstance(e, Sym):
            self.move(src, e.name, dst)
        elif isinstance(e, Union):
            self.build(e.left, src, dst)
            self.build(e.right, src, dst)
        elif isinstance(e, Concat):
            current = src
            for i, f in enumerate(e.factors):
                nxt = dst if i == len(e.factors) - 1 else self.state()
                self.build(f, current, nxt)
                current = nxt
        elif isinstance(e, Plus):
            hub_in, hub_out = self.state(), self.state()
            self.move(src, None, hub_in)
            self.build(e.body, hub_in, hub_out)
            self.move(hub_out, None, hub_in)
            self.move(hub_out, None, dst)
        elif isinstance(e, Exponentiation):
            self.exponentiation(e, src, dst)
        else:
            raise TypeError(f"unexpected node {e!r}")

    def exponentiation(self, e: Exponentiation, src: str, dst: str) -> None:
        # Variable q with m non-empty terms uses counters c_1..c_{m-1}: the
        # first term counts its repetitions into c_1, term o moves c_o into
        # c_{o+1} one repetition at a time, the last term drains c_{m-1}.
        chains: dict[str, list[int]] = {}
        seen: dict[str, int] = {}
        for base, exp in e.terms:
            if isinstance(exp, Fixed) or not symbol_sequence(base):
                continue
            seen[exp.name] = seen.get(exp.name, 0) + 1
        for name, m in seen.items():
            chains[name] = [self.counter() for _ in range(m - 1)]
        done: dict[str, int] = {}
        current = src
        for i, (base, exp) in enumerate(e.terms):
            word = symbol_sequence(base)
            if word is None:
                raise TypeError(f"base {base!r} is not a symbol sequence")
            nxt = dst if i == len(e.terms) - 1 else self.state()
            if isinstance(exp, Fixed):
                for k in range(exp.value):
                    mid = nxt if k == exp.value - 1 else self.state()
                    self.word(current, word, mid)
                    current = mid
                if exp.value == 0:
                    self.move(current, None, nxt)
            elif not word:
                self.move(current, None, nxt)
            else:
                o = done.get(exp.name, 0)
                done[exp.name] = o + 1
                chain = chains[exp.name]
                guards: list[tuple[int, str]] = []
                actions: list[tuple[int, int]] = []
                exit_guards: list[tuple[int, str]] = []
                if o > 0:
                    guards.append((chain[o - 1], POSITIVE))
                    actions.append((chain[o - 1], -1))
                    exit_guards.append((chain[o - 1], ZERO))
                if o < len(chain):
                    actions.append((chain[o], 1))
                hub = self.state()
                self.word(current, word, hub, guards, actions)
                self.word(hub, word, hub, guards, actions)
                self.move(hub, None, nxt, exit_guards)
            current = nxt


def build_lcm(e: JExpr, alphabet: Sequence[str] | None = None) -> LCMachine:
    """An LCM accepting exactly L(e)."""
    check(e, alphabet)
    alphabet = tuple(sorted(symbols(e)) if alphabet is None else alphabet)
    b = _Builder()
    start, final = "s0", "f"
    b.build(normalize(e), start, final)
    states = tuple(sorted({start, final} | {f"s{k}" for k in range(1, b.count + 1)}, key=_state_key))
    return LCMachine(states, start, final, b.counters, alphabet, tuple(b.moves))


def _state_key(s: str) -> tuple[int, int]:
    return (1, 0) if s == "f" else (0, int(s[1:]))


@dataclass(frozen=True)
class RunResult:
    accepted: bool
    witness: tuple[int, ...] | None
    max_counter_seen: int
    visited: int

    def __bool__(self) -> bool:
        return self.accepted


def run_lcm(m: LCMachine, w: Sequence[str]) -> RunResult:
    """Breadth-first search over (state, input position, counters).

    Raises SpaceBoundViolation if any reachable counter exceeds ``len(w)``.
    """
    w = tuple(w)
    bad = [x for x in w if x not in m.alphabet]
    if bad:
        raise ValueError(f"symbols {sorted(set(bad))} are outside the machine alphabet")
    n = len(w)
    out = m.outgoing()
    start = (m.start, 0, (0,) * m.counters)
    parent: dict[tuple, tuple | None] = {start: None}
    queue = deque([start])
    max_seen = 0
    goal = None
    while queue:
        config = queue.popleft()
        state, pos, counters = config
        if state == m.final and pos == n and not any(counters):
            goal = config
            break
        for k in out[state]:
            mv = m.moves[k]
            if not mv.enabled(counters):
                continue
            if mv.read is not None and (pos == n or w[pos] != mv.read):
                continue
            nxt_counters = mv.apply(counters)
            top = max(nxt_counters, default=0)
            if top > n:
                raise SpaceBoundViolation(f"counter reached {top} on an input of length {n}")
            nxt = (mv.dst, pos + (mv.read is not None), nxt_counters)
            if nxt not in parent:
                parent[nxt] = (config, k)
                max_seen = max(max_seen, top)
                queue.append(nxt)
    witness = None
    if goal is not None:
        path: list[int] = []
        node = goal
        while parent[node] is not None:
            node, k = parent[node]
            path.append(k)
        witness = tuple(reversed(path))
    return RunResult(goal is not None, witness, max_seen, len(parent))


def replay(m: LCMachine, w: Sequence[str], witness: Sequence[int]) -> bool:
    """Follow ``witness`` deterministically and report whether it accepts."""
    w = tuple(w)
    state, pos, counters = m.start, 0, (0,) * m.counters
    for k in witness:
        if not 0 <= k < len(m.moves):
            return False
        mv = m.moves[k]
        if mv.src != state or not mv.enabled(counters):
            return False
        if mv.read is not None:
            if pos == len(w) or w[pos] != mv.read:
                return False
            pos += 1
        counters = mv.apply(counters)
        if max(counters, default=0) > len(w):
            return False
        state = mv.dst
    return state == m.final and pos == len(w) and not any(counters)
