"""Accepting place/transition systems with unit arc weights.

A system has *input places* holding the input vector, and *work places*, one
of which (the initial place) carries the single control token at the start.
The system accepts a vector when some firing path reaches a dead marking that
marks the final place, with the final place unmarked everywhere before.

J P/T systems are the systems in which every transition is a *join* that
consumes one input-place token and one work-place token and produces one
work-place token. In such a system exactly one work token exists at any time,
so acceptance is decided by a search over (remaining input, token location).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import NetShapeError, ResourceLimitError

InputVector = tuple[int, ...]


@dataclass(frozen=True)
class Transition:
    id: str
    inputs: frozenset[str]
    outputs: frozenset[str]


@dataclass(frozen=True)
class Marking:
    """Immutable multiset of places; absent places hold zero tokens."""

    counts: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, int]) -> "Marking":
        for p, k in mapping.items():
            if k < 0:
                raise ValueError(f"negative token count on {p!r}")
        return cls(tuple(sorted((p, k) for p, k in mapping.items() if k)))

    def __getitem__(self, place: str) -> int:
        for p, k in self.counts:
            if p == place:
                return k
        return 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{p}:{k}" for p, k in self.counts) + "}"


@dataclass(frozen=True)
class PTSystem:
    """An accepting P/T system.

    ``input_places`` fixes the coordinate order of input vectors. When
    ``accepts_empty`` is set the all-zero vector is accepted regardless of the
    net; compiled systems use it for expressions whose language contains ε.
    """

    places: tuple[str, ...]
    input_places: tuple[str, ...]
    transitions: tuple[Transition, ...]
    initial_place: str
    final_place: str
    accepts_empty: bool = False
    initial_marking: Marking = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        places = tuple(sorted(set(self.places)))
        if len(places) != len(self.places):
            raise NetShapeError("duplicate place ids")
        trans = tuple(sorted(self.transitions, key=lambda t: t.id))
        ids = [t.id for t in trans]
        if len(set(ids)) != len(ids):
            raise NetShapeError("duplicate transition ids")
        if set(ids) & set(places):
            raise NetShapeError("places and transitions must be disjoint")
        known = set(places)
        for t in trans:
            if not t.inputs or not t.outputs:
                raise NetShapeError(f"transition {t.id!r} needs at least one input and one output place")
            unknown = (t.inputs | t.outputs) - known
            if unknown:
                raise NetShapeError(f"transition {t.id!r} references unknown places {sorted(unknown)}")
        if len(set(self.input_places)) != len(self.input_places) or not set(self.input_places) <= known:
            raise NetShapeError("input places must be distinct places of the net")
        for role, p in (("initial", self.initial_place), ("final", self.final_place)):
            if p not in known:
                raise NetShapeError(f"{role} place {p!r} is not a place of the net")
            if p in self.input_places:
                raise NetShapeError(f"{role} place {p!r} must be a work place")
        if self.initial_place == self.final_place:
            raise NetShapeError("initial and final place must differ; use accepts_empty for the empty input")
        marking = self.initial_marking
        if marking is None:
            marking = Marking.of({self.initial_place: 1})
        elif not isinstance(marking, Marking):
            marking = Marking.of(marking)
        if marking.as_dict() != {self.initial_place: 1}:
            raise NetShapeError("the initial marking must put exactly one token on the initial place")
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "input_places", tuple(self.input_places))
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "initial_marking", marking)

    @classmethod
    def build(
        cls,
        input_places: Sequence[str],
        transitions: Mapping[str, tuple[Iterable[str], Iterable[str]]],
        initial_place: str,
        final_place: str,
        work_places: Iterable[str] = (),
        accepts_empty: bool = False,
    ) -> "PTSystem":
        """Build from ``{transition id: (input places, output places)}``;
        work places are collected from the arcs."""
        places = set(input_places) | set(work_places) | {initial_place, final_place}
        trans = []
        for tid, (ins, outs) in transitions.items():
            ins, outs = list(ins), list(outs)
            if len(set(ins)) != len(ins) or len(set(outs)) != len(outs):
                raise NetShapeError(f"duplicate arcs on transition {tid!r}")
            places |= set(ins) | set(outs)
            trans.append(Transition(tid, frozenset(ins), frozenset(outs)))
        return cls(tuple(places), tuple(input_places), tuple(trans), initial_place, final_place, accepts_empty)

    @property
    def work_places(self) -> tuple[str, ...]:
        inputs = set(self.input_places)
        return tuple(p for p in self.places if p not in inputs)

    def transition(self, tid: str) -> Transition:
        return self._by_id[tid]

    @cached_property
    def _by_id(self) -> dict[str, Transition]:
        return {t.id: t for t in self.transitions}

    @cached_property
    def is_jpt(self) -> bool:
        return analyze_topology(self).is_jpt

    def initial_configuration(self, v: Sequence[int]) -> Marking:
        v = tuple(v)
        if len(v) != len(self.input_places):
            raise ValueError(f"expected a vector of length {len(self.input_places)}, got {len(v)}")
        if any(x < 0 for x in v):
            raise ValueError("input vector entries must be non-negative")
        counts = dict(zip(self.input_places, v))
        counts[self.initial_place] = 1
        return Marking.of(counts)

    # -- interchange ---------------------------------------------------------

    def to_json(self) -> dict:
        inputs = set(self.input_places)
        places = [{"id": p, "kind": "input"} for p in self.input_places]
        places += [{"id": p, "kind": "work"} for p in self.places if p not in inputs]
        data = {
            "places": places,
            "transitions": [
                {"id": t.id, "in": sorted(t.inputs), "out": sorted(t.outputs)} for t in self.transitions
            ],
            "initial_place": self.initial_place,
            "final_place": self.final_place,
            "initial_marking": self.initial_marking.as_dict(),
        }
        if self.accepts_empty:
            data["accepts_empty"] = True
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "PTSystem":
        """Read the net JSON format. Input vector order is the order in which
        input places are listed."""
        places = data["places"]
        ids = [p["id"] for p in places]
        if len(set(ids)) != len(ids):
            raise NetShapeError("duplicate place ids")
        inputs = [p["id"] for p in places if p.get("kind", "work") == "input"]
        trans = []
        for t in data["transitions"]:
            ins, outs = list(t["in"]), list(t["out"])
            if len(set(ins)) != len(ins) or len(set(outs)) != len(outs):
                raise NetShapeError(f"duplicate arcs on transition {t['id']!r}")
            trans.append(Transition(t["id"], frozenset(ins), frozenset(outs)))
        return cls(
            tuple(ids),
            tuple(inputs),
            tuple(trans),
            data["initial_place"],
            data["final_place"],
            bool(data.get("accepts_empty", False)),
            Marking.of(data.get("initial_marking", {data["initial_place"]: 1})),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_dot(self) -> str:
        inputs = set(self.input_places)
        lines = ["digraph net {", "  rankdir=LR;"]
        for p in self.places:
            shape = "doublecircle" if p in inputs else "circle"
            label = p
            if p == self.initial_place:
                label += "\\n(init)"
            if p == self.final_place:
                label += "\\n(fin)"
            lines.append(f'  "{p}" [shape={shape}, label="{label}"];')
        for t in self.transitions:
            lines.append(f'  "{t.id}" [shape=box, style=filled, fillcolor=black, fontcolor=white];')
        for t in self.transitions:
            for p in sorted(t.inputs):
                lines.append(f'  "{p}" -> "{t.id}";')
            for p in sorted(t.outputs):
                lines.append(f'  "{t.id}" -> "{p}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Token game
# ---------------------------------------------------------------------------


def step(sys: PTSystem, m: Marking) -> list[tuple[str, Marking]]:
    """Every enabled transition with the marking its firing produces."""
    known = set(sys.places)
    current = m.as_dict()
    unknown = set(current) - known
    if unknown:
        raise ValueError(f"marking references unknown places {sorted(unknown)}")
    out = []
    for t in sys.transitions:
        if all(current.get(p, 0) >= 1 for p in t.inputs):
            nxt = dict(current)
            for p in t.inputs:
                nxt[p] -= 1
            for p in t.outputs:
                nxt[p] = nxt.get(p, 0) + 1
            out.append((t.id, Marking.of(nxt)))
    return out


def is_dead(sys: PTSystem, m: Marking) -> bool:
    current = m.as_dict()
    return not any(all(current.get(p, 0) >= 1 for p in t.inputs) for t in sys.transitions)


@dataclass(frozen=True)
class Acceptance:
    accepted: bool
    witness: tuple[str, ...] | None
    visited: int

    def __bool__(self) -> bool:
        return self.accepted


def accepts_vector(sys: PTSystem, v: Sequence[int]) -> Acceptance:
    """Decide whether a J P/T system accepts ``v``.

    Depth-first search over (remaining input, work-token location), failed
    states memoised. A marking that marks the final place ends its branch:
    it accepts if dead and rejects otherwise.
    """
    if not sys.is_jpt:
        raise NetShapeError("accepts_vector needs a J P/T system; use accepts_by_simulation for other nets")
    v = tuple(v)
    sys.initial_configuration(v)
    if sys.accepts_empty and not any(v):
        return Acceptance(True, (), 0)
    index = {p: i for i, p in enumerate(sys.input_places)}
    moves: dict[str, list[tuple[int, str, str]]] = {}
    for t in sys.transitions:
        (inp,) = (p for p in t.inputs if p in index)
        (work,) = (p for p in t.inputs if p not in index)
        (out,) = t.outputs
        moves.setdefault(work, []).append((index[inp], out, t.id))
    final = sys.final_place
    failed: set[tuple[InputVector, str]] = set()
    visited = 0

    def search(rest: InputVector, place: str) -> list[str] | None:
        nonlocal visited
        if place == final:
            dead = all(rest[i] == 0 for i, _, _ in moves.get(final, ()))
            return [] if dead else None
        if (rest, place) in failed:
            return None
        visited += 1
        for i, out, tid in moves.get(place, ()):
            if rest[i]:
                tail = search(rest[:i] + (rest[i] - 1,) + rest[i + 1 :], out)
                if tail is not None:
                    return [tid] + tail
        failed.add((rest, place))
        return None

    path = search(v, sys.initial_place)
    return Acceptance(path is not None, tuple(path) if path is not None else None, visited)


def accepts_by_simulation(sys: PTSystem, v: Sequence[int], max_states: int = 200_000) -> Acceptance:
    """Vector acceptance for an arbitrary system by exploring full markings.

    Independent of the J P/T search; used as its oracle and for nets outside
    the J P/T class. Raises ResourceLimitError past ``max_states`` markings.
    """
    start = sys.initial_configuration(v)
    if sys.accepts_empty and not any(v):
        return Acceptance(True, (), 0)
    final = sys.final_place
    failed: set[Marking] = set()
    on_path: set[Marking] = set()
    visited = 0

    def search(m: Marking) -> list[str] | None:
        nonlocal visited
        if m[final] > 0:
            return [] if is_dead(sys, m) else None
        if m in failed or m in on_path:
            return None
        visited += 1
        if visited > max_states:
            raise ResourceLimitError(f"simulation exceeded {max_states} markings")
        on_path.add(m)
        for tid, nxt in step(sys, m):
            tail = search(nxt)
            if tail is not None:
                on_path.discard(m)
                return [tid] + tail
        on_path.discard(m)
        failed.add(m)
        return None

    path = search(start)
    return Acceptance(path is not None, tuple(path) if path is not None else None, visited)


def replay(sys: PTSystem, v: Sequence[int], witness: Sequence[str]) -> bool:
    """Fire ``witness`` from the initial configuration and check acceptance."""
    if sys.accepts_empty and not any(v) and not witness:
        return True
    m = sys.initial_configuration(v)
    for tid in witness:
        if m[sys.final_place] > 0:
            return False
        options = dict(step(sys, m))
        if tid not in options:
            return False
        m = options[tid]
    return m[sys.final_place] > 0 and is_dead(sys, m)


# ---------------------------------------------------------------------------
# Topology
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TopologyReport:
    joins: tuple[tuple[tuple[str, str], str, str], ...]
    forks: tuple[tuple[str, str, tuple[str, str]], ...]
    sequences: tuple[tuple[str, str], ...]
    parallels: tuple[tuple[str, str], ...]
    composed_of_joins: bool
    is_jpt: bool
    cycles: tuple[tuple[tuple[str, str], ...], ...]

    @property
    def cycle_lengths(self) -> list[int]:
        return [len(c) for c in self.cycles]

    def to_json(self) -> dict:
        return {
            "joins": [{"in": list(ins), "transition": t, "out": out} for ins, t, out in self.joins],
            "forks": [{"in": inp, "transition": t, "out": list(outs)} for inp, t, outs in self.forks],
            "sequences": [list(p) for p in self.sequences],
            "parallels": [list(p) for p in self.parallels],
            "composed_of_joins": self.composed_of_joins,
            "is_jpt": self.is_jpt,
            "cycles": [{"path": [list(x) for x in c], "length": len(c)} for c in self.cycles],
        }


def _is_join(t: Transition) -> bool:
    # the three places of a building block are distinct
    return len(t.inputs) == 2 and len(t.outputs) == 1 and not (t.inputs & t.outputs)


def _is_fork(t: Transition) -> bool:
    return len(t.inputs) == 1 and len(t.outputs) == 2 and not (t.inputs & t.outputs)


def analyze_topology(sys: PTSystem) -> TopologyReport:
    inputs = set(sys.input_places)
    joins, forks = [], []
    for t in sys.transitions:
        if _is_join(t):
            a, b = sorted(t.inputs)
            joins.append(((a, b), t.id, next(iter(t.outputs))))
        elif _is_fork(t):
            a, b = sorted(t.outputs)
            forks.append((next(iter(t.inputs)), t.id, (a, b)))
    composed = all(_is_join(t) for t in sys.transitions)
    jpt = composed and all(
        len(t.inputs & inputs) == 1 and not (t.outputs & inputs) for t in sys.transitions
    )
    sequences, parallels = [], []
    for x in sys.transitions:
        for y in sys.transitions:
            if x.id == y.id:
                continue
            if x.outputs & y.inputs and not (x.inputs & y.inputs):
                sequences.append((x.id, y.id))
            if x.id < y.id and x.inputs & y.inputs and not (x.outputs & y.inputs) and not (y.outputs & x.inputs):
                parallels.append((x.id, y.id))
    return TopologyReport(
        tuple(joins), tuple(forks), tuple(sequences), tuple(parallels), composed, jpt, tuple(_cycles(sys))
    )


def _cycles(sys: PTSystem) -> list[tuple[tuple[str, str], ...]]:
    """Simple cycles as (place, transition) pairs, rotated to start at the
    smallest place id and listed in sorted order."""
    g = nx.DiGraph()
    for p in sys.places:
        g.add_node(("p", p))
    for t in sys.transitions:
        for p in t.inputs:
            g.add_edge(("p", p), ("t", t.id))
        for p in t.outputs:
            g.add_edge(("t", t.id), ("p", p))
    found = []
    for cyc in nx.simple_cycles(g):
        k = min(range(len(cyc)), key=lambda i: (cyc[i][0] != "p", cyc[i][1]))
        cyc = cyc[k:] + cyc[:k]
        found.append(tuple((cyc[i][1], cyc[i + 1][1]) for i in range(0, len(cyc), 2)))
    return sorted(found)


# ---------------------------------------------------------------------------
# Normal form
# ---------------------------------------------------------------------------


def _fresh(base: str, taken: set[str]) -> str:
    name, k = base, 1
    while name in taken:
        k += 1
        name = f"{base}{k}"
    taken.add(name)
    return name


def split_self_loops(sys: PTSystem) -> PTSystem:
    """Replace transitions whose output is one of their inputs.

    A work place ``w`` with such loops gets a twin ``w'``: each loop now moves
    the token from ``w`` to ``w'`` and a copy moves it back, and ``w'`` copies
    every other transition leaving ``w``. Accepted vectors are unchanged.
    """
    loops = {next(iter(t.outputs)) for t in sys.transitions if t.inputs & t.outputs and len(t.outputs) == 1}
    if not loops:
        return sys
    if sys.final_place in loops:
        raise NetShapeError("a loop on the final place would change which markings are dead")
    taken = set(sys.places) | {t.id for t in sys.transitions}
    twin = {w: _fresh(f"{w}_b", taken) for w in sorted(loops)}
    trans: dict[str, tuple[list[str], list[str]]] = {}
    for t in sys.transitions:
        ins, outs = sorted(t.inputs), sorted(t.outputs)
        loop = t.inputs & t.outputs
        if loop:
            (w,) = loop
            trans[t.id] = (ins, [twin[w]])
            back = [twin[w] if p == w else p for p in ins]
            trans[_fresh(f"{t.id}_b", taken)] = (back, [w])
            continue
        trans[t.id] = (ins, outs)
        for w in sorted(t.inputs & loops):
            copy = [twin[w] if p == w else p for p in ins]
            trans[_fresh(f"{t.id}_b", taken)] = (copy, outs)
    return PTSystem.build(
        sys.input_places,
        trans,
        sys.initial_place,
        sys.final_place,
        work_places=set(sys.work_places) | set(twin.values()),
        accepts_empty=sys.accepts_empty,
    )


def to_join_normal_form(sys: PTSystem) -> PTSystem:
    """Rewrite transitions that consume several input tokens into chains of
    joins through fresh work places.

    Supported shape: each transition has one output, a work place, and
    consumes exactly one work-place token plus one or more input tokens, never
    from the final place. Loops are then split so every join has three
    distinct places.
    """
    inputs = set(sys.input_places)
    taken = set(sys.places) | {t.id for t in sys.transitions}
    trans: dict[str, tuple[list[str], list[str]]] = {}
    aux: set[str] = set()
    for t in sys.transitions:
        if len(t.outputs) != 1:
            raise NetShapeError(f"transition {t.id!r} has {len(t.outputs)} output places: fork required")
        (out,) = t.outputs
        if out in inputs:
            raise NetShapeError(f"transition {t.id!r} produces into input place {out!r}")
        works = sorted(t.inputs - inputs)
        feeds = sorted(t.inputs & inputs)
        if not works:
            raise NetShapeError(f"transition {t.id!r} consumes only input places; no work token to carry")
        if len(works) > 1:
            raise NetShapeError(f"transition {t.id!r} consumes {len(works)} work places; the single control token cannot be split")
        if not feeds:
            raise NetShapeError(f"transition {t.id!r} consumes no input place")
        (work,) = works
        if len(feeds) > 1 and work == sys.final_place:
            raise NetShapeError(f"transition {t.id!r} leaves the final place; chaining would change dead markings")
        if len(feeds) == 1:
            trans[t.id] = ([feeds[0], work], [out])
            continue
        current = work
        for k, q in enumerate(feeds):
            last = k == len(feeds) - 1
            target = out if last else _fresh(f"{t.id}_w{k + 1}", taken)
            if not last:
                aux.add(target)
            trans[t.id if k == 0 else _fresh(f"{t.id}_{k + 1}", taken)] = ([q, current], [target])
            current = target
    result = PTSystem.build(
        sys.input_places,
        trans,
        sys.initial_place,
        sys.final_place,
        work_places=set(sys.work_places) | aux,
        accepts_empty=sys.accepts_empty,
    )
    result = split_self_loops(result)
    if result == sys:
        return sys
    return result
