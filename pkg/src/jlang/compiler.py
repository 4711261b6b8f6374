"""Translations between J expressions and J P/T systems.

``compile`` turns an expression into a J P/T system whose accepted vectors are
the Parikh image of its language. ``extract_expression`` goes the other way:
it reads the paths and cycles of a J P/T system, derives border
configurations and added vectors, and writes them back as a J expression.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx

from .errors import IncompleteAnalysisError, JLangError, NetShapeError, ResourceLimitError
from .jexpr import (
    EPS,
    Concat,
    Epsilon,
    Exponentiation,
    Fixed,
    JExpr,
    Plus,
    Sym,
    Union,
    _IDENT,
    RESERVED,
    check,
    normalize,
    symbols,
    union_of,
)
from .ptnet import PTSystem, accepts_vector, split_self_loops
from .semilinear import (
    MAX_LS_TERMS,
    LinearSet,
    SemilinearSet,
    Vector,
    _decompose,
    _VarNames,
    add,
    layout,
    member,
    vectors_up_to,
)

MAX_TRANSITIONS = 200_000


# ---------------------------------------------------------------------------
# Expression -> net
# ---------------------------------------------------------------------------


def shuffle_form(e: JExpr) -> JExpr:
    """A regular expression (no exponentiation) with the same Parikh image.

    In a normalized exponentiation every variable ``q`` contributes ``k``
    copies of each ``q``-term base for one shared ``k >= 1``; order is
    irrelevant to the Parikh image, so the terms of ``q`` become one ring
    ``(b_1 b_2 ... b_m)+`` placed where ``q`` first occurs.
    """
    if isinstance(e, (Sym, Epsilon)):
        return e
    if isinstance(e, Union):
        return Union(shuffle_form(e.left), shuffle_form(e.right))
    if isinstance(e, Concat):
        return Concat(tuple(shuffle_form(f) for f in e.factors))
    if isinstance(e, Plus):
        return Plus(shuffle_form(e.body))
    assert isinstance(e, Exponentiation)
    parts: list[JExpr] = []
    placed: set[str] = set()
    for base, exp in e.terms:
        if isinstance(exp, Fixed):
            parts.extend([base] * exp.value)
        elif exp.name not in placed:
            placed.add(exp.name)
            ring = [b for b, x in e.terms if x == exp and not isinstance(b, Epsilon)]
            if ring:
                parts.append(Plus(ring[0] if len(ring) == 1 else Concat(tuple(ring))))
    parts = [p for p in parts if not isinstance(p, Epsilon)]
    if not parts:
        return EPS
    return parts[0] if len(parts) == 1 else Concat(tuple(parts))


@dataclass
class _Positions:
    """Glushkov position analysis of a regular expression tree."""

    labels: list[str] = field(default_factory=list)
    follow: list[set[int]] = field(default_factory=list)

    def visit(self, e: JExpr) -> tuple[bool, set[int], set[int]]:
        if isinstance(e, Epsilon):
            return True, set(), set()
        if isinstance(e, Sym):
            self.labels.append(e.name)
            self.follow.append(set())
            i = len(self.labels) - 1
            return False, {i}, {i}
        if isinstance(e, Union):
            n1, f1, l1 = self.visit(e.left)
            n2, f2, l2 = self.visit(e.right)
            return n1 or n2, f1 | f2, l1 | l2
        if isinstance(e, Concat):
            nullable, first, last = True, set(), set()
            for factor in e.factors:
                n, f, l = self.visit(factor)
                for i in last:
                    self.follow[i] |= f
                if nullable:
                    first |= f
                last = last | l if n else l
                nullable = nullable and n
            return nullable, first, last
        if isinstance(e, Plus):
            n, f, l = self.visit(e.body)
            for i in l:
                self.follow[i] |= f
            return n, f, l
        raise TypeError(f"unexpected node {e!r} in shuffle form")


def _fresh(name: str, taken: set[str]) -> str:
    candidate = name
    while candidate in taken:
        candidate += "_w"
    taken.add(candidate)
    return candidate


def compile(e: JExpr, alphabet: Sequence[str] | None = None, max_transitions: int = MAX_TRANSITIONS) -> PTSystem:
    """Compile a J expression into a J P/T system.

    Input place ``p_x`` counts symbol ``x``. Work place ``w<i>`` holds the
    control token after the i-th symbol position has been consumed. Every
    symbol gets a trap transition out of the final place, so a marking with
    leftover input tokens on the final place is never dead and only the exact
    Parikh vectors of the language are accepted.
    """
    check(e, alphabet)
    if alphabet is None:
        alphabet = sorted(symbols(e))
    alphabet = list(alphabet)
    missing = symbols(e) - set(alphabet)
    if missing:
        raise ValueError(f"symbols {sorted(missing)} are not in the alphabet")
    regex = shuffle_form(normalize(e))
    pos = _Positions()
    nullable, first, last = pos.visit(regex)

    inputs = [f"p_{s}" for s in alphabet]
    taken = set(inputs)
    init, fin = _fresh("p_init", taken), _fresh("p_fin", taken)
    trap = _fresh("p_trap", taken) if alphabet else None
    place = {i: f"w{i + 1}" for i in range(len(pos.labels)) if pos.follow[i]}

    arcs: list[tuple[str, str, str]] = []  # (symbol place, source, target)

    def enter(src: str, j: int) -> None:
        q = f"p_{pos.labels[j]}"
        if j in place:
            arcs.append((q, src, place[j]))
        if j in last:
            arcs.append((q, src, fin))

    for j in sorted(first):
        enter(init, j)
    for i in sorted(place):
        for j in sorted(pos.follow[i]):
            enter(place[i], j)
    for q in inputs:
        arcs.append((q, fin, trap))
    if len(arcs) > max_transitions:
        raise ResourceLimitError(f"compiled net would have {len(arcs)} transitions (cap {max_transitions})")
    width = len(str(len(arcs)))
    transitions = {f"t{k + 1:0{width}d}": ([q, src], [dst]) for k, (q, src, dst) in enumerate(arcs)}
    work = [init, fin, *place.values()] + ([trap] if trap else [])
    sys = PTSystem.build(inputs, transitions, init, fin, work_places=work, accepts_empty=nullable)
    return split_self_loops(sys)


def size_bound(e: JExpr) -> int:
    """Number of symbol positions of ``shuffle_form(normalize(e))``."""
    pos = _Positions()
    pos.visit(shuffle_form(normalize(e)))
    return len(pos.labels)


# ---------------------------------------------------------------------------
# Net -> expression
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BorderAnalysis:
    """Border configurations of a J P/T system and their added vectors.

    ``groups`` keeps each linear component separately (one border may carry
    several alternative sets of added vectors); ``added`` is the per-border
    union used for reporting.
    """

    symbols: tuple[str, ...]
    groups: tuple[tuple[Vector, tuple[Vector, ...]], ...]
    accepts_empty: bool
    bound: int
    certified: bool

    @property
    def borders(self) -> tuple[Vector, ...]:
        return tuple(sorted({b for b, _ in self.groups}))

    @property
    def added(self) -> dict[Vector, tuple[Vector, ...]]:
        out: dict[Vector, set[Vector]] = {}
        for b, periods in self.groups:
            out.setdefault(b, set()).update(periods)
        return {b: tuple(sorted(v)) for b, v in sorted(out.items())}

    def semilinear(self) -> SemilinearSet:
        comps = [LinearSet(b, p) for b, p in self.groups]
        if self.accepts_empty:
            comps.append(LinearSet((0,) * len(self.symbols), ()))
        return SemilinearSet(len(self.symbols), tuple(comps))

    def to_json(self) -> dict:
        return {
            "symbols": list(self.symbols),
            "borders": [list(b) for b in self.borders],
            "added": {",".join(map(str, b)): [list(v) for v in vs] for b, vs in self.added.items()},
            "groups": [{"border": list(b), "added": [list(v) for v in p]} for b, p in self.groups],
            "accepts_empty": self.accepts_empty,
            "bound": self.bound,
            "certified": self.certified,
        }

    @classmethod
    def from_json(cls, data: dict) -> "BorderAnalysis":
        groups = tuple(
            (tuple(g["border"]), tuple(tuple(v) for v in g["added"])) for g in data["groups"]
        )
        return cls(tuple(data["symbols"]), groups, bool(data["accepts_empty"]), int(data["bound"]), bool(data["certified"]))


def _symbol_names(places: Sequence[str]) -> tuple[str, ...]:
    stripped = [p[2:] if p.startswith("p_") and len(p) > 2 else p for p in places]
    if len(set(stripped)) != len(stripped) or any(not _IDENT.match(s) or s == RESERVED for s in stripped):
        stripped = list(places)
    for s in stripped:
        if not _IDENT.match(s) or s == RESERVED:
            raise NetShapeError(f"input place {s!r} cannot serve as an expression symbol")
    return tuple(stripped)


def _spanned(u: Vector, periods: Sequence[Vector]) -> bool:
    return bool(periods) and _decompose(tuple(periods), u)


def _reduce_periods(periods: Sequence[Vector]) -> tuple[Vector, ...]:
    kept = sorted(set(periods))
    for u in list(kept):
        rest = [p for p in kept if p != u]
        if _spanned(u, rest):
            kept = rest
    return tuple(kept)


def _subsumes(big: tuple[Vector, tuple[Vector, ...]], small: tuple[Vector, tuple[Vector, ...]]) -> bool:
    b, periods = big
    s, sp = small
    return s in LinearSet(b, periods) and all(p in periods or _spanned(p, periods) for p in sp)


def _labelled_cycles(graph: nx.MultiDiGraph, nodes: set[str], dim: int, cap: int) -> list[tuple[frozenset[str], Vector]]:
    simple = nx.DiGraph()
    simple.add_nodes_from(sorted(nodes))
    for u, v in graph.edges():
        if u in nodes and v in nodes:
            simple.add_edge(u, v)
    found: set[tuple[frozenset[str], Vector]] = set()
    for cyc in nx.simple_cycles(simple):
        hops = []
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            hops.append(sorted({d["index"] for d in graph.get_edge_data(a, b).values()}))
        for choice in itertools.product(*hops):
            effect = [0] * dim
            for i in choice:
                effect[i] += 1
            found.add((frozenset(cyc), tuple(effect)))
            if len(found) > cap:
                raise ResourceLimitError(f"more than {cap} labelled cycles")
    return sorted(found, key=lambda c: (sorted(c[0]), c[1]))


def _quotient(graph: nx.MultiDiGraph, fin: str) -> nx.MultiDiGraph:
    """Merge work places with the same future (forward bisimulation, the
    final place being the only accepting one). Walks from the initial to the
    final place, and hence their consumption vectors, are preserved."""
    block = {w: int(w == fin) for w in graph.nodes}
    while True:
        sig = {
            w: (block[w], frozenset((d["index"], block[v]) for _, v, d in graph.out_edges(w, data=True)))
            for w in graph.nodes
        }
        ids = {s: k for k, s in enumerate(sorted(set(sig.values()), key=repr))}
        refined = {w: ids[sig[w]] for w in graph.nodes}
        if len(set(refined.values())) == len(set(block.values())):
            break
        block = refined
    members: dict[int, list[str]] = {}
    for w in sorted(graph.nodes):
        members.setdefault(block[w], []).append(w)
    name = {w: members[block[w]][0] for w in graph.nodes}
    quotient = nx.MultiDiGraph()
    quotient.add_nodes_from(sorted(set(name.values())))
    quotient.graph["members"] = {name[ws[0]]: tuple(ws) for ws in members.values()}
    edges = {(name[u], name[v], d["index"]) for u, v, d in graph.edges(data=True)}
    for u, v, i in sorted(edges):
        quotient.add_edge(u, v, index=i)
    return quotient


def _block_of(quotient: nx.MultiDiGraph, w: str) -> str:
    for rep, ws in quotient.graph["members"].items():
        if w in ws:
            return rep
    raise KeyError(w)


def border_analysis(sys: PTSystem, bound: int = 12, max_paths: int = 200_000) -> BorderAnalysis:
    """Decompose the accepted vectors of a J P/T system into linear sets.

    A firing sequence is a walk of the control token from the initial to the
    final place. Any such walk shrinks, by removing closed sub-walks that
    keep its set of visited work places, to an irreducible skeleton in which
    no place occurs more often than there are work places. The skeleton's consumption
    is a border configuration; the effects of simple cycles touching its
    visited places are its added vectors. Input places that the final place
    never consumes from may hold leftovers, so their unit vectors are added
    everywhere.
    """
    if not sys.is_jpt:
        raise NetShapeError("extraction needs a J P/T system")
    dim = len(sys.input_places)
    index = {p: i for i, p in enumerate(sys.input_places)}
    init, fin = sys.initial_place, sys.final_place
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(sys.work_places)
    fin_consumes: set[int] = set()
    for t in sys.transitions:
        (q,) = (p for p in t.inputs if p in index)
        (w,) = (p for p in t.inputs if p not in index)
        (out,) = t.outputs
        if w == fin:
            fin_consumes.add(index[q])
        else:
            graph.add_edge(w, out, index=index[q], tid=t.id)
    useful = (nx.descendants(graph, init) | {init}) & (nx.ancestors(graph, fin) | {fin})
    free = tuple(tuple(int(j == i) for j in range(dim)) for i in range(dim) if i not in fin_consumes)
    names = _symbol_names(sys.input_places)
    if init not in useful:
        return BorderAnalysis(names, (), sys.accepts_empty, bound, True)
    graph = _quotient(graph.subgraph(useful), fin)
    init, fin = _block_of(graph, init), _block_of(graph, fin)
    cycles = _labelled_cycles(graph, set(graph.nodes), dim, cap=max_paths)
    limit = graph.number_of_nodes()
    succ: dict[str, list[tuple[int, str]]] = {}
    for w in sorted(graph.nodes):
        pairs = {(d["index"], v) for _, v, d in graph.out_edges(w, data=True)}
        succ[w] = sorted(pairs, key=lambda x: (x[1], x[0]))

    found: dict[tuple[Vector, frozenset[str]], None] = {}
    complete = True
    expansions = 0
    path = [init]
    count = [0] * dim
    seen = {init: 1}

    def reducible() -> bool:
        j = len(path) - 1
        s = path[j]
        for i in range(j - 1, -1, -1):
            if path[i] != s:
                continue
            inner = path[i + 1 : j]
            outside = set(path[: i + 1]) | set(path[j + 1 :])
            if all(x in outside for x in inner):
                return True
        return False

    def dfs(w: str) -> None:
        nonlocal complete, expansions
        if w == fin:
            found.setdefault((tuple(count), frozenset(path)), None)
            return
        expansions += 1
        if expansions > max_paths:
            complete = False
            return
        for i, v in succ.get(w, ()):
            if seen.get(v, 0) >= limit:
                continue
            path.append(v)
            count[i] += 1
            seen[v] = seen.get(v, 0) + 1
            if not reducible():
                dfs(v)
            seen[v] -= 1
            count[i] -= 1
            path.pop()
            if not complete:
                return

    dfs(init)

    groups: list[tuple[Vector, tuple[Vector, ...]]] = []
    for border, visited in found:
        periods = [eff for nodes, eff in cycles if nodes & visited] + list(free)
        g = (border, _reduce_periods(periods))
        if g not in groups:
            groups.append(g)
    pruned = [
        g for k, g in enumerate(groups)
        if not any(h != g and _subsumes(h, g) and (not _subsumes(g, h) or m < k) for m, h in enumerate(groups))
    ]
    return BorderAnalysis(names, tuple(pruned), sys.accepts_empty, bound, complete)


def analysis_expression(analysis: BorderAnalysis, max_terms: int = MAX_LS_TERMS) -> JExpr:
    """The union over border configurations ``b`` and subsets ``T`` of their
    added vectors of ``b`` followed by one block per vector in ``T``, each
    raised to its own variable. The empty subset keeps ``b`` itself, since
    variables range over positive integers."""
    names = _VarNames("k", analysis.symbols)
    terms: list[JExpr] = []
    emitted: set[tuple[Vector, tuple[Vector, ...]]] = set()
    for border, periods in analysis.groups:
        for r in range(len(periods) + 1):
            for subset in itertools.combinations(periods, r):
                if (border, subset) in emitted:
                    continue
                emitted.add((border, subset))
                if len(terms) >= max_terms:
                    raise ResourceLimitError(f"extracted expression exceeds {max_terms} union terms")
                terms.append(layout(analysis.symbols, border, subset, names, expand_constant=False))
    if analysis.accepts_empty:
        terms.append(EPS)
    if not terms:
        raise JLangError("the system accepts no vector; no J expression denotes the empty language")
    return union_of(terms)


def verify_analysis(sys: PTSystem, analysis: BorderAnalysis) -> Vector | None:
    """First vector of token sum up to the bound on which the analysis and
    the system disagree, or None."""
    s = analysis.semilinear()
    for v in vectors_up_to(len(sys.input_places), analysis.bound):
        if member(s, v) != accepts_vector(sys, v).accepted:
            return v
    for border, periods in analysis.groups:
        if not accepts_vector(sys, border).accepted:
            return border
        for u in periods:
            v = add(border, u)
            while sum(v) <= analysis.bound:
                if not accepts_vector(sys, v).accepted:
                    return v
                v = add(v, u)
    return None


def extract_expression(
    sys: PTSystem,
    bound: int = 12,
    max_paths: int = 200_000,
    allow_partial: bool = False,
) -> tuple[JExpr, BorderAnalysis]:
    """Extract a J expression whose Parikh image is the set of vectors the
    system accepts, together with its border analysis.

    The result is checked against ``accepts_vector`` on every vector of
    token sum at most ``bound``. When the skeleton search stops early or the
    check fails, IncompleteAnalysisError carries the partial analysis, unless
    ``allow_partial`` is set, in which case the analysis comes back with
    ``certified`` false.
    """
    analysis = border_analysis(sys, bound, max_paths)
    bad = verify_analysis(sys, analysis)
    if bad is not None or not analysis.certified:
        analysis = BorderAnalysis(analysis.symbols, analysis.groups, analysis.accepts_empty, bound, False)
        if not allow_partial:
            reason = f"disagreement at {bad}" if bad is not None else "skeleton search exceeded its budget"
            raise IncompleteAnalysisError(f"analysis not closed: {reason}", analysis)
    return analysis_expression(analysis), analysis
