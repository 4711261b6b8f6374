"""Oracle agreement over a generated corpus.

Every construction is compared with an independent reference on a bounded
domain: nets, Parikh sets and generators against the Parikh image of the
enumerated language, machines and grammars against the matcher and the
enumerator, extraction against the compiled net, and L_S expressions against
a direct listing.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from . import compiler, grammar, lcm, semilinear
from .corpus import CorpusSpec, generate_corpus, random_semilinear
from .errors import JLangError
from .jexpr import JExpr, enumerate_words, format_word, matches, to_text, words_up_to
from .ptnet import accepts_vector

CHECKS = ("net", "parikh", "generator", "lcm", "grammar", "extract", "ls")
LS_MAX_LEN = 8


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    comparisons: int = 0
    problems: list[str] = field(default_factory=list)

    def merge(self, other: "CheckResult") -> None:
        self.cases += other.cases
        self.comparisons += other.comparisons
        self.problems.extend(other.problems)


def _fmt(v: Sequence[int]) -> str:
    return "(" + ",".join(map(str, v)) + ")"


def check_expression(e: JExpr, alphabet: Sequence[str], bound: int) -> dict[str, CheckResult]:
    """Run every expression-level check on ``e``."""
    text = to_text(e)
    res = {name: CheckResult(name, cases=1) for name in CHECKS if name != "ls"}
    words = enumerate_words(e, bound)
    image = {semilinear.parikh_vector(w, alphabet) for w in words}
    grid = list(semilinear.vectors_up_to(len(alphabet), bound))

    def fail(name: str, detail: str) -> None:
        res[name].problems.append(f"{name}: {text} : {detail}")

    net = compiler.compile(e, alphabet)
    pk = semilinear.parikh(e, alphabet)
    for v in grid:
        expected = v in image
        got = accepts_vector(net, v).accepted
        res["net"].comparisons += 1
        if got != expected:
            fail("net", f"v={_fmt(v)} net={got} oracle={expected}")
        res["parikh"].comparisons += 1
        if semilinear.member(pk, v) != expected:
            fail("parikh", f"v={_fmt(v)} member={not expected} oracle={expected}")

    generated = semilinear.run_generator(semilinear.build_generator(pk), bound)
    res["generator"].comparisons += 1
    if generated != image:
        fail("generator", f"generated {sorted(generated ^ image)} differ from the oracle")

    machine = lcm.build_lcm(e, alphabet)
    for w in words_up_to(alphabet, bound):
        run = lcm.run_lcm(machine, w)
        res["lcm"].comparisons += 1
        if run.accepted != matches(e, w):
            fail("lcm", f"w={format_word(w)!r} machine={run.accepted}")
        if run.max_counter_seen > len(w):
            fail("lcm", f"w={format_word(w)!r} counter {run.max_counter_seen} exceeds the input length")

    g = grammar.grammar_from_jexpr(e, alphabet)
    res["grammar"].comparisons += 1
    violations = grammar.validate_grammar(g, restricted=True)
    if violations:
        fail("grammar", f"invalid grammar: {violations[0]}")
    generated_words = grammar.enumerate_grammar(g, bound)
    if generated_words != words:
        diff = sorted(generated_words ^ words)[:3]
        fail("grammar", f"languages differ on {[format_word(w) for w in diff]}")

    try:
        extracted, analysis = compiler.extract_expression(net, bound=bound)
    except JLangError as exc:
        fail("extract", f"{type(exc).__name__}: {exc}")
    else:
        back = {semilinear.parikh_vector(w, analysis.symbols) for w in enumerate_words(extracted, bound)}
        res["extract"].comparisons += 1
        if back != image:
            fail("extract", f"extracted {to_text(extracted)!r} differs on {sorted(back ^ image)[:3]}")
    return res


def check_ls(s: semilinear.SemilinearSet, max_len: int = LS_MAX_LEN) -> CheckResult:
    alphabet = tuple("abcdefgh"[: s.dimension])
    res = CheckResult("ls", cases=1, comparisons=1)
    expected = semilinear.sorted_language(s, alphabet, max_len)
    try:
        e = semilinear.ls_expression(s, alphabet)
    except JLangError as exc:
        res.problems.append(f"ls: {s.to_json(alphabet)} : {type(exc).__name__}: {exc}")
        return res
    got = enumerate_words(e, max_len)
    if got != expected:
        res.problems.append(f"ls: {to_text(e)} : languages differ on {[format_word(w) for w in sorted(got ^ expected)[:3]]}")
    return res


def _task(args: tuple[JExpr, tuple[str, ...], int]) -> dict[str, CheckResult]:
    return check_expression(*args)


@dataclass
class Report:
    spec: CorpusSpec
    bound: int
    results: dict[str, CheckResult]

    @property
    def disagreements(self) -> int:
        return sum(len(r.problems) for r in self.results.values())

    def text(self, max_details: int = 20) -> str:
        lines = [
            f"crosscheck seed={self.spec.seed} count={self.spec.count} bound={self.bound} "
            f"alphabet={','.join(self.spec.alphabet)} depth={self.spec.max_depth} "
            f"vars={self.spec.max_vars} max-exp={self.spec.max_exp}"
        ]
        for name in CHECKS:
            r = self.results[name]
            lines.append(f"{name:<10} cases={r.cases:<5} comparisons={r.comparisons:<7} disagreements={len(r.problems)}")
        details = [p for name in CHECKS for p in self.results[name].problems]
        for p in details[:max_details]:
            lines.append(f"  {p}")
        if len(details) > max_details:
            lines.append(f"  ... {len(details) - max_details} more")
        lines.append(f"{self.disagreements} disagreements")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "seed": self.spec.seed,
            "count": self.spec.count,
            "bound": self.bound,
            "alphabet": list(self.spec.alphabet),
            "checks": {
                name: {"cases": r.cases, "comparisons": r.comparisons, "problems": r.problems}
                for name, r in ((n, self.results[n]) for n in CHECKS)
            },
            "disagreements": self.disagreements,
        }


def run_crosscheck(spec: CorpusSpec, bound: int = 5, jobs: int = 1, ls_sets: int | None = None) -> Report:
    """Check the corpus of ``spec`` and ``ls_sets`` random semilinear sets
    (a quarter of the corpus size by default). The report is independent of
    ``jobs``."""
    corpus = generate_corpus(spec)
    alphabet = spec.alphabet
    tasks = [(e, alphabet, bound) for e in corpus]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_expr = list(pool.map(_task, tasks, chunksize=4))
    else:
        per_expr = [_task(t) for t in tasks]
    results = {name: CheckResult(name) for name in CHECKS}
    for res in per_expr:
        for name, r in res.items():
            results[name].merge(r)
    rng = random.Random(f"ls-{spec.seed}")
    for _ in range(max(1, spec.count // 4) if ls_sets is None else ls_sets):
        results["ls"].merge(check_ls(random_semilinear(rng)))
    return Report(spec, bound, results)
