"""Command-line front end: ``jlang <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import compiler, grammar, lcm, semilinear
from .corpus import CorpusSpec
from .crosscheck import run_crosscheck
from .errors import IncompleteAnalysisError, JLangError
from .jexpr import check, format_word, matches, normalize, parse, parse_word, symbols, to_text, variables
from .ptnet import PTSystem, accepts_by_simulation, accepts_vector, analyze_topology


def _alphabet(text: str | None) -> list[str] | None:
    if text is None:
        return None
    items = [s.strip() for s in text.replace(" ", ",").split(",") if s.strip()]
    if not items:
        raise ValueError("empty alphabet")
    return items


def _expression(args) -> str:
    if args.file:
        return Path(args.file).read_text().strip()
    if args.expr is None:
        raise ValueError("give an expression or --file")
    return args.expr


def _load_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _vector(text: str) -> tuple[int, ...]:
    text = text.strip().strip("()[]")
    if not text:
        return ()
    return tuple(int(x) for x in text.replace(" ", ",").split(",") if x)


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def _parsed(args):
    alphabet = _alphabet(args.alphabet)
    e = check(parse(_expression(args), alphabet), alphabet)
    if alphabet is None:
        alphabet = sorted(symbols(e))
    return e, alphabet


# -- commands -----------------------------------------------------------------


def cmd_parse(args) -> int:
    e, alphabet = _parsed(args)
    if args.format == "json":
        _emit(args, _dump({
            "canonical": to_text(e),
            "normalized": to_text(normalize(e)),
            "alphabet": alphabet,
            "variables": sorted(variables(e)),
        }))
    else:
        _emit(args, to_text(e))
    return 0


def cmd_compile(args) -> int:
    e, alphabet = _parsed(args)
    net = compiler.compile(e, alphabet)
    _emit(args, net.to_dot() if args.format == "dot" else net.dumps())
    return 0


def cmd_accept(args) -> int:
    net = PTSystem.from_json(_load_json(args.net))
    v = _vector(args.vector)
    if args.general:
        result = accepts_by_simulation(net, v)
    else:
        result = accepts_vector(net, v)
    if args.format == "json":
        _emit(args, _dump({"vector": list(v), "accepted": result.accepted, "witness": result.witness and list(result.witness)}))
    else:
        lines = ["accepted" if result.accepted else "rejected"]
        if result.witness:
            lines.append("witness: " + " ".join(result.witness))
        _emit(args, "\n".join(lines))
    return 0


def cmd_topology(args) -> int:
    net = PTSystem.from_json(_load_json(args.net))
    _emit(args, _dump(analyze_topology(net).to_json()))
    return 0


def cmd_match(args) -> int:
    e, alphabet = _parsed(args)
    w = parse_word(args.word, alphabet)
    _emit(args, "accepted" if matches(e, w) else "rejected")
    return 0


def cmd_parikh(args) -> int:
    e, alphabet = _parsed(args)
    _emit(args, _dump(semilinear.parikh(e, alphabet).to_json(alphabet)))
    return 0


def cmd_ls_expr(args) -> int:
    data = _load_json(args.semilinear)
    s = semilinear.SemilinearSet.from_json(data)
    alphabet = _alphabet(args.alphabet) or data.get("alphabet")
    if alphabet is None:
        raise ValueError("the semilinear JSON carries no alphabet; pass --alphabet")
    _emit(args, to_text(semilinear.ls_expression(s, alphabet)))
    return 0


def cmd_extract(args) -> int:
    net = PTSystem.from_json(_load_json(args.net))
    status = 0
    try:
        e, analysis = compiler.extract_expression(net, bound=args.bound, allow_partial=args.allow_partial)
    except IncompleteAnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        e, analysis, status = None, exc.partial, 1
    if args.format == "json":
        data = analysis.to_json()
        data["expression"] = to_text(e) if e is not None else None
        _emit(args, _dump(data))
    else:
        lines = [to_text(e) if e is not None else "(no expression)"]
        lines.append("certified up to bound" if analysis.certified else "not certified")
        for b, periods in analysis.groups:
            lines.append(f"border {b} added {list(periods)}")
        _emit(args, "\n".join(lines))
    return status


def _machine(args) -> lcm.LCMachine:
    if args.machine:
        return lcm.LCMachine.from_json(_load_json(args.machine))
    e, alphabet = _parsed(args)
    return lcm.build_lcm(e, alphabet)


def cmd_lcm(args) -> int:
    m = _machine(args)
    if args.action == "build":
        _emit(args, m.to_dot() if args.format == "dot" else m.dumps())
        return 0
    w = parse_word(args.word, m.alphabet)
    if args.action == "replay":
        ok = lcm.replay(m, w, [int(k) for k in args.witness.replace(",", " ").split()])
        _emit(args, "accepted" if ok else "rejected")
        return 0
    run = lcm.run_lcm(m, w)
    if args.format == "json":
        _emit(args, _dump({
            "word": list(w),
            "accepted": run.accepted,
            "witness": list(run.witness) if run.witness is not None else None,
            "max_counter_seen": run.max_counter_seen,
            "replayed": run.accepted and lcm.replay(m, w, run.witness),
        }))
    else:
        lines = ["accepted" if run.accepted else "rejected", f"max counter: {run.max_counter_seen}"]
        if run.witness is not None:
            lines.append("witness: " + " ".join(map(str, run.witness)))
            lines.append("replay: " + ("accepted" if lcm.replay(m, w, run.witness) else "rejected"))
        _emit(args, "\n".join(lines))
    return 0


def _grammar(args) -> grammar.ERLSMG:
    if args.grammar:
        return grammar.ERLSMG.from_json(_load_json(args.grammar))
    e, alphabet = _parsed(args)
    return grammar.grammar_from_jexpr(e, alphabet)


def cmd_grammar(args) -> int:
    g = _grammar(args)
    if args.action == "build":
        _emit(args, g.pretty() if args.format == "text" else g.dumps())
        return 0
    if args.action == "validate":
        problems = grammar.validate_grammar(g, restricted=args.restricted)
        _emit(args, "\n".join(map(str, problems)) if problems else "ok")
        return 1 if problems else 0
    problems = grammar.validate_grammar(g)
    if problems:
        raise ValueError(f"invalid grammar: {problems[0]}")
    found = grammar.derivations(g, args.bound)
    if args.format == "json":
        _emit(args, _dump([{"word": list(w), "trace": list(t)} for w, t in found.items()]))
    else:
        _emit(args, "\n".join(format_word(w) or "ε" for w in sorted(found, key=lambda w: (len(w), w))))
    return 0


def cmd_crosscheck(args) -> int:
    spec = CorpusSpec(
        max_depth=args.depth,
        max_vars=args.max_vars,
        count=args.count,
        seed=args.seed,
        max_exp=args.max_exp,
        symbols=tuple(_alphabet(args.alphabet) or ("a", "b", "c")),
    )
    report = run_crosscheck(spec, bound=args.bound, jobs=args.jobs)
    _emit(args, _dump(report.to_json()) if args.format == "json" else report.text())
    return 1 if report.disagreements else 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jlang", description="J expressions, J P/T systems and their characterisations")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, expr: bool = True, formats: Sequence[str] = ("text",)):
        if expr:
            p.add_argument("expr", nargs="?", help="J expression (quote it)")
            p.add_argument("--file", help="read the expression from a file")
            p.add_argument("--alphabet", help="comma-separated symbols, in vector order")
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--out", help="write the result to a file")
        return p

    p = common(sub.add_parser("parse", help="validate and print the canonical form"), formats=("text", "json"))
    p.set_defaults(func=cmd_parse)

    p = common(sub.add_parser("compile", help="compile an expression into a J P/T system"), formats=("json", "dot"))
    p.set_defaults(func=cmd_compile)

    p = common(sub.add_parser("accept", help="decide vector acceptance for a net"), expr=False, formats=("text", "json"))
    p.add_argument("net", help="net JSON file")
    p.add_argument("vector", help="input vector, e.g. 2,3")
    p.add_argument("--general", action="store_true", help="simulate full markings (any net)")
    p.set_defaults(func=cmd_accept)

    p = common(sub.add_parser("topology", help="joins, forks and cycles of a net"), expr=False, formats=("json",))
    p.add_argument("net")
    p.set_defaults(func=cmd_topology)

    p = common(sub.add_parser("match", help="decide word membership"))
    p.add_argument("word", help="word; symbols separated by spaces when longer than one letter")
    p.set_defaults(func=cmd_match)

    p = common(sub.add_parser("parikh", help="Parikh image as semilinear JSON"), formats=("json",))
    p.set_defaults(func=cmd_parikh)

    p = common(sub.add_parser("ls-expr", help="J expression for L_S of a semilinear set"), expr=False)
    p.add_argument("semilinear", help="semilinear JSON file")
    p.add_argument("--alphabet")
    p.set_defaults(func=cmd_ls_expr)

    p = common(sub.add_parser("extract", help="J expression of a J P/T system"), expr=False, formats=("text", "json"))
    p.add_argument("net")
    p.add_argument("--bound", type=int, default=12, help="verification bound on the token sum")
    p.add_argument("--allow-partial", action="store_true")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("lcm", help="build, run or replay a multicounter machine")
    p.add_argument("action", choices=("build", "run", "replay"))
    common(p, formats=("text", "json", "dot"))
    p.add_argument("--machine", help="machine JSON instead of an expression")
    p.add_argument("--word", default="")
    p.add_argument("--witness", default="", help="move indices for replay")
    p.set_defaults(func=cmd_lcm)

    p = sub.add_parser("grammar", help="build, validate or enumerate a matrix grammar")
    p.add_argument("action", choices=("build", "validate", "enumerate"))
    common(p, formats=("json", "text"))
    p.add_argument("--grammar", help="grammar JSON instead of an expression")
    p.add_argument("--bound", type=int, default=6)
    p.add_argument("--restricted", action="store_true", help="also check the restricted form")
    p.set_defaults(func=cmd_grammar)

    p = common(sub.add_parser("crosscheck", help="oracle agreement over a generated corpus"), expr=False, formats=("text", "json"))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--bound", type=int, default=5)
    p.add_argument("--alphabet", help="corpus symbols (default a,b,c)")
    p.add_argument("--max-exp", type=int, default=3, help="largest fixed exponent")
    p.add_argument("--max-vars", type=int, default=2)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_crosscheck)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "action", None) in ("build",) and args.command == "lcm" and args.format == "text":
        args.format = "json"
    try:
        return args.func(args)
    except (JLangError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
