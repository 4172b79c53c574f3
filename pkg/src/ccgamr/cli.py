"""Command-line surface: parse sentences, replay scripts, validate lexicons,
render graphs and derivations, compare graphs.

Exit statuses form a stable contract: 0 success or gold match, 1 usage or
I/O error, 2 no derivation, 3 gold mismatch, 4 validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import penman
from .category import format_category, parse_category
from .derivation import (
    ChartOverflowError,
    Derivation,
    ParserConfig,
    ReplayError,
    ScriptError,
    TypeRaisingRule,
    UnknownTokenError,
    cky_parse,
    describe_semantics,
    parse_script,
    replay,
)
from .graph import AmrSubgraph, iso_equal, UNDERSPECIFIED
from .lexicon import Lexicon, LexiconError, load as load_lexicon

OK = 0
USAGE = 1
NO_DERIVATION = 2
MISMATCH = 3
INVALID = 4

MAX_CELL_ENV = "CCGAMR_MAX_CELL"


def _read(path: str) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        print(f"error: cannot read {path}: {err}", file=sys.stderr)
        return None


def _load_lexicon(path: str) -> Lexicon | int:
    try:
        return load_lexicon(path)
    except OSError as err:
        print(f"error: cannot read lexicon {path}: {err}", file=sys.stderr)
        return USAGE
    except LexiconError as err:
        print(f"lexicon {path} failed validation:", file=sys.stderr)
        for problem in err.problems:
            print(f"  {problem}", file=sys.stderr)
        return INVALID


def _parse_config_text(text: str, source: str) -> ParserConfig:
    kwargs: dict = {}
    raising: list[TypeRaisingRule] = []
    saw_raising = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "max_composition_order":
            kwargs["max_composition_order"] = int(value)
        elif key == "max_cell_items":
            kwargs["max_cell_items"] = int(value)
        elif key == "strict_conjunction":
            kwargs["strict_conjunction"] = value.lower() in ("1", "true", "yes")
        elif key == "goal":
            kwargs["goal"] = value
        elif key == "combinators":
            kwargs["enabled"] = frozenset(v.strip() for v in value.split(",") if v.strip())
        elif key == "type_raise":
            saw_raising = True
            if value.lower() != "none":
                # e.g. "NP > S" raises NP forward to S/(S\NP)
                m = value.replace(" ", "")
                for direction, symbol in (("forward", ">"), ("backward", "<")):
                    if symbol in m:
                        src, tgt = m.split(symbol, 1)
                        raising.append(
                            TypeRaisingRule(parse_category(src), parse_category(tgt), direction)
                        )
                        break
                else:
                    raise ValueError(f"{source}:{lineno}: bad type_raise rule {value!r}")
        else:
            raise ValueError(f"{source}:{lineno}: unknown config key {key!r}")
    if saw_raising:
        kwargs["type_raising"] = tuple(raising)
    return ParserConfig(**kwargs)


def _build_config(path: str | None) -> ParserConfig | int:
    if path is None:
        config = ParserConfig()
    else:
        text = _read(path)
        if text is None:
            return USAGE
        try:
            config = _parse_config_text(text, path)
        except ValueError as err:
            print(f"error: {err}", file=sys.stderr)
            return USAGE
    limit = os.environ.get(MAX_CELL_ENV)
    if limit:
        try:
            config = replace(config, max_cell_items=int(limit))
        except ValueError:
            print(f"error: {MAX_CELL_ENV} must be an integer", file=sys.stderr)
            return USAGE
    return config


def _print_derivation(d: Derivation, show_script: bool) -> None:
    print(describe_semantics(d.final.semantics))
    if show_script:
        print(f"  category: {format_category(d.final.category)}")
        print(f"  script:   {d.to_script()}")
        print(f"  forest:   {d.forest_count} derivation(s) in this class")


def cmd_parse(args: argparse.Namespace) -> int:
    lex = _load_lexicon(args.lexicon)
    if isinstance(lex, int):
        return lex
    config = _build_config(args.config)
    if isinstance(config, int):
        return config
    if args.goal:
        config = replace(config, goal=args.goal)
    tokens = args.sentence.split()
    if not tokens:
        print("error: empty sentence", file=sys.stderr)
        return USAGE
    try:
        results = cky_parse(tokens, lex, config)
    except UnknownTokenError as err:
        print(f"no derivation: {err}", file=sys.stderr)
        return NO_DERIVATION
    except ChartOverflowError as err:
        print(f"no derivation: {err} (raise {MAX_CELL_ENV} or max_cell_items)", file=sys.stderr)
        return NO_DERIVATION
    if not results:
        print(f"no derivation over goal category {config.goal!r}", file=sys.stderr)
        return NO_DERIVATION
    for d in results:
        _print_derivation(d, args.all)
    if args.gold:
        text = _read(args.gold)
        if text is None:
            return USAGE
        try:
            goldgraph = penman.parse(text)
        except penman.PenmanError as err:
            print(f"error: bad gold graph: {err}", file=sys.stderr)
            return USAGE
        if any(iso_equal(d.final.semantics, goldgraph) for d in results):
            print("gold: match")
            return OK
        print("gold: no derivation matches")
        return MISMATCH
    return OK


def _print_trace(d: Derivation) -> None:
    for step in d.steps:
        c = step.constituent
        span = f"({c.start},{c.end})"
        print(f"{step.rule:12s} {span:8s} {format_category(c.category):28s} {describe_semantics(c.semantics)}")
        for note in step.notes:
            print(f"{'':12s} note: {note}")


def cmd_replay(args: argparse.Namespace) -> int:
    lex = _load_lexicon(args.lexicon)
    if isinstance(lex, int):
        return lex
    text = _read(args.derivation)
    if text is None:
        return USAGE
    try:
        script = parse_script(text)
    except ScriptError as err:
        print(f"error: bad derivation script: {err}", file=sys.stderr)
        return USAGE
    try:
        d = replay(script, lex)
    except ReplayError as err:
        print(f"replay failed: {err}", file=sys.stderr)
        return INVALID
    if args.trace:
        _print_trace(d)
    print(describe_semantics(d.final.semantics))
    if args.gold:
        gold_text = _read(args.gold)
        if gold_text is None:
            return USAGE
        try:
            goldgraph = penman.parse(gold_text)
        except penman.PenmanError as err:
            print(f"error: bad gold graph: {err}", file=sys.stderr)
            return USAGE
        sem = d.final.semantics
        if isinstance(sem, AmrSubgraph) and iso_equal(sem, goldgraph):
            print("gold: match")
            return OK
        print("gold: mismatch")
        return MISMATCH
    return OK


def cmd_check(args: argparse.Namespace) -> int:
    try:
        lex = load_lexicon(args.lexicon)
    except OSError as err:
        print(f"error: cannot read lexicon {args.lexicon}: {err}", file=sys.stderr)
        return USAGE
    except LexiconError as err:
        for problem in err.problems:
            print(problem)
        print(f"{len(err.problems)} violation(s)")
        return INVALID
    print(f"ok: {len(lex.entries)} entries, {len(lex.tokens())} distinct tokens")
    return OK


def _dot_escape(label: str) -> str:
    return label.replace("\\", "\\\\").replace('"', '\\"')


def render_dot(g: AmrSubgraph) -> str:
    lines = ["digraph amr {", "  rankdir=TB;"]
    for node in g.nodes:
        if node.is_free:
            label = f"?{g.fv_index(node.id)}"
            shape = "box"
        else:
            label = node.concept or ""
            shape = "ellipse"
        extra = " peripheries=2" if node.id == g.root else ""
        lines.append(f'  n{node.id} [label="{_dot_escape(label)}" shape={shape}{extra}];')
    for e in g.edges:
        label = "?" if e.label == UNDERSPECIFIED else e.label.lstrip(":")
        lines.append(f'  n{e.source} -> n{e.target} [label="{_dot_escape(label)}"];')
    lines.append("}")
    return "\n".join(lines)


_SCRIPT_HEADS = ("leaf", ">", "<", "&")


def _looks_like_script(text: str) -> bool:
    body = text.lstrip()
    if not body.startswith("("):
        return False
    head = body[1:].lstrip().split(None, 1)
    return bool(head) and head[0].startswith(_SCRIPT_HEADS)


def cmd_render(args: argparse.Namespace) -> int:
    text = _read(args.input)
    if text is None:
        return USAGE
    if _looks_like_script(text):
        if not args.lexicon:
            print("error: rendering a derivation needs --lexicon", file=sys.stderr)
            return USAGE
        lex = _load_lexicon(args.lexicon)
        if isinstance(lex, int):
            return lex
        try:
            d = replay(parse_script(text), lex)
        except (ScriptError, ReplayError) as err:
            print(f"error: {err}", file=sys.stderr)
            return USAGE
        sem = d.final.semantics
        if not isinstance(sem, AmrSubgraph):
            print("error: derivation has no graph semantics to render", file=sys.stderr)
            return USAGE
        graph = sem
    else:
        try:
            graph = penman.parse(text)
        except penman.PenmanError as err:
            print(f"error: {err}", file=sys.stderr)
            return USAGE
    if args.format == "dot":
        print(render_dot(graph))
    else:
        print(penman.serialize(graph, indent=2))
    return OK


def _edge_signatures(g: AmrSubgraph) -> list[str]:
    def show(node_id: int) -> str:
        return g.concept(node_id) or f"?{g.fv_index(node_id)}"

    return sorted(f"{show(e.source)} {e.label} {show(e.target)}" for e in g.edges)


def compare_witness(g1: AmrSubgraph, g2: AmrSubgraph) -> str:
    """Smallest observable difference between two non-isomorphic graphs."""
    from collections import Counter

    c1 = Counter(n.concept or "?" for n in g1.nodes)
    c2 = Counter(n.concept or "?" for n in g2.nodes)
    if c1 != c2:
        concept = min(k for k in (c1.keys() | c2.keys()) if c1[k] != c2[k])
        a, b = c1[concept], c2[concept]
        hint = " (one side reuses a reentrant node)" if {a, b} >= {1, 2} else ""
        return f"node {concept!r} appears {a} vs {b} times{hint}"
    e1, e2 = _edge_signatures(g1), _edge_signatures(g2)
    only1 = [e for e in e1 if e not in e2]
    only2 = [e for e in e2 if e not in e1]
    if only1 or only2:
        witness = min(only1 + only2)
        side = "first" if witness in only1 else "second"
        return f"edge [{witness}] appears only in the {side} graph"
    if len(g1.fv) != len(g2.fv):
        return f"free-variable counts differ: {len(g1.fv)} vs {len(g2.fv)}"
    # same concepts and edge signatures: a reentrancy must be spread differently
    concepts = sorted({n.concept for n in g1.nodes if n.concept is not None})
    for concept in concepts:
        mine = sorted(len(g1.incoming(n.id)) for n in g1.nodes if n.concept == concept)
        theirs = sorted(len(g2.incoming(n.id)) for n in g2.nodes if n.concept == concept)
        if mine != theirs:
            return (
                f"reentrancy differs at the {concept!r} node: "
                f"incoming-edge counts {mine} vs {theirs}"
            )
    return "graphs differ structurally (root or fv placement)"


def cmd_compare(args: argparse.Namespace) -> int:
    graphs = []
    for path in (args.first, args.second):
        text = _read(path)
        if text is None:
            return USAGE
        try:
            graphs.append(penman.parse(text))
        except penman.PenmanError as err:
            print(f"error: {path}: {err}", file=sys.stderr)
            return USAGE
    g1, g2 = graphs
    if iso_equal(g1, g2):
        print("isomorphic")
        return OK
    print("not isomorphic: " + compare_witness(g1, g2))
    return MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccgamr",
        description="Derive AMR graphs compositionally with CCG combinators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="CKY-parse a sentence")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--sentence", required=True)
    p.add_argument("--gold", help="gold graph file to compare against")
    p.add_argument("--config", help="parser configuration file")
    p.add_argument("--goal", help="goal category base (default S)")
    p.add_argument("--all", action="store_true", help="print scripts and forest counts")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("replay", help="replay a derivation script")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--derivation", required=True)
    p.add_argument("--gold")
    p.add_argument("--trace", action="store_true", help="print every intermediate constituent")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("check", help="validate a lexicon file")
    p.add_argument("--lexicon", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("render", help="render a graph or derivation")
    p.add_argument("--input", required=True, help="graph or derivation script file")
    p.add_argument("--format", choices=("text", "dot"), default="text")
    p.add_argument("--lexicon", help="needed when the input is a derivation script")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("compare", help="compare two graph files up to isomorphism")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return USAGE if err.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
