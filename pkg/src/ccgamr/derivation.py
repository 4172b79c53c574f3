"""Two execution modes over the combinators: scripted replay and CKY search.

Replay takes an s-expression derivation script, e.g.::

    (>R (leaf 0 what.1) (>RB (> (leaf 1 did.1) (leaf 2 you.1)) ...))

evaluates it bottom-up against a lexicon, records every intermediate
constituent, and verifies at each step that the combinator the engine
selects (relation-wise or regular, crossed or not) is the one the script
names.  CKY search explores all enabled combinators over a token sequence
and returns complete derivations deduplicated by category and semantic
isomorphism class.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import penman
from .category import Atom, Category, parse_category, unify
from .combinator import (
    Combined,
    CombinationError,
    ConjPartial,
    Constituent,
    Identity,
    combine_application,
    combine_composition,
    conj_attach,
    coordinate,
    is_graph,
    type_raise,
)
from .graph import UNDERSPECIFIED, iso_equal, validate
from .lexicon import Lexicon


class ScriptError(ValueError):
    pass


class ReplayError(Exception):
    def __init__(self, path: tuple[int, ...], message: str):
        where = "/".join(map(str, path)) or "root"
        super().__init__(f"step {where}: {message}")
        self.path = path


class UnknownTokenError(ValueError):
    pass


class ChartOverflowError(Exception):
    pass


# ---------------------------------------------------------------------------
# Derivation scripts

@dataclass(frozen=True)
class Leaf:
    token_index: int
    entry_id: str


@dataclass(frozen=True)
class Unary:
    name: str
    child: "ScriptNode"


@dataclass(frozen=True)
class Binary:
    name: str
    left: "ScriptNode"
    right: "ScriptNode"


ScriptNode = Leaf | Unary | Binary

_APPLICATION_RE = re.compile(r"^([><])(R?)$")
_COMPOSITION_RE = re.compile(r"^([><])(R?)B(2?)(x?)$")
_RAISE_RE = re.compile(r"^([><])T\[(.+)\]$")


def _lex_script(text: str) -> list[str]:
    return re.findall(r"[()]|[^\s()]+", text)


def parse_script(text: str) -> ScriptNode:
    tokens = _lex_script(text)
    if not tokens:
        raise ScriptError("empty derivation script")
    pos = 0

    def take() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ScriptError("unexpected end of script")
        tok = tokens[pos]
        pos += 1
        return tok

    def node() -> ScriptNode:
        nonlocal pos
        tok = take()
        if tok != "(":
            raise ScriptError(f"expected '(', found {tok!r}")
        head = take()
        if head == "leaf":
            index, entry_id = take(), take()
            if not index.isdigit():
                raise ScriptError(f"leaf index must be an integer, found {index!r}")
            out: ScriptNode = Leaf(int(index), entry_id)
        elif _RAISE_RE.match(head):
            out = Unary(head, node())
        elif head == "&" or _APPLICATION_RE.match(head) or _COMPOSITION_RE.match(head):
            left = node()
            right = node()
            out = Binary(head, left, right)
        else:
            raise ScriptError(f"unknown combinator {head!r}")
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ScriptError(f"missing ')' after {head!r}")
        pos += 1
        return out

    root = node()
    if pos != len(tokens):
        raise ScriptError(f"trailing script input {tokens[pos]!r}")
    return root


def format_script(node: ScriptNode) -> str:
    if isinstance(node, Leaf):
        return f"(leaf {node.token_index} {node.entry_id})"
    if isinstance(node, Unary):
        return f"({node.name} {format_script(node.child)})"
    return f"({node.name} {format_script(node.left)} {format_script(node.right)})"


# ---------------------------------------------------------------------------
# Replay

@dataclass(frozen=True)
class Step:
    path: tuple[int, ...]
    rule: str
    constituent: Constituent
    notes: tuple[str, ...] = ()


@dataclass
class Derivation:
    script: ScriptNode
    steps: list[Step]
    final: Constituent
    forest_count: int = 1

    def to_script(self) -> str:
        return format_script(self.script)


def describe_semantics(sem: object) -> str:
    if isinstance(sem, Identity):
        return "ID"
    if isinstance(sem, ConjPartial):
        return "<pending conjunction>"
    return penman.serialize(sem)


def _binary_outcome(
    name: str, left: Constituent, right: Constituent
) -> Combined:
    """Run the operation a script step names, with automatic variant choice."""
    m = _APPLICATION_RE.match(name)
    if m:
        direction = "forward" if m.group(1) == ">" else "backward"
        f, a = (left, right) if direction == "forward" else (right, left)
        return combine_application(direction, f, a)
    m = _COMPOSITION_RE.match(name)
    if m:
        direction = "forward" if m.group(1) == ">" else "backward"
        order = 2 if m.group(3) else 1
        crossed = bool(m.group(4))
        f, a = (left, right) if direction == "forward" else (right, left)
        return combine_composition(direction, order, f, a, crossed=crossed)
    if name == "&":
        if isinstance(left.category, Atom) and left.category.base == "Conj":
            return conj_attach(left, right)
        if isinstance(right.semantics, ConjPartial):
            partial: ConjPartial = right.semantics
            return coordinate(partial.conj, left, partial.right)
        raise CombinationError("'&' needs a Conj word or a pending conjunction on the right")
    raise CombinationError(f"unknown combinator name {name!r}")


def _explain_variant_mismatch(scripted: str, outcome: Combined) -> str:
    got = outcome.rule
    lines = [f"script names {scripted!r} but the engine derives {got!r}"]
    if "R" in got and "R" not in scripted:
        lines.append(
            f"{scripted!r} fails: the constituents share a relation, and the "
            "relation-wise variant applies whenever a shared relation exists"
        )
        lines.append(f"{got!r} holds: the shared edge was merged")
    elif "R" in scripted and "R" not in got:
        lines.append(f"{scripted!r} fails: no relation is shared at the required free variables")
        lines.append(f"{got!r} holds: the regular variant applies")
    return "; ".join(lines)


def replay(script: ScriptNode, lexicon: Lexicon) -> Derivation:
    steps: list[Step] = []

    def walk(node: ScriptNode, path: tuple[int, ...]) -> Constituent:
        if isinstance(node, Leaf):
            try:
                entry = lexicon.entry(node.entry_id)
            except KeyError as err:
                raise ReplayError(path, str(err)) from err
            c = Constituent(node.token_index, node.token_index + 1, entry.category, entry.semantics)
            steps.append(Step(path, f"lex {node.entry_id}", c))
            return c
        if isinstance(node, Unary):
            child = walk(node.child, path + (0,))
            m = _RAISE_RE.match(node.name)
            if not m:
                raise ReplayError(path, f"unknown unary combinator {node.name!r}")
            direction = "forward" if m.group(1) == ">" else "backward"
            try:
                target = parse_category(m.group(2))
                outcome = type_raise(child, target, direction)
            except (CombinationError, ValueError) as err:
                raise ReplayError(path, str(err)) from err
            steps.append(Step(path, outcome.rule, outcome.constituent, outcome.notes))
            return outcome.constituent
        left = walk(node.left, path + (0,))
        right = walk(node.right, path + (1,))
        try:
            outcome = _binary_outcome(node.name, left, right)
        except CombinationError as err:
            raise ReplayError(path, f"{node.name!r} failed: {err}") from err
        if outcome.rule != node.name:
            raise ReplayError(path, _explain_variant_mismatch(node.name, outcome))
        steps.append(Step(path, outcome.rule, outcome.constituent, outcome.notes))
        return outcome.constituent

    final = walk(script, ())
    return Derivation(script, steps, final)


def finalize_check(c: Constituent) -> list[str]:
    """Violations that keep a constituent from completing a sentence."""
    sem = c.semantics
    if isinstance(sem, Identity):
        return ["identity semantics cannot complete a derivation"]
    if isinstance(sem, ConjPartial):
        return ["pending conjunction is missing its left conjunct"]
    problems = [f"unfilled free variable ?{i}" for i in range(1, len(sem.fv) + 1)]
    for e in sem.edges:
        if e.label == UNDERSPECIFIED:
            problems.append("underspecified edge was never resolved")
    problems.extend(validate(sem))
    return problems


# ---------------------------------------------------------------------------
# CKY chart search

@dataclass(frozen=True)
class TypeRaisingRule:
    source: Category
    target: Category
    direction: str = "forward"


#: The one raising rule the fixtures ever need: NP to S/(S\NP).
NP_TO_S = (TypeRaisingRule(Atom("NP"), Atom("S"), "forward"),)


@dataclass(frozen=True)
class ParserConfig:
    enabled: frozenset[str] | None = None  # None enables every combinator
    max_composition_order: int = 2
    type_raising: tuple[TypeRaisingRule, ...] = ()  # raising is opt-in
    strict_conjunction: bool = False
    max_cell_items: int = 200
    goal: str = "S"  # atomic base of complete derivations


@dataclass
class _Item:
    constituent: Constituent
    script: ScriptNode
    rule: str
    notes: tuple[str, ...] = ()
    forest_count: int = 1


def _same_semantics(a: object, b: object) -> bool:
    if isinstance(a, Identity) and isinstance(b, Identity):
        return True
    if is_graph(a) and is_graph(b):
        return iso_equal(a, b)
    if isinstance(a, ConjPartial) and isinstance(b, ConjPartial):
        return (
            a.conj.category == b.conj.category
            and _same_semantics(a.conj.semantics, b.conj.semantics)
            and a.right.category == b.right.category
            and _same_semantics(a.right.semantics, b.right.semantics)
        )
    return False


class _Chart:
    def __init__(self, config: ParserConfig):
        self.config = config
        self.cells: dict[tuple[int, int], list[_Item]] = {}

    def add(self, span: tuple[int, int], item: _Item) -> bool:
        cell = self.cells.setdefault(span, [])
        for existing in cell:
            if existing.constituent.category == item.constituent.category and _same_semantics(
                existing.constituent.semantics, item.constituent.semantics
            ):
                existing.forest_count += item.forest_count
                return False
        cell.append(item)
        if len(cell) > self.config.max_cell_items:
            raise ChartOverflowError(
                f"chart cell {span} exceeded {self.config.max_cell_items} items"
            )
        return True


def _allowed(config: ParserConfig, rule: str) -> bool:
    return config.enabled is None or rule in config.enabled


def _try(outcomes: list[Combined], fn, *args, **kwargs) -> None:
    try:
        outcomes.append(fn(*args, **kwargs))
    except CombinationError:
        pass


def _binary_candidates(
    left: Constituent, right: Constituent, config: ParserConfig
) -> list[Combined]:
    out: list[Combined] = []
    _try(out, combine_application, "forward", left, right)
    _try(out, combine_application, "backward", right, left)
    for order in range(1, config.max_composition_order + 1):
        _try(out, combine_composition, "forward", order, left, right)
        _try(out, combine_composition, "backward", order, right, left)
    if isinstance(left.category, Atom) and left.category.base == "Conj":
        _try(out, conj_attach, left, right)
    if isinstance(right.semantics, ConjPartial):
        partial: ConjPartial = right.semantics
        _try(out, coordinate, partial.conj, left, partial.right, config.strict_conjunction)
    return [o for o in out if _allowed(config, o.rule)]


def _raise_closure(chart: _Chart, span: tuple[int, int]) -> None:
    config = chart.config
    if not config.type_raising:
        return
    changed = True
    while changed:
        changed = False
        for item in list(chart.cells.get(span, [])):
            if not is_graph(item.constituent.semantics):
                continue
            for rule in config.type_raising:
                if unify(rule.source, item.constituent.category) is None:
                    continue
                try:
                    outcome = type_raise(item.constituent, rule.target, rule.direction)
                except CombinationError:
                    continue
                if not _allowed(config, outcome.rule):
                    continue
                script = Unary(outcome.rule, item.script)
                new = _Item(outcome.constituent, script, outcome.rule, outcome.notes,
                            item.forest_count)
                if chart.add(span, new):
                    changed = True


def cky_parse(tokens: list[str], lexicon: Lexicon, config: ParserConfig | None = None) -> list[Derivation]:
    """All complete derivations over the goal category, one per iso-class."""
    config = config or ParserConfig()
    if config.max_composition_order not in (1, 2):
        raise ValueError("max_composition_order must be 1 or 2")
    n = len(tokens)
    if n == 0:
        return []
    missing = [t for t in tokens if not lexicon.lookup(t)]
    if missing:
        raise UnknownTokenError(f"tokens not in lexicon: {', '.join(sorted(set(missing)))}")
    chart = _Chart(config)
    for i, token in enumerate(tokens):
        for entry in lexicon.lookup(token):
            c = Constituent(i, i + 1, entry.category, entry.semantics)
            chart.add((i, i + 1), _Item(c, Leaf(i, entry.entry_id), f"lex {entry.entry_id}"))
        _raise_closure(chart, (i, i + 1))
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            for split in range(i + 1, j):
                for litem in chart.cells.get((i, split), []):
                    for ritem in chart.cells.get((split, j), []):
                        for outcome in _binary_candidates(
                            litem.constituent, ritem.constituent, config
                        ):
                            script = Binary(outcome.rule, litem.script, ritem.script)
                            chart.add(
                                (i, j),
                                _Item(
                                    outcome.constituent,
                                    script,
                                    outcome.rule,
                                    outcome.notes,
                                    litem.forest_count * ritem.forest_count,
                                ),
                            )
            _raise_closure(chart, (i, j))
    results: list[Derivation] = []
    for item in chart.cells.get((0, n), []):
        cat = item.constituent.category
        if not (isinstance(cat, Atom) and cat.base == config.goal):
            continue
        if finalize_check(item.constituent):
            continue
        derivation = replay(item.script, lexicon)
        derivation.forest_count = item.forest_count
        results.append(derivation)
    return results
