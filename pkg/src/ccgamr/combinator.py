"""Combination rules over constituents: application, composition (plain,
crossed, second order), their relation-wise variants, type raising, identity
shortcuts, and conjunction.

Variant selection is automatic: a relation-wise combination fires if and only
if the two graphs share an edge (same concrete label, or an underspecified
label on the function side) carrying the function's first free variable and
the argument's k-th free variable, where k is 1 for application and
order + 1 for composition.  When several edge pairs qualify, the first by
edge-insertion order wins and the outcome carries a note.  The endpoints of
the shared edge unify side by side: source with source, target with target.

Free-variable ordering of a result is positional.  Regular application keeps
the function's remaining variables first, regular composition the argument's;
the relation-wise variants drop the argument's designated variable and keep
a variable merged across the shared edge in its earliest surviving slot.
"""

from __future__ import annotations

from dataclasses import dataclass

from .category import (
    Atom,
    BACKWARD,
    Category,
    FORWARD,
    Functor,
    check_iso_principle,
    format_category,
    unify,
)
from .graph import (
    UNDERSPECIFIED,
    AmrSubgraph,
    UnificationError,
    Workspace,
    substitute,
    with_fv_order,
)


class CombinationError(Exception):
    pass


class Identity:
    """Semantics of words that shape syntax but add no graph material."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ID"


IDENTITY = Identity()


@dataclass(frozen=True)
class Constituent:
    start: int
    end: int
    category: Category
    semantics: object  # AmrSubgraph | Identity | ConjPartial


@dataclass(frozen=True)
class ConjPartial:
    """Conjunction word paired with the right conjunct, awaiting the left."""

    conj: Constituent
    right: Constituent


@dataclass(frozen=True)
class SharedEdgeMatch:
    f_edge_pos: int  # index into the function's edge tuple
    a_edge_pos: int  # index into the argument's edge tuple
    f_side: str  # 'source' or 'target': where the function's fv[1] sits
    label: str  # resolved concrete label
    ambiguous: bool = False


@dataclass(frozen=True)
class Combined:
    constituent: Constituent
    rule: str
    notes: tuple[str, ...] = ()


def is_graph(sem: object) -> bool:
    return isinstance(sem, AmrSubgraph)


def relation_wise_match(f: AmrSubgraph, a: AmrSubgraph, k: int) -> SharedEdgeMatch | None:
    """Shared-edge candidate for a relation-wise combination, if any.

    The function's first free variable must lie on the function edge and the
    argument's k-th free variable on the argument edge.  The argument-side
    label must be concrete; the function side may be underspecified.
    """
    if not f.fv or len(a.fv) < k:
        return None
    f1 = f.fv[0]
    ak = a.fv[k - 1]
    found: list[tuple[int, int, str, str]] = []
    for i, fe in enumerate(f.edges):
        if fe.source == f1:
            f_side = "source"
        elif fe.target == f1:
            f_side = "target"
        else:
            continue
        for j, ae in enumerate(a.edges):
            if ak not in (ae.source, ae.target):
                continue
            if ae.label == UNDERSPECIFIED:
                continue
            if fe.label != UNDERSPECIFIED and fe.label != ae.label:
                continue
            found.append((i, j, f_side, ae.label))
    if not found:
        return None
    i, j, side, label = found[0]
    return SharedEdgeMatch(i, j, side, label, ambiguous=len(found) > 1)


def relation_wise_combine(
    f: AmrSubgraph,
    a: AmrSubgraph,
    match: SharedEdgeMatch,
    mode: str,
    k: int,
) -> tuple[AmrSubgraph, tuple[str, ...]]:
    """Union the graphs and identify the shared edge.

    Source unifies with source and target with target, so material hanging
    off either copy of the edge is preserved.  The result keeps the
    function's root unless the function is rooted at its own first free
    variable and that variable lands somewhere other than the argument's
    root, in which case the argument's root wins.
    """
    ws = Workspace()
    fmap, f_offset = ws.add_graph(f)
    amap, _ = ws.add_graph(a)
    fe = f.edges[match.f_edge_pos]
    ae = a.edges[match.a_edge_pos]
    partner = ae.source if match.f_side == "source" else ae.target
    root = fmap[f.root]
    if f.root == f.fv[0] and partner != a.root:
        root = amap[a.root]
    ws.merge(fmap[fe.source], amap[ae.source])
    ws.merge(fmap[fe.target], amap[ae.target])
    ws.set_edge_label(f_offset + match.f_edge_pos, match.label)
    a_rest = [amap[x] for i, x in enumerate(a.fv) if i != k - 1]
    f_all = [fmap[x] for x in f.fv]
    slots = f_all + a_rest if mode == "application" else a_rest + f_all
    graph, _ = ws.freeze(root, slots)
    notes = ()
    if match.ambiguous:
        notes = (f"several shared-edge candidates for {match.label}; picked first by insertion order",)
    return graph, notes


def _regular_semantics(f: AmrSubgraph, a: AmrSubgraph, mode: str) -> AmrSubgraph:
    if not f.fv:
        raise CombinationError("function semantics has no free variable to fill")
    sub = substitute(f, 1, a)
    if mode == "application":
        return sub.graph  # already f-remaining then a-remaining
    return with_fv_order(sub.graph, sub.h_remaining + sub.g_remaining)


def _check_result(category: Category, semantics: object) -> None:
    problems = check_iso_principle(category, semantics)
    if problems:
        raise CombinationError(
            "result breaks the functional-isomorphism principle: " + "; ".join(problems)
        )


def _span(direction: str, function: Constituent, argument: Constituent) -> tuple[int, int]:
    left, right = (function, argument) if direction == "forward" else (argument, function)
    if left.end != right.start:
        raise CombinationError(
            f"constituents are not adjacent: ({left.start},{left.end}) + ({right.start},{right.end})"
        )
    return left.start, right.end


def _function_slash(direction: str) -> str:
    return FORWARD if direction == "forward" else BACKWARD


def _reject_partial(*constituents: Constituent) -> None:
    for c in constituents:
        if isinstance(c.semantics, ConjPartial):
            raise CombinationError("a pending conjunction cannot be combined this way")


def _semantic_combination(
    f: AmrSubgraph, a: AmrSubgraph, mode: str, k: int, variant: str
) -> tuple[AmrSubgraph, bool, tuple[str, ...]]:
    """Shared path: returns (graph, relation_wise_used, notes)."""
    match = None
    if variant in ("auto", "relation"):
        match = relation_wise_match(f, a, k)
    if variant == "relation" and match is None:
        raise CombinationError("forced relation-wise combination, but no shared edge exists")
    notes: tuple[str, ...] = ()
    if match is not None and variant != "regular":
        try:
            graph, notes = relation_wise_combine(f, a, match, mode, k)
            return graph, True, notes
        except UnificationError as err:
            if variant == "relation":
                raise CombinationError(f"shared-edge unification failed: {err}") from err
            notes = (f"shared-edge unification failed ({err}); fell back to the regular variant",)
    if a.fv and a.is_free(a.root):
        notes += ("argument is rooted at a free variable; the merged variable keeps the argument's slot",)
    return _regular_semantics(f, a, mode), False, notes


def combine_application(
    direction: str,
    function: Constituent,
    argument: Constituent,
    variant: str = "auto",
) -> Combined:
    """Function application, relation-wise when a shared edge exists."""
    _reject_partial(function, argument)
    span = _span(direction, function, argument)
    fcat = function.category
    if not isinstance(fcat, Functor) or fcat.slash != _function_slash(direction):
        raise CombinationError(f"{format_category(fcat)} is not a {direction} functor")
    unified = unify(fcat.argument, argument.category)
    if unified is None:
        raise CombinationError(
            f"argument {format_category(argument.category)} does not fit "
            f"{format_category(fcat)}"
        )
    # X|X modifiers pass resolved features through to the result
    result_cat = unified if fcat.result == fcat.argument else fcat.result
    base = ">" if direction == "forward" else "<"
    if isinstance(function.semantics, Identity) or isinstance(argument.semantics, Identity):
        other = argument.semantics if isinstance(function.semantics, Identity) else function.semantics
        if variant == "relation":
            raise CombinationError("identity semantics has no edges to share")
        _check_result(result_cat, other)
        return Combined(Constituent(span[0], span[1], result_cat, other), base)
    semantics, used_relation, notes = _semantic_combination(
        function.semantics, argument.semantics, "application", 1, variant
    )
    _check_result(result_cat, semantics)
    rule = base + ("R" if used_relation else "")
    return Combined(Constituent(span[0], span[1], result_cat, semantics), rule, notes)


def _peel(cat: Category, order: int) -> tuple[Category, list[tuple[str, Category]]] | None:
    peeled: list[tuple[str, Category]] = []
    for _ in range(order):
        if not isinstance(cat, Functor):
            return None
        peeled.append((cat.slash, cat.argument))
        cat = cat.result
    return cat, peeled


def combine_composition(
    direction: str,
    order: int,
    function: Constituent,
    argument: Constituent,
    crossed: bool | None = None,
    variant: str = "auto",
) -> Combined:
    """Function composition of the given order, relation-wise when shared.

    ``crossed`` asserts the expected slash configuration when given;
    otherwise it is inferred from the argument's peeled slashes.
    """
    _reject_partial(function, argument)
    if order < 1:
        raise CombinationError("composition order must be at least 1")
    span = _span(direction, function, argument)
    fcat = function.category
    own = _function_slash(direction)
    if not isinstance(fcat, Functor) or fcat.slash != own:
        raise CombinationError(f"{format_category(fcat)} is not a {direction} functor")
    peeled = _peel(argument.category, order)
    if peeled is None:
        raise CombinationError(
            f"argument {format_category(argument.category)} is too shallow for order-{order} composition"
        )
    inner, args = peeled
    unified = unify(fcat.argument, inner)
    if unified is None:
        raise CombinationError(
            f"cannot compose {format_category(fcat)} with {format_category(argument.category)}"
        )
    actually_crossed = any(slash != own for slash, _ in args)
    if crossed is not None and crossed != actually_crossed:
        want = "crossed" if crossed else "non-crossed"
        raise CombinationError(f"expected {want} composition, categories say otherwise")
    result_cat: Category = unified if fcat.result == fcat.argument else fcat.result
    for slash, arg in reversed(args):
        result_cat = Functor(result_cat, slash, arg)
    base = ">" if direction == "forward" else "<"
    suffix = ("B2" if order == 2 else "B") + ("x" if actually_crossed else "")
    if isinstance(function.semantics, Identity) or isinstance(argument.semantics, Identity):
        other = argument.semantics if isinstance(function.semantics, Identity) else function.semantics
        if variant == "relation":
            raise CombinationError("identity semantics has no edges to share")
        _check_result(result_cat, other)
        return Combined(Constituent(span[0], span[1], result_cat, other), base + suffix)
    semantics, used_relation, notes = _semantic_combination(
        function.semantics, argument.semantics, "composition", order + 1, variant
    )
    _check_result(result_cat, semantics)
    rule = base + ("R" if used_relation else "") + suffix
    return Combined(Constituent(span[0], span[1], result_cat, semantics), rule, notes)


def type_raise(c: Constituent, target: Category, direction: str) -> Combined:
    """Raise X to T/(T\\X) (forward) or T\\(T/X) (backward).

    The new semantics is a fresh free variable with an underspecified edge to
    the old root; the variable goes first in the fv order and the edge label
    is fixed by a later relation-wise combination.
    """
    if not is_graph(c.semantics):
        raise CombinationError("only graph semantics can be type-raised")
    if direction == "forward":
        cat: Category = Functor(target, FORWARD, Functor(target, BACKWARD, c.category))
        marker = ">"
    else:
        cat = Functor(target, BACKWARD, Functor(target, FORWARD, c.category))
        marker = "<"
    old: AmrSubgraph = c.semantics
    ws = Workspace()
    mapping, _ = ws.add_graph(old)
    fresh = ws.add_node(None)
    ws.add_edge(fresh, UNDERSPECIFIED, mapping[old.root])
    graph, _ = ws.freeze(fresh, [fresh] + [mapping[x] for x in old.fv])
    rule = f"{marker}T[{format_category(target)}]"
    return Combined(Constituent(c.start, c.end, cat, graph), rule)


def _conj_concept_graph(conj: Constituent) -> AmrSubgraph:
    if not (isinstance(conj.category, Atom) and conj.category.base == "Conj"):
        raise CombinationError("the conjunction word must have category Conj")
    sem = conj.semantics
    if not is_graph(sem) or len(sem.nodes) != 1 or sem.edges or sem.fv:
        raise CombinationError("a conjunction word needs a single-concept semantics")
    return sem


def conj_attach(conj: Constituent, right: Constituent) -> Combined:
    """Pair a conjunction with its right conjunct; semantics stays pending."""
    _conj_concept_graph(conj)
    if isinstance(right.semantics, Identity):
        raise CombinationError("identity semantics cannot be a conjunct")
    _reject_partial(right)
    if conj.end != right.start:
        raise CombinationError("conjunction and right conjunct are not adjacent")
    cat = Functor(right.category, BACKWARD, right.category)
    return Combined(
        Constituent(conj.start, right.end, cat, ConjPartial(conj, right)), "&"
    )


def coordinate(
    conj: Constituent,
    left: Constituent,
    right: Constituent,
    strict: bool = False,
) -> Combined:
    """Join two like-category conjuncts under a fresh conjunction root.

    The conjunct roots become :op1 and :op2 children and free variables merge
    pairwise by position, so both conjuncts end up sharing their open slots.
    ``strict`` enforces at most one free variable per conjunct.
    """
    concept = _conj_concept_graph(conj)
    for side, c in (("left", left), ("right", right)):
        if isinstance(c.semantics, Identity):
            raise CombinationError(f"identity semantics cannot be the {side} conjunct")
        _reject_partial(c)
    cat = unify(left.category, right.category)
    if cat is None:
        raise CombinationError(
            f"conjunct categories do not unify: {format_category(left.category)}"
            f" vs {format_category(right.category)}"
        )
    lsem: AmrSubgraph = left.semantics
    rsem: AmrSubgraph = right.semantics
    if len(lsem.fv) != len(rsem.fv):
        raise CombinationError(
            f"conjuncts expose {len(lsem.fv)} vs {len(rsem.fv)} free variables"
        )
    if strict and len(lsem.fv) > 1:
        raise CombinationError("strict conjunction allows at most one free variable per conjunct")
    ws = Workspace()
    cmap, _ = ws.add_graph(concept)
    lmap, _ = ws.add_graph(lsem)
    rmap, _ = ws.add_graph(rsem)
    root = cmap[concept.root]
    ws.add_edge(root, ":op1", lmap[lsem.root])
    ws.add_edge(root, ":op2", rmap[rsem.root])
    for lx, rx in zip(lsem.fv, rsem.fv):
        ws.merge(lmap[lx], rmap[rx])
    slots = [lmap[x] for x in lsem.fv] + [rmap[x] for x in rsem.fv]
    graph, _ = ws.freeze(root, slots)
    _check_result(cat, graph)
    return Combined(Constituent(left.start, right.end, cat, graph), "&")
