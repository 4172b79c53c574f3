"""Extended PENMAN text format for AMR subgraphs with free variables.

On top of ordinary PENMAN this grammar adds ``?k`` tokens for the k-th free
variable and ``:?`` for an underspecified role.  Inverse roles (``:rel-of``)
are a serialization device only: the parser stores every edge in its forward
direction and the serializer re-derives ``-of`` whenever it has to walk an
edge backwards to reach an unvisited node.

Accepted node forms::

    (v / concept :rel node ...)    definition with relations
    (concept :rel node ...)        anonymous constant with relations
    (v :rel node ...)              re-open an already defined variable
    (?k :rel node ...)             free variable with relations
    v / concept                    leaf definition, parens optional
    v | ?k | "literal" | bareword  mentions / constants

A bareword resolves to a previously defined variable of the same name when
one exists, otherwise it is a fresh constant.  Repeated ``?k`` tokens are
reentrant mentions of one node, never copies.
"""

from __future__ import annotations

import re

from .graph import UNDERSPECIFIED, AmrSubgraph, Edge, Node, validate

__all__ = ["parse", "serialize", "PenmanError", "PenmanSyntaxError"]


class PenmanError(ValueError):
    pass


class PenmanSyntaxError(PenmanError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<lparen>\()
    | (?P<rparen>\))
    | (?P<slash>/)
    | (?P<role>:[^\s()/]+)
    | (?P<string>"[^"]*")
    | (?P<fvar>\?[0-9]+)
    | (?P<atom>[^\s()/:?"][^\s()/:"]*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PenmanSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.concepts: list[str | None] = []
        self.edges: list[tuple[int, str, int] | None] = []
        self.vars: dict[str, int] = {}
        self.fvs: dict[int, int] = {}  # fv index -> node id

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, "", -1)

    def _next(self):
        tok = self._peek()
        if tok[0] is None:
            raise PenmanSyntaxError("unexpected end of input", len(self.tokens))
        self.i += 1
        return tok

    def _new_node(self, concept: str | None) -> int:
        self.concepts.append(concept)
        return len(self.concepts) - 1

    def _fv_node(self, token: str) -> int:
        index = int(token[1:])
        if index not in self.fvs:
            self.fvs[index] = self._new_node(None)
        return self.fvs[index]

    def parse_node(self) -> int:
        kind, value, pos = self._peek()
        if kind == "lparen":
            self._next()
            node = self._head()
            self._relations(node)
            kind, value, pos = self._next()
            if kind != "rparen":
                raise PenmanSyntaxError(f"expected ')', found {value!r}", pos)
            return node
        return self._bare()

    def _head(self) -> int:
        kind, value, pos = self._next()
        if kind == "fvar":
            return self._fv_node(value)
        if kind == "string":
            return self._new_node(value)
        if kind != "atom":
            raise PenmanSyntaxError(f"expected a node, found {value!r}", pos)
        if self._peek()[0] == "slash":
            return self._define_var(value, pos)
        if value in self.vars:
            return self.vars[value]  # re-opened variable
        return self._new_node(value)

    def _define_var(self, var: str, pos: int) -> int:
        self._next()  # slash
        kind, concept, cpos = self._next()
        if kind not in ("atom", "string"):
            raise PenmanSyntaxError(f"expected a concept after '/', found {concept!r}", cpos)
        if var in self.vars:
            raise PenmanSyntaxError(f"variable {var!r} defined twice", pos)
        node = self._new_node(concept)
        self.vars[var] = node
        return node

    def _bare(self) -> int:
        kind, value, pos = self._next()
        if kind == "fvar":
            return self._fv_node(value)
        if kind == "string":
            return self._new_node(value)
        if kind == "atom":
            if self._peek()[0] == "slash":
                return self._define_var(value, pos)
            if value in self.vars:
                return self.vars[value]
            return self._new_node(value)
        raise PenmanSyntaxError(f"expected a node, found {value!r}", pos)

    def _relations(self, node: int) -> None:
        while self._peek()[0] == "role":
            _, role, pos = self._next()
            inverse = role.endswith("-of")
            label = role[:-3] if inverse else role
            if label != UNDERSPECIFIED and not re.fullmatch(r":[A-Za-z][A-Za-z0-9-]*", label):
                raise PenmanSyntaxError(f"malformed role {role!r}", pos)
            slot = len(self.edges)  # keep textual edge order despite recursion
            self.edges.append(None)
            child = self.parse_node()
            edge = (child, label, node) if inverse else (node, label, child)
            if edge in self.edges:
                del self.edges[slot]
            else:
                self.edges[slot] = edge

    def finish(self) -> AmrSubgraph:
        root = self.parse_node()
        kind, value, pos = self._peek()
        if kind is not None:
            raise PenmanSyntaxError(f"trailing input {value!r}", pos)
        indices = sorted(self.fvs)
        if indices and indices != list(range(1, len(indices) + 1)):
            raise PenmanError(
                f"free-variable indices must be 1..{len(indices)}, found {indices}"
            )
        nodes = tuple(Node(i, c) for i, c in enumerate(self.concepts))
        edges = tuple(Edge(*e) for e in self.edges)
        fv = tuple(self.fvs[k] for k in indices)
        graph = AmrSubgraph(nodes, edges, root, fv)
        problems = validate(graph)
        if problems:
            raise PenmanError("invalid graph: " + "; ".join(problems))
        return graph


def parse(text: str) -> AmrSubgraph:
    return _Parser(text).finish()


def _is_literal(concept: str | None) -> bool:
    return concept is not None and concept.startswith('"')


class _Serializer:
    def __init__(self, g: AmrSubgraph, indent: int | None):
        self.g = g
        self.indent = indent
        self.names: dict[int, str] = {}
        self.taken: set[str] = set()
        self.visited_nodes: set[int] = set()
        self.visited_edges: set[int] = set()
        self.incident: dict[int, list[int]] = {n.id: [] for n in g.nodes}
        for i, e in enumerate(g.edges):
            self.incident[e.source].append(i)
            if e.target != e.source:
                self.incident[e.target].append(i)

    def _name(self, node: int) -> str:
        if node not in self.names:
            concept = self.g.concept(node) or "x"
            stripped = concept.strip('"')
            letter = next((c.lower() for c in stripped if c.isalnum()), "x")
            name = letter
            k = 2
            while name in self.taken:
                name = f"{letter}{k}"
                k += 1
            self.taken.add(name)
            self.names[node] = name
        return self.names[node]

    def _pending(self, node: int) -> list[int]:
        return [i for i in self.incident[node] if i not in self.visited_edges]

    def _emit(self, node: int, depth: int) -> str:
        g = self.g
        first = node not in self.visited_nodes
        self.visited_nodes.add(node)
        rels = self._pending(node) if first else []
        for i in rels:
            self.visited_edges.add(i)
        concept = g.concept(node)
        if concept is None:
            head = f"?{g.fv_index(node)}"
            needs_var = False
        elif _is_literal(concept):
            # a literal only needs a variable if it is ever mentioned again
            needs_var = len(self.incident[node]) > 1 or bool(rels)
            head = f"{self._name(node)}/{concept}" if needs_var else concept
        else:
            head = f"{self._name(node)}/{concept}"
            needs_var = True
        if not first:
            return f"?{g.fv_index(node)}" if concept is None else self._name(node)
        if not rels:
            if depth == 0 and needs_var:
                return f"({head})"
            return head
        parts = [head]
        for i in rels:
            e = g.edges[i]
            if e.source == node:
                role, child = e.label, e.target
            else:
                role, child = e.label + "-of", e.source
            parts.append(f"{role} {self._emit(child, depth + 1)}")
        if self.indent is None:
            return "(" + " ".join(parts) + ")"
        pad = "\n" + " " * (self.indent * (depth + 1))
        return "(" + pad.join(parts) + ")"


def serialize(g: AmrSubgraph, indent: int | None = None) -> str:
    """Deterministic text for a valid graph; ``parse`` round-trips it."""
    return _Serializer(g, indent)._emit(g.root, 0)
