"""Rooted AMR subgraphs with an ordered list of free variables.

An :class:`AmrSubgraph` is the semantic value of every constituent in a
derivation: a connected, labeled, directed acyclic graph with a designated
root plus an ordered list of free-variable nodes still waiting to be filled.
Free-variable order is meaningful (position 1 is consumed next), and so is
edge insertion order (it drives deterministic serialization and tie-breaking
when several shared-edge candidates exist).

Two primitive operations underlie every combinator: :func:`substitute`
(identify a free variable with the root of another subgraph) and
:func:`merge_nodes` (identify two nodes of one graph).  Both are implemented
on top of :class:`Workspace`, a mutable scratch structure with union-find
over merged nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

#: Role label of an underspecified edge, resolved later by a shared-edge match.
UNDERSPECIFIED = ":?"


class UnificationError(Exception):
    """Raised when two constant nodes with different concepts are merged."""


@dataclass(frozen=True)
class Node:
    id: int
    concept: str | None = None  # None marks a free variable

    @property
    def is_free(self) -> bool:
        return self.concept is None


@dataclass(frozen=True)
class Edge:
    source: int
    label: str
    target: int


@dataclass(frozen=True)
class AmrSubgraph:
    """Immutable graph value; all operations return new instances."""

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]  # insertion order preserved; triples are a set
    root: int
    fv: tuple[int, ...]  # 1-based positions: fv[0] is consumed next

    @cached_property
    def _by_id(self) -> dict[int, Node]:
        return {n.id: n for n in self.nodes}

    def node(self, node_id: int) -> Node:
        return self._by_id[node_id]

    def is_free(self, node_id: int) -> bool:
        return self._by_id[node_id].concept is None

    def concept(self, node_id: int) -> str | None:
        return self._by_id[node_id].concept

    def incident(self, node_id: int) -> list[Edge]:
        return [e for e in self.edges if node_id in (e.source, e.target)]

    def outgoing(self, node_id: int) -> list[Edge]:
        return [e for e in self.edges if e.source == node_id]

    def incoming(self, node_id: int) -> list[Edge]:
        return [e for e in self.edges if e.target == node_id]

    def fv_index(self, node_id: int) -> int:
        """1-based position of a free variable in the fv list."""
        return self.fv.index(node_id) + 1

    def constant_count(self) -> int:
        return sum(1 for n in self.nodes if not n.is_free)


def single_node(concept: str | None) -> AmrSubgraph:
    """Graph holding one node; a free variable when concept is None."""
    fv = (0,) if concept is None else ()
    return AmrSubgraph((Node(0, concept),), (), 0, fv)


class Workspace:
    """Mutable scratch for unioning graphs and merging their nodes.

    Node ids are workspace-local.  Merges are recorded in a union-find whose
    representative is the smaller id, which keeps results deterministic.
    ``freeze`` resolves all merges, collapses duplicate edge triples (first
    occurrence wins), renumbers nodes compactly and builds the immutable
    result.
    """

    def __init__(self) -> None:
        self._concepts: dict[int, str | None] = {}
        self._parent: dict[int, int] = {}
        self._edges: list[tuple[int, str, int]] = []
        self._next = 0

    def add_node(self, concept: str | None) -> int:
        i = self._next
        self._next += 1
        self._concepts[i] = concept
        self._parent[i] = i
        return i

    def add_edge(self, source: int, label: str, target: int) -> int:
        self._edges.append((source, label, target))
        return len(self._edges) - 1

    def add_graph(self, g: AmrSubgraph) -> tuple[dict[int, int], int]:
        """Copy a graph in; returns (old-id -> new-id map, edge offset)."""
        offset = len(self._edges)
        mapping = {n.id: self.add_node(n.concept) for n in g.nodes}
        for e in g.edges:
            self.add_edge(mapping[e.source], e.label, mapping[e.target])
        return mapping, offset

    def find(self, i: int) -> int:
        while self._parent[i] != i:
            self._parent[i] = self._parent[self._parent[i]]
            i = self._parent[i]
        return i

    def concept_of(self, i: int) -> str | None:
        return self._concepts[self.find(i)]

    def merge(self, a: int, b: int) -> int:
        """Identify two nodes; constant beats free variable.

        Raises :class:`UnificationError` if both are constants with
        different concepts.
        """
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        ca, cb = self._concepts[ra], self._concepts[rb]
        if ca is not None and cb is not None and ca != cb:
            raise UnificationError(f"cannot merge constants {ca!r} and {cb!r}")
        keep, drop = (ra, rb) if ra < rb else (rb, ra)
        self._parent[drop] = keep
        self._concepts[keep] = ca if ca is not None else cb
        return keep

    def set_edge_label(self, edge_index: int, label: str) -> None:
        s, _, t = self._edges[edge_index]
        self._edges[edge_index] = (s, label, t)

    def freeze(self, root: int, fv_candidates: list[int]) -> tuple[AmrSubgraph, dict[int, int]]:
        """Build the result graph.

        ``fv_candidates`` is an ordered slot sequence of workspace ids;
        entries that resolved to constants are dropped and a merged variable
        keeps only its first slot.  Returns the graph and the map from
        union-find representatives to final node ids.
        """
        relabel: dict[int, int] = {}
        nodes: list[Node] = []
        for i in range(self._next):
            r = self.find(i)
            if r not in relabel:
                relabel[r] = len(nodes)
                nodes.append(Node(relabel[r], self._concepts[r]))
        edges: list[Edge] = []
        seen: set[tuple[int, str, int]] = set()
        for s, label, t in self._edges:
            triple = (relabel[self.find(s)], label, relabel[self.find(t)])
            if triple not in seen:
                seen.add(triple)
                edges.append(Edge(*triple))
        fv: list[int] = []
        for x in fv_candidates:
            r = self.find(x)
            if self._concepts[r] is None and relabel[r] not in fv:
                fv.append(relabel[r])
        graph = AmrSubgraph(tuple(nodes), tuple(edges), relabel[self.find(root)], tuple(fv))
        return graph, relabel


@dataclass(frozen=True)
class Substitution:
    """Result of :func:`substitute`; remaining fv sublists let the caller
    decide the final ordering (graph.fv defaults to g_remaining + h_remaining).
    """

    graph: AmrSubgraph
    g_remaining: tuple[int, ...]
    h_remaining: tuple[int, ...]


def substitute(g: AmrSubgraph, pos: int, h: AmrSubgraph) -> Substitution:
    """Fill g's free variable at 1-based position ``pos`` with h's root.

    The two nodes are identified; the merged node is a constant iff h's root
    was one.  If h is rooted at a free variable the merged node stays free
    and keeps h's fv-list position.
    """
    if not 1 <= pos <= len(g.fv):
        raise ValueError(f"fv position {pos} out of range 1..{len(g.fv)}")
    ws = Workspace()
    gmap, _ = ws.add_graph(g)
    hmap, _ = ws.add_graph(h)
    ws.merge(gmap[g.fv[pos - 1]], hmap[h.root])
    g_rem = [gmap[x] for i, x in enumerate(g.fv) if i != pos - 1]
    h_rem = [hmap[x] for x in h.fv]
    graph, relabel = ws.freeze(gmap[g.root], g_rem + h_rem)
    final = lambda ids: tuple(
        relabel[ws.find(x)] for x in ids if ws.concept_of(x) is None
    )
    return Substitution(graph, final(g_rem), final(h_rem))


def merge_nodes(g: AmrSubgraph, n1: int, n2: int) -> AmrSubgraph:
    """Identify two nodes of one graph; n1's fv position survives."""
    if n1 == n2:
        raise ValueError("merge_nodes needs two distinct nodes")
    ws = Workspace()
    mapping, _ = ws.add_graph(g)
    ws.merge(mapping[n1], mapping[n2])
    candidates = [mapping[x] for x in g.fv if x != n2]
    graph, _ = ws.freeze(mapping[g.root], candidates)
    return graph


def with_fv_order(g: AmrSubgraph, fv: tuple[int, ...]) -> AmrSubgraph:
    """Same graph with its free variables reordered."""
    if sorted(fv) != sorted(g.fv):
        raise ValueError("new fv order must be a permutation of the old")
    return AmrSubgraph(g.nodes, g.edges, g.root, tuple(fv))


def validate(g: AmrSubgraph) -> list[str]:
    """All invariant violations, empty when the graph is well-formed."""
    problems: list[str] = []
    ids = {n.id for n in g.nodes}
    if len(ids) != len(g.nodes):
        problems.append("duplicate node ids")
    if g.root not in ids:
        problems.append(f"root {g.root} is not a node")
    seen_triples: set[tuple[int, str, int]] = set()
    for e in g.edges:
        if e.source not in ids or e.target not in ids:
            problems.append(f"edge {e} has a dangling endpoint")
        if e.label.endswith("-of"):
            problems.append(f"edge {e} stores an inverse label")
        triple = (e.source, e.label, e.target)
        if triple in seen_triples:
            problems.append(f"duplicate edge triple {triple}")
        seen_triples.add(triple)
    free = {n.id for n in g.nodes if n.is_free}
    listed = list(g.fv)
    if len(set(listed)) != len(listed):
        problems.append("fv list contains repeats")
    for x in listed:
        if x not in free:
            problems.append(f"fv entry {x} is not a free-variable node")
    for x in free - set(listed):
        problems.append(f"free variable {x} missing from fv list")
    # connectivity over undirected links
    if g.root in ids and ids:
        adj: dict[int, set[int]] = {i: set() for i in ids}
        for e in g.edges:
            if e.source in ids and e.target in ids:
                adj[e.source].add(e.target)
                adj[e.target].add(e.source)
        seen = {g.root}
        stack = [g.root]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if seen != ids:
            missing = sorted(ids - seen)
            problems.append(f"graph is disconnected; unreachable nodes {missing}")
    # acyclicity in stored direction
    state: dict[int, int] = {}

    def dfs(u: int) -> bool:
        state[u] = 1
        for e in g.edges:
            if e.source != u or e.target not in ids:
                continue
            v = e.target
            if state.get(v) == 1:
                return False
            if state.get(v) is None and not dfs(v):
                return False
        state[u] = 2
        return True

    for start in sorted(ids):
        if state.get(start) is None and not dfs(start):
            problems.append("graph has a directed cycle")
            break
    return problems


def _signature(g: AmrSubgraph) -> tuple:
    concepts = sorted(n.concept or "" for n in g.nodes)
    labels = sorted(e.label for e in g.edges)
    return (len(g.nodes), len(g.fv), concepts, labels)


def iso_map(g1: AmrSubgraph, g2: AmrSubgraph) -> dict[int, int] | None:
    """Bijection witnessing isomorphism, or None.

    Concepts, edges, the root, and fv positions must all be preserved; free
    variables can only map to free variables at the same fv index.
    """
    if _signature(g1) != _signature(g2):
        return None
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def bind(a: int, b: int) -> bool:
        if a in mapping:
            return mapping[a] == b
        if b in used:
            return False
        if (g1.concept(a) is None) != (g2.concept(b) is None):
            return False
        if g1.concept(a) != g2.concept(b):
            return False
        mapping[a] = b
        used.add(b)
        return True

    for a, b in zip(g1.fv, g2.fv):
        if not bind(a, b):
            return None
    if not bind(g1.root, g2.root):
        return None

    remaining = [n.id for n in g1.nodes if n.id not in mapping]
    candidates = {
        u.id: [v.id for v in g2.nodes if v.concept == u.concept and v.id not in used]
        for u in g1.nodes
    }
    e2 = {(e.source, e.label, e.target) for e in g2.edges}

    def consistent(u: int) -> bool:
        # every edge between already-mapped nodes must exist on the other side
        for e in g1.edges:
            if u not in (e.source, e.target):
                continue
            if e.source in mapping and e.target in mapping:
                if (mapping[e.source], e.label, mapping[e.target]) not in e2:
                    return False
        return True

    def search(i: int) -> bool:
        if i == len(remaining):
            image = {(mapping[e.source], e.label, mapping[e.target]) for e in g1.edges}
            return image == e2
        u = remaining[i]
        for v in candidates[u]:
            if v in used:
                continue
            mapping[u] = v
            used.add(v)
            if consistent(u) and search(i + 1):
                return True
            del mapping[u]
            used.discard(v)
        return False

    if not search(0):
        return None
    return dict(mapping)


def iso_equal(g1: AmrSubgraph, g2: AmrSubgraph) -> bool:
    return iso_map(g1, g2) is not None
