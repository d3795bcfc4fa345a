"""Polarized weighted multigraphs.

A graph carries a non-negative integer genus on every vertex and an exact
positive rational length on every edge.  Loops and parallel edges are
allowed.  Instances are immutable and validated on construction.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    DisconnectedGraph,
    EmptyVertexSet,
    GenusTooSmall,
    InputError,
    NonPositiveLength,
    NotPolarized,
)
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class Vertex:
    id: str
    genus: int = 0


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, x: str) -> str:
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class PolarizedGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if not self.vertices:
            raise EmptyVertexSet("graph has no vertices")
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate vertex id")
        eids = [e.id for e in self.edges]
        if len(set(eids)) != len(eids):
            raise InputError("duplicate edge id")
        known = set(ids)
        for v in self.vertices:
            if isinstance(v.genus, bool) or not isinstance(v.genus, int) or v.genus < 0:
                raise InputError(f"vertex {v.id}: genus must be a non-negative integer")
        for e in self.edges:
            if e.u not in known or e.v not in known:
                raise InputError(f"edge {e.id}: unknown endpoint")
            if not isinstance(e.length, Fraction):
                raise InputError(f"edge {e.id}: length must be rational")
            if e.length <= 0:
                raise NonPositiveLength(f"edge {e.id}: length {e.length} is not positive")
        if len(self.component_of(self.vertices[0].id)) != len(self.vertices):
            raise DisconnectedGraph("graph is not connected")

    # construction ---------------------------------------------------------

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable) -> "PolarizedGraph":
        """Build from ``(id, genus)`` pairs and ``(id, u, v, length)`` tuples."""
        vs = tuple(Vertex(str(i), int(q)) for i, q in vertices)
        es = tuple(Edge(str(i), str(u), str(v), parse_rational(l)) for i, u, v, l in edges)
        return cls(vs, es)

    # basic data -----------------------------------------------------------

    @cached_property
    def index(self) -> dict[str, int]:
        return {v.id: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_by_id(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def q(self) -> dict[str, int]:
        return {v.id: v.genus for v in self.vertices}

    @cached_property
    def incidence(self) -> dict[str, list[Edge]]:
        """Half-edges at each vertex; a loop is listed twice."""
        inc: dict[str, list[Edge]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            inc[e.u].append(e)
            inc[e.v].append(e)
        return inc

    def valency(self, p: str) -> int:
        return len(self.incidence[p])

    @property
    def b1(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @cached_property
    def genus(self) -> int:
        return self.b1 + sum(v.genus for v in self.vertices)

    @cached_property
    def canonical_divisor(self) -> dict[str, int]:
        return {v.id: self.valency(v.id) - 2 + 2 * v.genus for v in self.vertices}

    @property
    def is_stable(self) -> bool:
        return all(k > 0 for k in self.canonical_divisor.values())

    @property
    def is_polarized(self) -> bool:
        return all(k >= 0 for k in self.canonical_divisor.values())

    @property
    def total_length(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    def component_of(self, start: str, skip: frozenset = frozenset()) -> set[str]:
        """Vertices reachable from ``start`` without using edges in ``skip``."""
        adj = defaultdict(list)
        for e in self.edges:
            if e.id not in skip:
                adj[e.u].append(e.v)
                adj[e.v].append(e.u)
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    # derived graphs -------------------------------------------------------

    def with_lengths(self, lengths: Mapping[str, object]) -> "PolarizedGraph":
        es = tuple(
            Edge(e.id, e.u, e.v, parse_rational(lengths[e.id]) if e.id in lengths else e.length)
            for e in self.edges
        )
        return PolarizedGraph(self.vertices, es)

    def scaled(self, c: Fraction) -> "PolarizedGraph":
        return PolarizedGraph(self.vertices, tuple(Edge(e.id, e.u, e.v, e.length * c) for e in self.edges))

    def with_genera(self, q: Mapping[str, int]) -> "PolarizedGraph":
        return PolarizedGraph(tuple(Vertex(v.id, int(q.get(v.id, v.genus))) for v in self.vertices), self.edges)

    def without_edge(self, eid: str) -> "PolarizedGraph":
        return PolarizedGraph(self.vertices, tuple(e for e in self.edges if e.id != eid))

    def subdivide(self, eid: str, t: Fraction, new_id: str | None = None) -> "PolarizedGraph":
        """Insert a genus-0 vertex on edge ``eid`` at distance ``t`` from its ``u`` end."""
        e = self.edge_by_id[eid]
        if not 0 < t < e.length:
            raise InputError("subdivision point must be interior")
        x = new_id or f"{eid}@{format_rational(t)}"
        es = []
        for f in self.edges:
            if f.id == eid:
                es.append(Edge(f"{eid}#a", e.u, x, t))
                es.append(Edge(f"{eid}#b", x, e.v, e.length - t))
            else:
                es.append(f)
        return PolarizedGraph(self.vertices + (Vertex(x, 0),), tuple(es))

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": v.id, "genus": v.genus} for v in self.vertices],
            "edges": [
                {"id": e.id, "u": e.u, "v": e.v, "length": format_rational(e.length)} for e in self.edges
            ],
        }

    # structure ------------------------------------------------------------

    @cached_property
    def bridges(self) -> frozenset[str]:
        return frozenset(b.edge_ids[0] for b in self.blocks.blocks if b.kind == "bridge")

    @cached_property
    def blocks(self) -> "BlockDecomposition":
        return _blocks(self)


def validate(raw: Mapping) -> PolarizedGraph:
    """Parse the JSON graph description into a validated graph."""
    try:
        verts = raw["vertices"]
        edges = raw.get("edges", [])
        vs = tuple(Vertex(str(v["id"]), v.get("genus", 0)) for v in verts)
        es = tuple(Edge(str(e["id"]), str(e["u"]), str(e["v"]), parse_rational(e["length"])) for e in edges)
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed graph description: {exc}") from exc
    return PolarizedGraph(vs, es)


def genus(g: PolarizedGraph) -> int:
    return g.genus


def canonical_divisor(g: PolarizedGraph) -> dict[str, int]:
    return dict(g.canonical_divisor)


def is_stable(g: PolarizedGraph) -> bool:
    return g.is_stable


# blocks ---------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    kind: str  # "loop", "bridge" or "two-connected"
    graph: PolarizedGraph
    edge_ids: tuple[str, ...]


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple[Block, ...]
    cut_vertices: tuple[str, ...]
    # bipartite block-cut tree: (block index, cut vertex id)
    tree_edges: tuple[tuple[int, str], ...] = field(default=())


def _edge_components(g: PolarizedGraph) -> list[list[str]]:
    """Biconnected components as lists of edge ids (each loop on its own).

    Iterative Tarjan with an edge stack; parallel edges are distinguished by
    id, so a pair of parallel edges forms a single component.
    """
    comps: list[list[str]] = []
    adj: dict[str, list[Edge]] = {v.id: [] for v in g.vertices}
    for e in g.edges:
        if e.is_loop:
            comps.append([e.id])
        else:
            adj[e.u].append(e)
            adj[e.v].append(e)
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    counter = 0
    for root in (v.id for v in g.vertices):
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        estack: list[str] = []
        # frames: (vertex, parent edge id, iterator position)
        stack = [(root, None, 0)]
        while stack:
            x, pe, i = stack[-1]
            if i < len(adj[x]):
                stack[-1] = (x, pe, i + 1)
                e = adj[x][i]
                if e.id == pe:
                    continue
                y = e.other(x)
                if y not in disc:
                    disc[y] = low[y] = counter
                    counter += 1
                    estack.append(e.id)
                    stack.append((y, e.id, 0))
                elif disc[y] < disc[x]:
                    estack.append(e.id)
                    low[x] = min(low[x], disc[y])
            else:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[x])
                    if low[x] >= disc[p]:
                        comp = []
                        while True:
                            eid = estack.pop()
                            comp.append(eid)
                            if eid == pe:
                                break
                        comps.append(comp)
    return comps


def _hanging_genus(g: PolarizedGraph, block_edges: set[str], block_vertices: set[str]) -> dict[str, int]:
    """Induced genus on block vertices: b1 plus total genus of the part hanging there."""
    rest = [e for e in g.edges if e.id not in block_edges]
    owner: dict[str, str] = {}
    adj = defaultdict(list)
    for e in rest:
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    for p in block_vertices:
        owner[p] = p
        stack = [p]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in owner:
                    owner[y] = p
                    stack.append(y)
    nv = defaultdict(int)
    ne = defaultdict(int)
    qs = defaultdict(int)
    for x, p in owner.items():
        nv[p] += 1
        qs[p] += g.q[x]
    for e in rest:
        ne[owner[e.u]] += 1
    return {p: ne[p] - nv[p] + 1 + qs[p] for p in block_vertices}


def _blocks(g: PolarizedGraph) -> BlockDecomposition:
    comps = _edge_components(g)
    order = {e.id: i for i, e in enumerate(g.edges)}
    comps = sorted((sorted(c, key=order.__getitem__) for c in comps), key=lambda c: order[c[0]])
    blocks = []
    membership = defaultdict(list)
    for bi, comp in enumerate(comps):
        es = [g.edge_by_id[eid] for eid in comp]
        vset = {x for e in es for x in (e.u, e.v)}
        if len(es) == 1 and es[0].is_loop:
            kind = "loop"
        elif len(es) == 1:
            kind = "bridge"
        else:
            kind = "two-connected"
        qh = _hanging_genus(g, set(comp), vset)
        vs = tuple(Vertex(v.id, qh[v.id]) for v in g.vertices if v.id in vset)
        blocks.append(Block(kind, PolarizedGraph(vs, tuple(es)), tuple(comp)))
        for x in vset:
            membership[x].append(bi)
    cuts = tuple(v.id for v in g.vertices if len(membership[v.id]) >= 2)
    tree = tuple((bi, c) for c in cuts for bi in membership[c])
    return BlockDecomposition(tuple(blocks), cuts, tree)


def blocks(g: PolarizedGraph) -> BlockDecomposition:
    return g.blocks


def is_two_connected(g: PolarizedGraph) -> bool:
    bs = g.blocks.blocks
    return len(bs) == 1 and bs[0].kind in ("loop", "two-connected")


# edge profile ---------------------------------------------------------------


@dataclass(frozen=True)
class EdgeProfile:
    delta: Fraction
    delta0: Fraction
    deltaH: dict[int, Fraction]


def bridge_type(g: PolarizedGraph, eid: str) -> int:
    e = g.edge_by_id[eid]
    side = g.component_of(e.u, frozenset([eid]))
    ne = sum(1 for f in g.edges if f.id != eid and f.u in side)
    h = ne - len(side) + 1 + sum(g.q[x] for x in side)
    return min(h, g.genus - h)


def edge_profile(g: PolarizedGraph) -> EdgeProfile:
    delta0 = Fraction(0)
    deltaH: dict[int, Fraction] = {}
    bridges = g.bridges
    for e in g.edges:
        if e.id in bridges:
            h = bridge_type(g, e.id)
            deltaH[h] = deltaH.get(h, Fraction(0)) + e.length
        else:
            delta0 += e.length
    return EdgeProfile(g.total_length, delta0, dict(sorted(deltaH.items())))


# contraction ----------------------------------------------------------------


@dataclass(frozen=True)
class Contraction:
    graph: PolarizedGraph
    mapping: dict[str, str]


def contract(g: PolarizedGraph, edge_ids: Iterable[str]) -> Contraction:
    """Contract the given edges.

    Each resulting vertex carries the genus of the subgraph it replaces,
    so that the total genus is preserved.
    """
    gone = set(edge_ids)
    parent = {v.id: v.id for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        if e.id in gone:
            a, b = find(e.u), find(e.v)
            if a != b:
                parent[a] = b
    classes: dict[str, list[str]] = defaultdict(list)
    for v in g.vertices:
        classes[find(v.id)].append(v.id)
    name = {r: "+".join(sorted(members)) for r, members in classes.items()}
    ncontracted = defaultdict(int)
    for e in g.edges:
        if e.id in gone:
            ncontracted[find(e.u)] += 1
    new_vertices = []
    for v in g.vertices:
        r = find(v.id)
        if classes[r][0] == v.id:
            q = sum(g.q[x] for x in classes[r]) + ncontracted[r] - len(classes[r]) + 1
            new_vertices.append(Vertex(name[r], q))
    mapping = {v.id: name[find(v.id)] for v in g.vertices}
    new_edges = tuple(
        Edge(e.id, mapping[e.u], mapping[e.v], e.length) for e in g.edges if e.id not in gone
    )
    return Contraction(PolarizedGraph(tuple(new_vertices), new_edges), mapping)


def contract_all_but(g: PolarizedGraph, eid: str) -> Contraction:
    if eid not in g.edge_by_id:
        raise InputError(f"unknown edge {eid}")
    return contract(g, [e.id for e in g.edges if e.id != eid])


# minimal model --------------------------------------------------------------


def minimal_model(g: PolarizedGraph) -> PolarizedGraph:
    """Suppress every genus-0 vertex of valency 2, merging its two edges."""
    if g.genus <= 1:
        raise GenusTooSmall(f"minimal model needs genus >= 2, got {g.genus}")
    if not g.is_polarized:
        raise NotPolarized("canonical divisor has a negative value")
    cur = g
    while True:
        target = next(
            (v.id for v in cur.vertices if v.genus == 0 and cur.valency(v.id) == 2), None
        )
        if target is None:
            return cur
        a, b = sorted(cur.incidence[target], key=lambda e: cur.edges.index(e))
        # a loop at a valency-2 vertex would make the whole graph a circle of genus 1
        w1, w2 = a.other(target), b.other(target)
        merged = Edge(f"{a.id}+{b.id}", w1, w2, a.length + b.length)
        es = []
        for e in cur.edges:
            if e.id == a.id:
                es.append(merged)
            elif e.id != b.id:
                es.append(e)
        cur = PolarizedGraph(tuple(v for v in cur.vertices if v.id != target), tuple(es))

