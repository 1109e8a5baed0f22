"""Multigraph primitives with exact rational weights.

Everything here is pure: graphs are immutable and every operation returns
new objects.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence


class DisconnectedGraph(ValueError):
    pass


class Safety(enum.Enum):
    SAFE = "S"
    UNSAFE = "U"


SAFE = Safety.SAFE
UNSAFE = Safety.UNSAFE


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    weight: Fraction
    safety: Safety

    @property
    def safe(self) -> bool:
        return self.safety is SAFE

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


class UnionFind:
    __slots__ = ("parent", "size")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass(frozen=True)
class LabeledMultigraph:
    """Loopless multigraph. Edge ids are unique but need not be dense:
    contracted graphs keep the ids of the edges they inherit."""

    vertex_count: int
    edges: tuple[Edge, ...]
    _by_id: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError("negative vertex count")
        by_id = {}
        for e in self.edges:
            if e.u == e.v:
                raise ValueError(f"edge {e.id} is a loop")
            if not (0 <= e.u < self.vertex_count and 0 <= e.v < self.vertex_count):
                raise ValueError(f"edge {e.id} has an endpoint out of range")
            if e.weight < 0:
                raise ValueError(f"edge {e.id} has negative weight")
            if e.id in by_id:
                raise ValueError(f"duplicate edge id {e.id}")
            if not isinstance(e.weight, Fraction):
                raise TypeError("weights must be Fractions")
            by_id[e.id] = e
        object.__setattr__(self, "_by_id", by_id)

    @classmethod
    def build(cls, n: int, triples: Iterable[tuple]) -> "LabeledMultigraph":
        """Build from (u, v, weight, safety) tuples with dense ids."""
        edges = []
        for i, (u, v, w, s) in enumerate(triples):
            if isinstance(s, str):
                s = Safety(s)
            edges.append(Edge(i, u, v, Fraction(w), s))
        return cls(n, tuple(edges))

    def edge(self, eid: int) -> Edge:
        return self._by_id[eid]

    def __contains__(self, eid: int) -> bool:
        return eid in self._by_id

    @property
    def edge_ids(self) -> list[int]:
        return [e.id for e in self.edges]

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight(self, ids: Iterable[int]) -> Fraction:
        return sum((self._by_id[i].weight for i in ids), Fraction(0))

    def subgraph_view(self, ids: Iterable[int]) -> "LabeledMultigraph":
        """Same vertices, only the given edges (ids kept)."""
        return LabeledMultigraph(self.vertex_count, tuple(self.subgraph_edges(ids)))

    def subgraph_edges(self, ids: Iterable[int] | None) -> list[Edge]:
        if ids is None:
            return list(self.edges)
        return [self._by_id[i] for i in sorted(set(ids))]


@dataclass(frozen=True)
class SpanningTree:
    graph: LabeledMultigraph
    edge_ids: frozenset

    def __post_init__(self):
        n = self.graph.vertex_count
        if n and len(self.edge_ids) != n - 1:
            raise ValueError("a spanning tree has exactly n-1 edges")
        if not is_connected(self.graph, self.edge_ids):
            raise ValueError("edge set does not span the graph")

    def path(self, a: int, b: int) -> list[int]:
        """Edge ids on the tree path from a to b."""
        return tree_path(self.graph, self.edge_ids, a, b)

    def crosses_cut(self, removed: int, eid: int) -> bool:
        """Does edge `eid` reconnect the two sides of tree - removed?"""
        e = self.graph.edge(eid)
        return removed in self.path(e.u, e.v)


@dataclass(frozen=True)
class ContractionMap:
    vertex_map: tuple[int, ...]
    surviving: frozenset

    def __call__(self, x: int) -> int:
        return self.vertex_map[x]


def mst_key(weight_fn: Callable[[Edge], Fraction], tiebreak: Callable[[Edge], tuple] | None = None):
    if tiebreak is None:
        return lambda e: (weight_fn(e), e.id)
    return lambda e: (weight_fn(e), tiebreak(e))


def minimum_spanning_tree(graph: LabeledMultigraph, weight_fn=None, tiebreak=None,
                          subgraph: Iterable[int] | None = None) -> SpanningTree:
    """Kruskal with sort key (weight_fn(e), tiebreak(e)).

    tiebreak defaults to the edge id and must be a total order.
    """
    weight_fn = weight_fn or (lambda e: e.weight)
    key = mst_key(weight_fn, tiebreak)
    uf = UnionFind(graph.vertex_count)
    chosen = []
    for e in sorted(graph.subgraph_edges(subgraph), key=key):
        if uf.union(e.u, e.v):
            chosen.append(e.id)
    if graph.vertex_count and len(chosen) != graph.vertex_count - 1:
        raise DisconnectedGraph("graph is not connected")
    return SpanningTree(graph, frozenset(chosen))


def _adjacency(graph: LabeledMultigraph, ids: Iterable[int] | None):
    adj = [[] for _ in range(graph.vertex_count)]
    for e in graph.subgraph_edges(ids):
        adj[e.u].append((e.v, e.id))
        adj[e.v].append((e.u, e.id))
    return adj


def components(graph: LabeledMultigraph, ids: Iterable[int] | None = None) -> list[list[int]]:
    uf = UnionFind(graph.vertex_count)
    for e in graph.subgraph_edges(ids):
        uf.union(e.u, e.v)
    groups: dict[int, list[int]] = {}
    for x in range(graph.vertex_count):
        groups.setdefault(uf.find(x), []).append(x)
    return sorted(groups.values())


def is_connected(graph: LabeledMultigraph, ids: Iterable[int] | None = None) -> bool:
    return len(components(graph, ids)) <= 1


def tree_path(graph: LabeledMultigraph, tree_ids: Iterable[int], a: int, b: int) -> list[int]:
    adj = _adjacency(graph, tree_ids)
    prev = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            break
        for y, eid in adj[x]:
            if y not in prev:
                prev[y] = (x, eid)
                queue.append(y)
    if b not in prev:
        raise DisconnectedGraph(f"{a} and {b} are not connected")
    out = []
    while prev[b] is not None:
        b, eid = prev[b]
        out.append(eid)
    return out[::-1]


def bridges(graph: LabeledMultigraph, subgraph: Iterable[int] | None = None) -> set[int]:
    """Edges of the subgraph whose removal disconnects their component.

    Iterative lowpoint DFS; parallel edges are distinguished by id so a
    doubled edge is never a bridge.
    """
    adj = _adjacency(graph, subgraph)
    n = graph.vertex_count
    disc = [-1] * n
    low = [0] * n
    out = set()
    clock = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = clock
        clock += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            x, via, it = stack[-1]
            advanced = False
            for y, eid in it:
                if eid == via:
                    continue
                if disc[y] == -1:
                    disc[y] = low[y] = clock
                    clock += 1
                    stack.append((y, eid, iter(adj[y])))
                    advanced = True
                    break
                low[x] = min(low[x], disc[y])
            if advanced:
                continue
            stack.pop()
            if stack:
                parent = stack[-1][0]
                low[parent] = min(low[parent], low[x])
                if low[x] > disc[parent]:
                    out.add(via)
    return out


def _unit_max_flow(n: int, arcs: Sequence[tuple[int, int]], s: int, t: int, cap: int,
                   want_cut: bool = False):
    """Max number of edge-disjoint s-t paths in an undirected multigraph,
    stopping early once `cap` paths are found."""
    # each undirected edge becomes a pair of opposite arcs with capacity 1
    head, nxt, res = [], [], []
    first = [-1] * n
    def add(a, b):
        head.append(b); res.append(1); nxt.append(first[a]); first[a] = len(head) - 1
    for a, b in arcs:
        add(a, b)
        add(b, a)
    flow = 0
    while flow < cap:
        prev = [-1] * n
        prev[s] = -2
        queue = deque([s])
        while queue and prev[t] == -1:
            x = queue.popleft()
            k = first[x]
            while k != -1:
                y = head[k]
                if res[k] > 0 and prev[y] == -1:
                    prev[y] = k
                    queue.append(y)
                k = nxt[k]
        if prev[t] == -1:
            break
        y = t
        while y != s:
            k = prev[y]
            res[k] -= 1
            res[k ^ 1] += 1
            y = head[k ^ 1]
        flow += 1
    if not want_cut:
        return flow
    seen = {s}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        k = first[x]
        while k != -1:
            y = head[k]
            if res[k] > 0 and y not in seen:
                seen.add(y)
                queue.append(y)
            k = nxt[k]
    return flow, seen


def min_cut(graph: LabeledMultigraph, subgraph: Iterable[int] | None = None) -> tuple[int, set[int]]:
    """A minimum edge cut of (V, subgraph) as (size, one side)."""
    n = graph.vertex_count
    es = graph.subgraph_edges(subgraph)
    if n <= 1:
        return len(es), set()
    comps = components(graph, [e.id for e in es])
    if len(comps) > 1:
        return 0, set(comps[0])
    arcs = [(e.u, e.v) for e in es]
    best, side = len(arcs) + 1, set()
    for t in range(1, n):
        value, reach = _unit_max_flow(n, arcs, 0, t, best, want_cut=True)
        if value < best:
            best, side = value, reach
    return best, side


def edge_connectivity(graph: LabeledMultigraph, subgraph: Iterable[int] | None = None,
                      cap: int | None = None) -> int:
    """Global edge connectivity of (V, subgraph).

    Max-flow from vertex 0 to every other vertex. `cap` lets callers stop
    once they know the answer is at least that large.
    """
    n = graph.vertex_count
    if n <= 1:
        # a single vertex is trivially connected; report "infinite" as cap or m
        return cap if cap is not None else len(graph.subgraph_edges(subgraph))
    es = graph.subgraph_edges(subgraph)
    if not is_connected(graph, [e.id for e in es]):
        return 0
    arcs = [(e.u, e.v) for e in es]
    best = len(arcs) if cap is None else cap
    for t in range(1, n):
        best = min(best, _unit_max_flow(n, arcs, 0, t, best))
        if best == 0:
            break
    return best


def contract(graph: LabeledMultigraph, edge_ids: Iterable[int]) -> tuple[LabeledMultigraph, ContractionMap]:
    """Contract the given edges. Vertices are renumbered by first original
    vertex in each component; loops disappear, parallels stay."""
    edge_ids = set(edge_ids)
    uf = UnionFind(graph.vertex_count)
    for eid in edge_ids:
        e = graph.edge(eid)
        uf.union(e.u, e.v)
    label: dict[int, int] = {}
    vmap = []
    for x in range(graph.vertex_count):
        r = uf.find(x)
        if r not in label:
            label[r] = len(label)
        vmap.append(label[r])
    kept = []
    for e in graph.edges:
        a, b = vmap[e.u], vmap[e.v]
        if a != b:
            kept.append(Edge(e.id, a, b, e.weight, e.safety))
    cmap = ContractionMap(tuple(vmap), frozenset(e.id for e in kept))
    return LabeledMultigraph(len(label), tuple(kept)), cmap
