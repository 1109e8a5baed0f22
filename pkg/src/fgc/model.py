"""FGC instances, solutions, feasibility, and generators."""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .graph import (
    SAFE,
    UNSAFE,
    Edge,
    LabeledMultigraph,
    Safety,
    bridges,
    components,
    contract,
    edge_connectivity,
    is_connected,
    min_cut,
)


class InfeasibleInstance(ValueError):
    pass


class InfeasibleSolution(ValueError):
    pass


class InvalidParameters(ValueError):
    pass


class InstanceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Solution:
    edge_ids: frozenset
    weight: Fraction

    @classmethod
    def of(cls, graph: LabeledMultigraph, ids: Iterable[int]) -> "Solution":
        ids = frozenset(ids)
        for i in ids:
            if i not in graph:
                raise ValueError(f"unknown edge id {i}")
        return cls(ids, graph.weight(ids))

    def __len__(self):
        return len(self.edge_ids)

    def sorted_ids(self) -> list[int]:
        return sorted(self.edge_ids)


@dataclass(frozen=True)
class Violation:
    """A cut that breaks feasibility: one side of it and the edges crossing."""

    side: frozenset
    crossing: tuple[int, ...]

    def describe(self, graph: LabeledMultigraph) -> str:
        parts = []
        for eid in self.crossing:
            e = graph.edge(eid)
            parts.append(f"{eid}({e.u}-{e.v},{e.safety.value})")
        side = " ".join(map(str, sorted(self.side)))
        return f"cut side {{{side}}} crossed only by [{', '.join(parts)}]"


def violated_cut(graph: LabeledMultigraph, ids: Iterable[int], k: int = 1) -> Violation | None:
    """None if `ids` is feasible for k-FGC, else a witness cut."""
    ids = set(ids)
    comps = components(graph, ids)
    if len(comps) > 1:
        return Violation(frozenset(comps[0]), ())
    if k == 1:
        for eid in sorted(bridges(graph, ids)):
            e = graph.edge(eid)
            if not e.safe:
                side = components(graph, ids - {eid})
                side = next(c for c in side if e.u in c)
                return Violation(frozenset(side), (eid,))
        return None
    safe = [i for i in ids if graph.edge(i).safe]
    small, cmap = contract(graph.subgraph_view(ids), safe)
    if small.vertex_count <= 1:
        return None
    value, side = min_cut(small)
    if value >= k + 1:
        return None
    orig_side = frozenset(x for x in range(graph.vertex_count) if cmap(x) in side)
    crossing = tuple(sorted(i for i in ids
                            if (graph.edge(i).u in orig_side) != (graph.edge(i).v in orig_side)))
    return Violation(orig_side, crossing)


def is_feasible_ids(graph: LabeledMultigraph, ids: Iterable[int], k: int = 1) -> bool:
    ids = set(ids)
    if not is_connected(graph, ids):
        return False
    if k == 1:
        return all(graph.edge(b).safe for b in bridges(graph, ids))
    safe = [i for i in ids if graph.edge(i).safe]
    small, _ = contract(graph.subgraph_view(ids), safe)
    if small.vertex_count <= 1:
        return True
    return edge_connectivity(small, cap=k + 1) >= k + 1


@dataclass(frozen=True)
class FgcInstance:
    graph: LabeledMultigraph
    k: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParameters("robustness k must be positive")
        if not is_connected(self.graph):
            raise InfeasibleInstance("graph is not connected")
        bad = violated_cut(self.graph, self.graph.edge_ids, self.k)
        if bad is not None:
            raise InfeasibleInstance("instance has no feasible solution: " + bad.describe(self.graph))

    @property
    def n(self) -> int:
        return self.graph.vertex_count

    @property
    def m(self) -> int:
        return self.graph.m

    def edge(self, eid: int) -> Edge:
        return self.graph.edge(eid)

    def solution(self, ids: Iterable[int]) -> Solution:
        return Solution.of(self.graph, ids)

    def to_text(self) -> str:
        lines = [f"fgc {self.n} {self.m} {self.k}"]
        for e in self.graph.edges:
            lines.append(f"{e.u} {e.v} {format_rational(e.weight)} {e.safety.value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FgcInstance":
        rows = [ln.strip() for ln in text.splitlines()]
        rows = [ln for ln in rows if ln and not ln.startswith("#")]
        if not rows:
            raise InstanceFormatError("empty instance")
        head = rows[0].split()
        if len(head) != 4 or head[0] != "fgc":
            raise InstanceFormatError("first line must be 'fgc <n> <m> <k>'")
        try:
            n, m, k = (int(x) for x in head[1:])
        except ValueError as exc:
            raise InstanceFormatError(str(exc)) from None
        if len(rows) - 1 != m:
            raise InstanceFormatError(f"header says {m} edges, found {len(rows) - 1}")
        triples = []
        for ln in rows[1:]:
            parts = ln.split()
            if len(parts) != 4 or parts[3] not in ("S", "U"):
                raise InstanceFormatError(f"bad edge line: {ln!r}")
            try:
                triples.append((int(parts[0]), int(parts[1]), parse_rational(parts[2]), parts[3]))
            except (ValueError, ZeroDivisionError):
                raise InstanceFormatError(f"bad edge line: {ln!r}") from None
        try:
            graph = LabeledMultigraph.build(n, triples)
        except (ValueError, TypeError) as exc:
            raise InstanceFormatError(str(exc)) from None
        return cls(graph, k)


def parse_rational(text: str) -> Fraction:
    if "/" in text:
        p, q = text.split("/")
        return Fraction(int(p), int(q))
    return Fraction(int(text))


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def read_instance(path) -> FgcInstance:
    with open(path) as fh:
        return FgcInstance.from_text(fh.read())


def write_instance(instance: FgcInstance, path) -> None:
    with open(path, "w") as fh:
        fh.write(instance.to_text())


def parse_solution(text: str) -> list[int]:
    out = []
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0]
        out.extend(int(tok) for tok in ln.split())
    return out


def format_solution(ids: Iterable[int]) -> str:
    return " ".join(str(i) for i in sorted(ids))


def is_feasible(instance: FgcInstance, solution) -> bool:
    ids = solution.edge_ids if isinstance(solution, Solution) else solution
    return is_feasible_ids(instance.graph, ids, instance.k)


def augment_parallel_unsafe(instance: FgcInstance) -> tuple[FgcInstance, dict[int, int]]:
    """Give every safe edge an unsafe parallel copy of the same weight.

    Existing copies are reused one-to-one, so running this twice adds
    nothing the second time.
    """
    g = instance.graph
    spare: dict[tuple, int] = {}
    for e in g.edges:
        if not e.safe:
            key = (min(e.u, e.v), max(e.u, e.v), e.weight)
            spare[key] = spare.get(key, 0) + 1
    edges = list(g.edges)
    next_id = max(g.edge_ids, default=-1) + 1
    twins: dict[int, int] = {}
    for e in g.edges:
        if not e.safe:
            continue
        key = (min(e.u, e.v), max(e.u, e.v), e.weight)
        if spare.get(key, 0) > 0:
            spare[key] -= 1
            continue
        edges.append(Edge(next_id, e.u, e.v, e.weight, UNSAFE))
        twins[next_id] = e.id
        next_id += 1
    if not twins:
        return instance, {}
    return FgcInstance(LabeledMultigraph(g.vertex_count, tuple(edges)), instance.k), twins


def is_augmented(instance: FgcInstance) -> bool:
    return not augment_parallel_unsafe(instance)[1]


@dataclass(frozen=True)
class SolutionDecomposition:
    components: tuple[frozenset, ...]
    cut_safe_edges: frozenset
    delta: Fraction


def decompose(instance: FgcInstance, solution) -> SolutionDecomposition:
    """Split a feasible k=1 solution into its 2-edge-connected pieces and
    the safe bridges joining them."""
    ids = set(solution.edge_ids if isinstance(solution, Solution) else solution)
    g = instance.graph
    if not is_feasible_ids(g, ids, 1):
        raise InfeasibleSolution(violated_cut(g, ids, 1).describe(g))
    cut = bridges(g, ids)
    comps = tuple(frozenset(c) for c in components(g, ids - cut))
    total = g.weight(ids)
    delta = g.weight(cut) / total if total > 0 else Fraction(0)
    return SolutionDecomposition(comps, frozenset(cut), delta)


class InstanceKind(enum.Enum):
    RANDOM = "random"
    MST_CASE = "mst"
    TWOECSS_CASE = "2ecss"
    WTAP_CASE = "wtap"


def _coin(rng: random.Random, p: Fraction) -> bool:
    return rng.randrange(p.denominator) < p.numerator


def _random_tree(rng: random.Random, n: int) -> list[tuple[int, int]]:
    order = list(range(n))
    rng.shuffle(order)
    return [(order[rng.randrange(i)], order[i]) for i in range(1, n)]


def _random_pair(rng: random.Random, n: int) -> tuple[int, int]:
    u, v = rng.sample(range(n), 2)
    return u, v


def _covering_links(rng: random.Random, n: int, tree, count: int):
    """`count` links such that every tree edge lies on a cycle, or None.

    While some tree edge is uncovered the next link joins a leaf behind it
    to a leaf on the other side; leftover links are uniform."""
    g = LabeledMultigraph.build(n, [(u, v, 0, UNSAFE) for u, v in tree])
    degree = [0] * n
    for u, v in tree:
        degree[u] += 1
        degree[v] += 1
    leaves = [x for x in range(n) if degree[x] == 1]
    links: list[tuple[int, int]] = []
    for _ in range(count):
        h = LabeledMultigraph.build(n, [(u, v, 0, UNSAFE) for u, v in tree + links])
        open_edges = sorted(b for b in bridges(h) if b < len(tree))
        if not open_edges:
            links.append(_random_pair(rng, n))
            continue
        b = g.edge(rng.choice(open_edges))
        side = next(c for c in components(g, set(g.edge_ids) - {b.id}) if b.u in c)
        a = [x for x in leaves if x in side] or sorted(side)
        z = [x for x in leaves if x not in side] or [x for x in range(n) if x not in side]
        links.append((rng.choice(a), rng.choice(z)))
    h = LabeledMultigraph.build(n, [(u, v, 0, UNSAFE) for u, v in tree + links])
    return links if not bridges(h) else None


def generate_instance(kind, n: int, m: int, weight_bound: int = 1,
                      safe_fraction=Fraction(1, 2), seed: int = 0, k: int = 1) -> FgcInstance:
    """Random instances for the four special cases. Same arguments give
    the same instance."""
    kind = InstanceKind(kind) if not isinstance(kind, InstanceKind) else kind
    safe_fraction = Fraction(safe_fraction)
    if n < 2 or m < n - 1:
        raise InvalidParameters("need n >= 2 and m >= n - 1")
    if weight_bound < 1 or not (0 <= safe_fraction <= 1):
        raise InvalidParameters("weight bound must be >= 1 and safe fraction in [0, 1]")
    rng = random.Random(f"{kind.value}:{n}:{m}:{weight_bound}:{safe_fraction}:{seed}")

    def weight():
        return rng.randint(1, weight_bound)

    if kind is InstanceKind.WTAP_CASE:
        if m < n:
            raise InvalidParameters("WTAP instances need at least one link")
        for _ in range(200):
            tree = _random_tree(rng, n)
            links = _covering_links(rng, n, tree, m - n + 1)
            if links is None:
                continue
            triples = [(u, v, 0, UNSAFE) for u, v in tree]
            triples += [(u, v, weight(), SAFE if _coin(rng, safe_fraction) else UNSAFE) for u, v in links]
            return FgcInstance(LabeledMultigraph.build(n, triples), k)
        raise InvalidParameters("could not draw links covering the tree")

    if kind is InstanceKind.TWOECSS_CASE:
        if m < n:
            raise InvalidParameters("a 2-edge-connected graph needs m >= n")
        order = list(range(n))
        rng.shuffle(order)
        pairs = [(order[i], order[(i + 1) % n]) for i in range(n)]
        pairs += [_random_pair(rng, n) for _ in range(m - n)]
        g = LabeledMultigraph.build(n, [(u, v, weight(), UNSAFE) for u, v in pairs])
        return FgcInstance(g, k)

    pairs = _random_tree(rng, n) + [_random_pair(rng, n) for _ in range(m - n + 1)]
    rng.shuffle(pairs)
    triples = []
    for u, v in pairs:
        w = weight()
        s = SAFE if kind is InstanceKind.MST_CASE or _coin(rng, safe_fraction) else UNSAFE
        triples.append((u, v, w, s))
    g = LabeledMultigraph.build(n, triples)
    # unsafe bridges would make the instance infeasible; relabel them safe
    fix = bridges(g)
    if any(not g.edge(b).safe for b in fix):
        triples = [(u, v, w, SAFE if i in fix else s) for i, (u, v, w, s) in enumerate(triples)]
        g = LabeledMultigraph.build(n, triples)
    if k > 1:
        return _repair_k(g, k, rng)
    return FgcInstance(g, k)


def _repair_k(g: LabeledMultigraph, k: int, rng: random.Random) -> FgcInstance:
    # flip unsafe edges on small cuts to safe until the graph is k-feasible
    while True:
        bad = violated_cut(g, g.edge_ids, k)
        if bad is None:
            return FgcInstance(g, k)
        unsafe = [i for i in bad.crossing if not g.edge(i).safe]
        flip = rng.choice(unsafe)
        g = LabeledMultigraph(g.vertex_count, tuple(
            Edge(e.id, e.u, e.v, e.weight, SAFE) if e.id == flip else e for e in g.edges))


def removal_check(graph: LabeledMultigraph, ids: Iterable[int], k: int = 1) -> bool:
    """Feasibility straight from the definition: every set of at most k
    unsafe edges can fail and the rest stays connected. Exponential."""
    ids = set(ids)
    if not is_connected(graph, ids):
        return False
    unsafe = sorted(i for i in ids if not graph.edge(i).safe)
    for r in range(1, k + 1):
        for fail in combinations(unsafe, r):
            if not is_connected(graph, ids - set(fail)):
                return False
    return True
