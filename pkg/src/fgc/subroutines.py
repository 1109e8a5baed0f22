"""Pluggable connectivity subroutines, exact oracles and the cut LP.

2-ECSS:
  ARBORESCENCE_2X  min-cost pair of arc-disjoint arborescences in the
                   bidirected graph (factor 2), solved through its integral
                   rooted-connectivity LP
  MST_PLUS_AUG     MST plus a WTAP augmentation (heuristic)
  EXACT            branch and bound
WTAP:
  PRIMAL_DUAL_2X   up-link reduction to a min-cost arborescence (factor 2)
  EXACT            branch and bound
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import linprog

from .graph import (
    LabeledMultigraph,
    bridges,
    edge_connectivity,
    is_connected,
    minimum_spanning_tree,
)
from .model import FgcInstance, Solution, is_feasible_ids
from .simplex import Infeasible, simplex_solve


class NotTwoEdgeConnected(ValueError):
    pass


class NoFeasibleAugmentation(ValueError):
    pass


class TooLarge(ValueError):
    pass


class TwoEcssMethod(enum.Enum):
    ARBORESCENCE_2X = "arb2x"
    MST_PLUS_AUG = "mstaug"
    EXACT = "exact"


class WtapMethod(enum.Enum):
    PRIMAL_DUAL_2X = "pd2x"
    EXACT = "exact"


class KecssMethod(enum.Enum):
    EXACT = "exact"
    DEGREE_PRUNING = "prune"


@dataclass(frozen=True)
class SubroutineRatios:
    lam: Fraction = Fraction(2)
    tau: Fraction = Fraction(2)
    theta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.lam < 1 or self.tau < 1 or any(t < 1 for t in self.theta.values()):
            raise ValueError("approximation ratios are at least 1")


@dataclass(frozen=True)
class Methods:
    two_ecss: TwoEcssMethod = TwoEcssMethod.ARBORESCENCE_2X
    wtap: WtapMethod = WtapMethod.PRIMAL_DUAL_2X
    kecss: KecssMethod = KecssMethod.EXACT

    @property
    def ratios(self) -> SubroutineRatios:
        """Certified ratios; the MST+augmentation heuristic has none, 3 is
        what MST plus a 2-approximate augmentation guarantees."""
        lam = {TwoEcssMethod.EXACT: 1, TwoEcssMethod.ARBORESCENCE_2X: 2, TwoEcssMethod.MST_PLUS_AUG: 3}
        tau = {WtapMethod.EXACT: 1, WtapMethod.PRIMAL_DUAL_2X: 2}
        return SubroutineRatios(Fraction(lam[self.two_ecss]), Fraction(tau[self.wtap]))


EXACT_METHODS = Methods(TwoEcssMethod.EXACT, WtapMethod.EXACT, KecssMethod.EXACT)
APPROX_METHODS = Methods()


# ---------------------------------------------------------------- oracles

def _sort_key(graph, ids):
    return (graph.weight(ids), len(ids), tuple(sorted(ids)))


def min_monotone_subset(graph: LabeledMultigraph, candidates: Iterable[int],
                        feasible: Callable[[set], bool], fixed: Iterable[int] = (),
                        incumbent: Iterable[int] | None = None, min_degree: int = 0,
                        safety_matters: bool = True) -> set | None:
    """Cheapest subset X of `candidates` with feasible(fixed | X), for a
    predicate that is closed under adding edges.

    Depth-first include/exclude search, heaviest edges decided first and
    exclusion tried first. Ties go to fewer edges, then the
    lexicographically smallest id set.

    Pruning: every vertex needs `min_degree` chosen edges in any feasible
    set, which gives a lower bound; and among interchangeable parallel
    copies (same ends and weight, plus same safety when the predicate cares)
    a copy is only taken when all lower-id copies are, which never loses
    the lexicographically smallest optimum.
    """
    fixed = set(fixed)
    cands = sorted(set(candidates) - fixed, key=lambda i: (-graph.edge(i).weight, i))
    if not feasible(fixed | set(cands)):
        return None
    w = {i: graph.edge(i).weight for i in cands}
    if incumbent is None:
        # reverse delete: drop heavy edges while the rest stays feasible
        incumbent = set(cands)
        for i in cands:
            if feasible(fixed | (incumbent - {i})):
                incumbent.discard(i)
    best = [None, None]
    inc = set(incumbent) - fixed
    if feasible(fixed | inc):
        best = [_sort_key(graph, inc), inc]

    def copy_key(e):
        key = (min(e.u, e.v), max(e.u, e.v), e.weight)
        return key + (e.safety,) if safety_matters else key

    position = {e: k for k, e in enumerate(cands)}
    lower_copies: dict[int, list[int]] = {}
    seen: dict[tuple, list[int]] = {}
    for i in sorted(cands):
        key = copy_key(graph.edge(i))
        lower_copies[i] = list(seen.get(key, []))
        seen.setdefault(key, []).append(i)

    n = graph.vertex_count
    base_degree = [0] * n
    for i in fixed:
        e = graph.edge(i)
        base_degree[e.u] += 1
        base_degree[e.v] += 1
    incident = [[] for _ in range(n)]
    for i in sorted(cands, key=lambda i: (w[i], i)):
        e = graph.edge(i)
        incident[e.u].append(i)
        incident[e.v].append(i)

    def lower_bound(chosen: set, alive: set, weight: Fraction) -> Fraction:
        if not min_degree:
            return weight
        extra = Fraction(0)
        for x in range(n):
            need = min_degree - base_degree[x] - sum(1 for i in incident[x] if i in chosen)
            if need <= 0:
                continue
            for i in incident[x]:
                if need == 0:
                    break
                if i in alive and i not in chosen:
                    extra += w[i]
                    need -= 1
        return weight + extra / 2

    def dfs(k: int, chosen: set, weight: Fraction, alive: set):
        if best[0] is not None:
            if (weight, len(chosen)) > best[0][:2] or lower_bound(chosen, alive, weight) > best[0][0]:
                return
        if k == len(cands):
            key = _sort_key(graph, chosen)
            if best[0] is None or key < best[0]:
                best[0], best[1] = key, set(chosen)
            return
        e = cands[k]
        alive.discard(e)
        if feasible(fixed | chosen | alive):
            dfs(k + 1, chosen, weight, alive)
        alive.add(e)
        if all(c in chosen for c in lower_copies[e] if position[c] < k):
            chosen.add(e)
            dfs(k + 1, chosen, weight + w[e], alive)
            chosen.discard(e)

    dfs(0, set(), Fraction(0), set(cands))
    return best[1]


def _two_edge_connected(graph: LabeledMultigraph) -> Callable[[set], bool]:
    def ok(ids: set) -> bool:
        return is_connected(graph, ids) and not bridges(graph, ids)
    return ok


def exact_fgc(instance: FgcInstance, budget: int = 20) -> tuple[Solution, Fraction]:
    g = instance.graph
    if g.m > budget:
        raise TooLarge(f"{g.m} edges exceed the oracle budget of {budget}")
    best = min_monotone_subset(g, g.edge_ids, lambda ids: is_feasible_ids(g, ids, instance.k),
                               min_degree=1 if g.vertex_count > 1 else 0)
    if best is None:
        raise Infeasible("no feasible edge set")
    sol = instance.solution(best)
    return sol, sol.weight


def exact_two_ecss(graph: LabeledMultigraph, budget: int = 40, incumbent=None) -> tuple[set, Fraction]:
    if graph.vertex_count <= 1:
        return set(), Fraction(0)
    if graph.m > budget:
        raise TooLarge(f"{graph.m} edges exceed the oracle budget of {budget}")
    best = min_monotone_subset(graph, graph.edge_ids, _two_edge_connected(graph), incumbent=incumbent,
                               min_degree=2, safety_matters=False)
    if best is None:
        raise NotTwoEdgeConnected("graph is not 2-edge-connected")
    return best, graph.weight(best)


def exact_wtap(graph: LabeledMultigraph, tree: Iterable[int], budget: int = 40,
               incumbent=None) -> tuple[set, Fraction]:
    tree = set(tree)
    links = [i for i in graph.edge_ids if i not in tree]
    if len(links) > budget:
        raise TooLarge(f"{len(links)} links exceed the oracle budget of {budget}")
    best = min_monotone_subset(graph, links, _two_edge_connected(graph), fixed=tree, incumbent=incumbent,
                               min_degree=2, safety_matters=False)
    if best is None:
        raise NoFeasibleAugmentation("some tree edge is crossed by no link")
    return best, graph.weight(best)


def exact_kecss(graph: LabeledMultigraph, k: int, budget: int = 40) -> tuple[set, Fraction]:
    if graph.vertex_count <= 1:
        return set(), Fraction(0)
    if graph.m > budget:
        raise TooLarge(f"{graph.m} edges exceed the oracle budget of {budget}")
    best = min_monotone_subset(graph, graph.edge_ids, lambda ids: edge_connectivity(graph, ids, cap=k) >= k,
                               min_degree=k, safety_matters=False)
    if best is None:
        raise Infeasible(f"graph is not {k}-edge-connected")
    return best, graph.weight(best)


# ---------------------------------------------------------------- arborescences

def min_arborescence(n: int, arcs: list[tuple], root: int) -> list[int]:
    """Chu-Liu/Edmonds. arcs are (tail, head, weight); returns indices of
    the chosen arcs, one entering every vertex except the root."""
    live = [i for i, (u, v, _) in enumerate(arcs) if u != v and v != root]
    return _edmonds(n, [(arcs[i][0], arcs[i][1], arcs[i][2], i) for i in live], root)


def _edmonds(n: int, arcs: list[tuple], root: int) -> list[int]:
    best_in: dict[int, tuple] = {}
    for a in arcs:
        u, v, w, tag = a
        if v == root or u == v:
            continue
        cur = best_in.get(v)
        if cur is None or (w, tag) < (cur[2], cur[3]):
            best_in[v] = a
    for v in range(n):
        if v != root and v not in best_in:
            raise NoFeasibleAugmentation(f"vertex {v} cannot be reached from the root")
    # look for a cycle among the chosen in-arcs
    color = [0] * n
    cycle = None
    for s in range(n):
        path = []
        x = s
        while x != root and color[x] == 0:
            color[x] = 1
            path.append(x)
            x = best_in[x][0]
        if x != root and color[x] == 1:
            cycle = path[path.index(x):]
        for y in path:
            color[y] = 2
        if cycle:
            break
    if cycle is None:
        return [best_in[v][3] for v in range(n) if v != root]
    on_cycle = set(cycle)
    label = {}
    for x in range(n):
        if x not in on_cycle:
            label[x] = len(label)
    c = len(label)
    reduced = []
    origin = {}
    for u, v, w, tag in arcs:
        if u in on_cycle and v in on_cycle:
            continue
        nu = c if u in on_cycle else label[u]
        nv = c if v in on_cycle else label[v]
        nw = w - best_in[v][2] if v in on_cycle else w
        reduced.append((nu, nv, nw, tag))
        origin[tag] = (u, v)
    chosen = _edmonds(c + 1, reduced, label[root])
    entry_head = next(origin[t][1] for t in chosen if origin[t][1] in on_cycle)
    chosen += [best_in[x][3] for x in cycle if x != entry_head]
    return chosen


# ---------------------------------------------------------------- WTAP

def _root_tree(graph: LabeledMultigraph, tree: set, root: int = 0):
    adj = [[] for _ in range(graph.vertex_count)]
    for i in tree:
        e = graph.edge(i)
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    parent = [-1] * graph.vertex_count
    depth = [0] * graph.vertex_count
    seen = {root}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                parent[y] = x
                depth[y] = depth[x] + 1
                queue.append(y)
    if len(seen) != graph.vertex_count:
        raise ValueError("tree does not span the graph")
    return parent, depth


def _lca(parent, depth, a, b):
    while depth[a] > depth[b]:
        a = parent[a]
    while depth[b] > depth[a]:
        b = parent[b]
    while a != b:
        a, b = parent[a], parent[b]
    return a


def _wtap_up_links(graph: LabeledMultigraph, tree: set) -> set:
    """Each link uv with lowest common ancestor a becomes the up-links u->a
    and v->a at the link's cost. With tree edges reversed at cost 0, a
    min-cost arborescence out of the root picks up-links covering every
    tree edge, and any covering link set yields up-links of at most twice
    its cost."""
    n = graph.vertex_count
    parent, depth = _root_tree(graph, tree)
    arcs = []
    owner = []
    for x in range(n):
        if parent[x] >= 0:
            arcs.append((x, parent[x], Fraction(0)))
            owner.append(None)
    for e in graph.edges:
        if e.id in tree:
            continue
        a = _lca(parent, depth, e.u, e.v)
        for end in (e.u, e.v):
            if end != a:
                arcs.append((a, end, e.weight))
                owner.append(e.id)
    chosen = min_arborescence(n, arcs, 0)
    return {owner[i] for i in chosen if owner[i] is not None}


def wtap_approx(graph: LabeledMultigraph, tree: Iterable[int], method=WtapMethod.PRIMAL_DUAL_2X) -> set:
    tree = set(tree)
    if graph.vertex_count <= 1:
        return set()
    uncovered = bridges(graph) & tree
    if uncovered:
        raise NoFeasibleAugmentation(f"tree edges {sorted(uncovered)} are crossed by no link")
    method = WtapMethod(method)
    if method is WtapMethod.EXACT:
        return exact_wtap(graph, tree)[0]
    links = _wtap_up_links(graph, tree)
    return _prune(graph, links, fixed=tree)


def _prune(graph: LabeledMultigraph, ids: set, fixed: set = frozenset()) -> set:
    """Drop edges, heaviest first, while the union stays 2-edge-connected."""
    ok = _two_edge_connected(graph)
    ids = set(ids)
    for i in sorted(ids, key=lambda i: (-graph.edge(i).weight, i)):
        if ok((ids - {i}) | set(fixed)):
            ids.discard(i)
    return ids


# ---------------------------------------------------------------- 2-ECSS

def _float_max_flow(n, cap, s, t):
    """Edmonds-Karp on a dense capacity matrix; returns (value, source side)."""
    res = cap.copy()
    flow = 0.0
    while True:
        prev = [-1] * n
        prev[s] = s
        queue = deque([s])
        while queue and prev[t] < 0:
            x = queue.popleft()
            for y in np.nonzero(res[x] > 1e-12)[0]:
                if prev[y] < 0:
                    prev[y] = x
                    queue.append(y)
        if prev[t] < 0:
            side = {x for x in range(n) if prev[x] >= 0}
            return flow, side
        push = np.inf
        y = t
        while y != s:
            push = min(push, res[prev[y], y])
            y = prev[y]
        y = t
        while y != s:
            res[prev[y], y] -= push
            res[y, prev[y]] += push
            y = prev[y]
        flow += push


def two_arborescences(graph: LabeledMultigraph, root: int = 0) -> set:
    """Cheapest arc set of the bidirected graph holding two arc-disjoint
    arborescences out of `root`, returned as underlying edge ids.

    The LP  min c.x, x(in(S)) >= 2 for all S not containing the root,
    0 <= x <= 1  has integral vertices, so its basic optimum is the answer;
    cut rows are generated by max-flow separation.
    """
    n = graph.vertex_count
    arcs = []
    for e in graph.edges:
        arcs.append((e.u, e.v, e.id))
        arcs.append((e.v, e.u, e.id))
    cost = np.array([float(graph.edge(a[2]).weight) for a in arcs])
    cuts = [frozenset([v]) for v in range(n) if v != root]
    seen = set(cuts)
    while True:
        A = np.array([[-1.0 if (u not in S and v in S) else 0.0 for u, v, _ in arcs] for S in cuts])
        res = linprog(cost, A_ub=A, b_ub=-2.0 * np.ones(len(cuts)), bounds=(0, 1), method="highs-ds")
        if res.status != 0:
            raise NotTwoEdgeConnected("bidirected graph has no two disjoint arborescences")
        x = res.x
        cap = np.zeros((n, n))
        for (u, v, _), val in zip(arcs, x):
            cap[u, v] += val
        added = False
        for t in range(n):
            if t == root:
                continue
            value, side = _float_max_flow(n, cap, root, t)
            if value < 2 - 1e-7:
                S = frozenset(range(n)) - frozenset(side)
                if S not in seen:
                    seen.add(S)
                    cuts.append(S)
                    added = True
        if not added:
            break
    picked = [i for i, val in enumerate(x) if val > 0.5]
    if np.max(np.abs(x - np.round(x))) > 1e-6:
        raise RuntimeError("arborescence LP returned a fractional vertex")
    cap = np.zeros((n, n))
    for i in picked:
        u, v, _ = arcs[i]
        cap[u, v] += 1
    for t in range(n):
        if t != root and _float_max_flow(n, cap, root, t)[0] < 2 - 1e-9:
            raise RuntimeError("rounded arborescence pair is not 2-connected from the root")
    return {arcs[i][2] for i in picked}


def two_ecss_approx(graph: LabeledMultigraph, method=TwoEcssMethod.ARBORESCENCE_2X) -> set:
    if graph.vertex_count <= 1:
        return set()
    if not is_connected(graph) or bridges(graph):
        raise NotTwoEdgeConnected("input graph is not 2-edge-connected")
    method = TwoEcssMethod(method)
    if method is TwoEcssMethod.EXACT:
        return exact_two_ecss(graph)[0]
    if method is TwoEcssMethod.ARBORESCENCE_2X:
        return _prune(graph, two_arborescences(graph))
    tree = set(minimum_spanning_tree(graph).edge_ids)
    return tree | wtap_approx(graph, tree, WtapMethod.PRIMAL_DUAL_2X)


def kecss_approx(graph: LabeledMultigraph, k: int, method=KecssMethod.EXACT) -> set:
    """A k-edge-connected spanning subgraph (unweighted use)."""
    if graph.vertex_count <= 1:
        return set()
    if edge_connectivity(graph, cap=k) < k:
        raise Infeasible(f"graph is not {k}-edge-connected")
    method = KecssMethod(method)
    if method is KecssMethod.EXACT:
        return exact_kecss(graph, k)[0]
    ids = set(graph.edge_ids)
    changed = True
    while changed:
        changed = False
        deg = [0] * graph.vertex_count
        for i in ids:
            e = graph.edge(i)
            deg[e.u] += 1
            deg[e.v] += 1
        # try edges between high-degree vertices first
        for i in sorted(ids, key=lambda i: (-(deg[graph.edge(i).u] + deg[graph.edge(i).v]), i)):
            if edge_connectivity(graph, ids - {i}, cap=k) >= k:
                ids.discard(i)
                changed = True
                break
    return ids


# ---------------------------------------------------------------- cut LP / ILP

MAX_CUT_VERTICES = 16


def cut_rows(instance: FgcInstance):
    """(mask, coefficients) per cut. The side always contains vertex 0 and
    is encoded by the bits of the other vertices it contains."""
    n = instance.n
    if n > MAX_CUT_VERTICES:
        raise TooLarge(f"cut enumeration is capped at {MAX_CUT_VERTICES} vertices")
    edges = instance.graph.edges
    for t in range(2 ** (n - 1) - 1):
        side = 1 | (t << 1)
        row = []
        for e in edges:
            crosses = ((side >> e.u) & 1) != ((side >> e.v) & 1)
            row.append((2 if e.safe else 1) if crosses else 0)
        yield t, row


def lp_relaxation(instance: FgcInstance, exact: bool = True) -> tuple[list, Fraction]:
    rows = [row for _, row in cut_rows(instance)]
    cost = [e.weight for e in instance.graph.edges]
    res = simplex_solve(cost, rows, [">="] * len(rows), [2] * len(rows),
                        upper=[1] * len(cost), exact=exact)
    return res.x, res.value


def _lp_number(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d == 1:
        digits = 0
        y = x
        while y.denominator != 1:
            y *= 10
            digits += 1
        return f"{float(x):.{digits}f}"
    return repr(float(x))


def export_ilp(instance: FgcInstance, path) -> None:
    edges = instance.graph.edges
    lines = ["\\ FGC cut formulation", "Minimize"]
    terms = " + ".join(f"{_lp_number(e.weight)} x{e.id}" for e in edges)
    lines.append(f" obj: {terms}")
    lines.append("Subject To")
    for t, row in cut_rows(instance):
        parts = [f"{c} x{e.id}" for c, e in zip(row, edges) if c]
        lines.append(f" c{t}: {' + '.join(parts) if parts else '0 x0'} >= 2")
    lines.append("Binaries")
    lines.append(" " + " ".join(f"x{e.id}" for e in edges))
    lines.append("End")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
