"""Scaled spanning trees, threshold values and exchange bijections.

Safe edge weights are multiplied by a factor alpha in [0, 1]; unsafe
weights stay put. A safe edge e has an upper threshold: some alpha-MST
contains e exactly when alpha <= threshold(e). An unsafe edge has a lower
threshold (or INFINITY when no alpha in [0, 1] puts it in an MST).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .graph import Edge, LabeledMultigraph, SpanningTree, UnionFind, minimum_spanning_tree

INFINITY = math.inf


class NoBijection(RuntimeError):
    pass


def _graph(obj) -> LabeledMultigraph:
    return obj.graph if hasattr(obj, "graph") and not isinstance(obj, LabeledMultigraph) else obj


def scaled_weight(e: Edge, alpha) -> Fraction:
    return alpha * e.weight if e.safe else e.weight


def order_key(alpha):
    """Total order used by every alpha-MST: scaled weight, safe before
    unsafe, then raw weight, then id.

    The raw weight slot only matters at alpha = 0, where all safe edges tie
    at zero; it makes the 0-MST prefer light safe edges, which is what keeps
    safe-to-safe swaps out of it weight-monotone.
    """
    alpha = Fraction(alpha)
    return lambda e: (scaled_weight(e, alpha), 0 if e.safe else 1, e.weight, e.id)


def alpha_mst(instance, alpha) -> SpanningTree:
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    g = _graph(instance)
    key = order_key(alpha)
    return minimum_spanning_tree(g, weight_fn=lambda e: key(e)[0], tiebreak=lambda e: key(e)[1:])


def in_some_alpha_mst(graph: LabeledMultigraph, eid: int, alpha) -> bool:
    """Cycle-property test: e lies in some MST under the scaled weights iff
    its endpoints are not joined by strictly lighter edges."""
    e = graph.edge(eid)
    bound = scaled_weight(e, alpha)
    uf = UnionFind(graph.vertex_count)
    for g in graph.edges:
        if g.id != eid and scaled_weight(g, alpha) < bound:
            uf.union(g.u, g.v)
    return uf.find(e.u) != uf.find(e.v)


@dataclass(frozen=True)
class ThresholdSet:
    values: tuple            # sorted distinct finite thresholds
    attribution: dict = field(compare=False)
    candidates: tuple = ()   # ratios w(f)/w(e) with f an unsafe edge of the 1-MST

    @property
    def pruned(self) -> tuple:
        """Breakpoints in (0, 1]. Zero is always a scaling factor of the
        hybrid anyway, and these are the values the |V|-1 bound counts."""
        return tuple(v for v in self.values if v > 0)

    def scaling_set(self) -> list[Fraction]:
        return sorted(set(self.values) | {Fraction(0), Fraction(1)})

    def __getitem__(self, eid: int):
        return self.attribution[eid]

    def to_text(self) -> str:
        from .model import format_rational
        out = []
        for eid in sorted(self.attribution):
            a = self.attribution[eid]
            out.append(f"{eid}  {'inf' if a == INFINITY else format_rational(a)}")
        return "\n".join(out) + "\n"


def _safe_threshold(g: LabeledMultigraph, e: Edge, unsafe_weights: Sequence[Fraction]) -> Fraction:
    if e.weight == 0:
        return Fraction(1)
    cands = {Fraction(1)}
    cands.update(w / e.weight for w in unsafe_weights if 0 < w < e.weight)
    for c in sorted(cands, reverse=True):
        if in_some_alpha_mst(g, e.id, c):
            return c
    return Fraction(0)


def _unsafe_threshold(g: LabeledMultigraph, f: Edge, safe_weights: Sequence[Fraction]):
    cands = {Fraction(0), Fraction(1)}
    cands.update(f.weight / w for w in safe_weights if w > 0 and f.weight < w)
    for c in sorted(cands):
        if in_some_alpha_mst(g, f.id, c):
            return c
    return INFINITY


def compute_thresholds(instance) -> ThresholdSet:
    """Exact threshold of every edge.

    Membership of a safe edge in some alpha-MST only changes where its
    scaled weight passes an unsafe weight, so it suffices to test alpha at
    the ratios w(f)/w(e); symmetrically for unsafe edges.
    """
    g = _graph(instance)
    unsafe_w = sorted({e.weight for e in g.edges if not e.safe})
    safe_w = sorted({e.weight for e in g.edges if e.safe})
    attribution = {}
    for e in g.edges:
        if e.safe:
            attribution[e.id] = _safe_threshold(g, e, unsafe_w)
        else:
            attribution[e.id] = _unsafe_threshold(g, e, safe_w)
    values = tuple(sorted({a for a in attribution.values() if a != INFINITY}))
    t1 = alpha_mst(g, 1)
    tree_unsafe = {g.edge(i).weight for i in t1.edge_ids if not g.edge(i).safe}
    cands = sorted({w / e.weight for w in tree_unsafe for e in g.edges
                    if e.safe and e.weight > 0 and w <= e.weight})
    return ThresholdSet(values, attribution, tuple(cands))


@dataclass(frozen=True)
class ExchangeBijection:
    source: SpanningTree
    target: SpanningTree
    mapping: dict = field(compare=False)

    def __getitem__(self, eid: int) -> int:
        return self.mapping[eid]

    def problems(self, require_identity: bool = True) -> list[str]:
        out = []
        src, dst = self.source.edge_ids, self.target.edge_ids
        if set(self.mapping) != set(src):
            out.append("mapping is not total on the source tree")
        if set(self.mapping.values()) != set(dst) or len(set(self.mapping.values())) != len(self.mapping):
            out.append("mapping is not a bijection onto the target tree")
        for e, f in self.mapping.items():
            if require_identity and e in dst and f != e:
                out.append(f"shared edge {e} not mapped to itself")
            if f != e and not self.source.crosses_cut(e, f):
                out.append(f"swapping {e} for {f} does not give a spanning tree")
        return out

    def is_valid(self, require_identity: bool = True) -> bool:
        return not self.problems(require_identity)


def monotone_pair(e: Edge, f: Edge, alpha) -> bool:
    """Weight condition for mapping e to f at scaling factor alpha.

    Safe-to-unsafe is checked as alpha*w(e) <= w(f), the form that stays
    meaningful at alpha = 0.
    """
    if e.safe and not f.safe:
        return alpha * e.weight <= f.weight
    if e.safe == f.safe:
        return e.weight <= f.weight
    return e.weight <= alpha * f.weight


def verify_alpha_monotone(bijection: ExchangeBijection, alpha) -> bool:
    g = bijection.source.graph
    return all(monotone_pair(g.edge(e), g.edge(f), Fraction(alpha)) for e, f in bijection.mapping.items())


def _tree_paths(tree: SpanningTree, edges: Iterable[int]) -> dict[int, set]:
    g = tree.graph
    return {f: set(tree.path(g.edge(f).u, g.edge(f).v)) for f in edges}


def _match(left: list, options: dict) -> dict | None:
    """Kuhn's augmenting paths; returns a perfect matching of `left` or None."""
    owner: dict = {}

    def attempt(x, seen):
        for y in options[x]:
            if y in seen:
                continue
            seen.add(y)
            if y not in owner or attempt(owner[y], seen):
                owner[y] = x
                return True
        return False

    for x in left:
        if not attempt(x, set()):
            return None
    return {x: y for y, x in owner.items()}


def exchange_bijection(source: SpanningTree, target: SpanningTree) -> ExchangeBijection:
    src, dst = source.edge_ids, target.edge_ids
    mapping = {e: e for e in src & dst}
    only_src = sorted(src - dst)
    only_dst = sorted(dst - src)
    paths = _tree_paths(source, only_dst)
    options = {e: [f for f in only_dst if e in paths[f]] for e in only_src}
    matched = _match(only_src, options)
    if matched is None:
        raise NoBijection("no exchange bijection between the trees")
    mapping.update(matched)
    return ExchangeBijection(source, target, mapping)


def chain_exchange_bijections(instance, alphas: Sequence, target: SpanningTree,
                              tree_limit: int = 64) -> list[ExchangeBijection]:
    """Bijections from alpha_i-MSTs to `target` that agree on edges the
    consecutive trees share; each is alpha_i-monotone and the identity on
    edges shared with the target.

    The deterministic alpha_i-MSTs are tried first, keeping the previous
    mapping on shared edges and matching only entering edges. Re-mapping
    only the entering edges can leave a kept pair that is no longer a valid
    swap, and for some tie patterns no consistent chain over the
    deterministic trees exists at all. In that case the search also ranges
    over the other alpha_i-MSTs (same scaled weight, different ties).
    """
    alphas = [Fraction(a) for a in alphas]
    if any(b < a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be sorted")
    g = _graph(instance)
    trees = [alpha_mst(g, a) for a in alphas]
    chain = _sweep(g, trees, alphas, target)
    if chain is None:
        chain = _joint_search(g, trees, alphas, target)
    if chain is None:
        options = [[t] + [x for x in all_alpha_msts(g, a, tree_limit) if x.edge_ids != t.edge_ids]
                   for t, a in zip(trees, alphas)]
        found = _search_trees(g, options, alphas, target)
        if found is None:
            raise NoBijection("no consistent chain of exchange bijections")
        trees, chain = found
    return [ExchangeBijection(t, target, m) for t, m in zip(trees, chain)]


def all_alpha_msts(graph: LabeledMultigraph, alpha, limit: int = 64) -> list[SpanningTree]:
    """Every minimum spanning tree under the scaled weights, up to `limit`."""
    alpha = Fraction(alpha)
    groups: dict = {}
    for e in graph.edges:
        groups.setdefault(scaled_weight(e, alpha), []).append(e)
    levels = [groups[w] for w in sorted(groups)]
    out: list[SpanningTree] = []

    def rank_and_bases(uf_parent, edges):
        uf = UnionFind(graph.vertex_count)
        uf.parent = list(uf_parent)
        useful = [e for e in edges if uf.find(e.u) != uf.find(e.v)]
        r = 0
        probe = UnionFind(graph.vertex_count)
        probe.parent = list(uf_parent)
        for e in useful:
            r += probe.union(e.u, e.v)
        for combo in combinations(useful, r):
            trial = UnionFind(graph.vertex_count)
            trial.parent = list(uf_parent)
            if all(trial.union(e.u, e.v) for e in combo):
                yield combo, [trial.find(x) for x in range(graph.vertex_count)]

    def walk(level, parent, chosen):
        if len(out) >= limit:
            return
        if level == len(levels):
            out.append(SpanningTree(graph, frozenset(chosen)))
            return
        for combo, nxt in rank_and_bases(parent, levels[level]):
            walk(level + 1, nxt, chosen + [e.id for e in combo])
            if len(out) >= limit:
                return

    walk(0, list(range(graph.vertex_count)), [])
    return out


def _allowed(g, tree: SpanningTree, paths, alpha, e: int, f: int, target_ids) -> bool:
    if e == f:
        return True
    if e in target_ids or f in tree.edge_ids:
        return False
    return e in paths[f] and monotone_pair(g.edge(e), g.edge(f), alpha)


def _sweep(g, trees, alphas, target):
    tgt = target.edge_ids
    out = []
    prev: dict = {}
    for tree, alpha in zip(trees, alphas):
        paths = _tree_paths(tree, tgt)
        kept = {e: f for e, f in prev.items() if e in tree.edge_ids}
        if any(not _allowed(g, tree, paths, alpha, e, f, tgt) for e, f in kept.items()):
            return None
        fresh = sorted(tree.edge_ids - set(kept))
        free = sorted(tgt - set(kept.values()))
        options = {e: [f for f in free if _allowed(g, tree, paths, alpha, e, f, tgt)] for e in fresh}
        matched = _match(fresh, options)
        if matched is None:
            return None
        prev = {**kept, **matched}
        out.append(prev)
    return out


def _joint_search(g, trees, alphas, target):
    """Backtracking over one image per edge, shared by every tree that
    contains the edge. Returns per-tree mappings or None."""
    tgt = target.edge_ids
    order: list[int] = []
    for t in trees:
        order.extend(sorted(e for e in t.edge_ids if e not in order))
    paths = [_tree_paths(t, tgt) for t in trees]
    where = {e: [i for i, t in enumerate(trees) if e in t.edge_ids] for e in order}
    domain = {}
    for e in order:
        dom = [f for f in sorted(tgt)
               if all(_allowed(g, trees[i], paths[i], alphas[i], e, f, tgt) for i in where[e])]
        if not dom:
            return None
        domain[e] = dom

    assign: dict = {}

    def hall_ok() -> bool:
        for t in trees:
            used = {assign[e] for e in t.edge_ids if e in assign}
            rest = [e for e in t.edge_ids if e not in assign]
            opts = {e: [f for f in domain[e] if f not in used] for e in rest}
            if _match(rest, opts) is None:
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        e = order[k]
        for f in domain[e]:
            if any(assign.get(x) == f for i in where[e] for x in trees[i].edge_ids if x != e):
                continue
            assign[e] = f
            if hall_ok() and search(k + 1):
                return True
            del assign[e]
        return False

    if not hall_ok() or not search(0):
        return None
    return [{e: assign[e] for e in t.edge_ids} for t in trees]


def _search_trees(g, options, alphas, target):
    picked: list[SpanningTree] = []

    def walk(i):
        if i == len(options):
            return _joint_search(g, picked, alphas, target)
        for t in options[i]:
            picked.append(t)
            if _joint_search(g, picked, alphas[: i + 1], target) is not None:
                res = walk(i + 1)
                if res is not None:
                    return res
            picked.pop()
        return None

    chain = walk(0)
    return None if chain is None else (list(picked), chain)


def chain_problems(chain: Sequence[ExchangeBijection], alphas: Sequence) -> list[str]:
    """Every check the chain must pass, as human-readable failures."""
    out = []
    for i, (b, a) in enumerate(zip(chain, alphas)):
        out.extend(f"[{i}] {p}" for p in b.problems())
        if not verify_alpha_monotone(b, a):
            out.append(f"[{i}] not monotone at alpha={a}")
    for i in range(1, len(chain)):
        shared = chain[i - 1].source.edge_ids & chain[i].source.edge_ids
        for e in shared:
            if chain[i - 1].mapping[e] != chain[i].mapping[e]:
                out.append(f"[{i}] edge {e} changes image")
    return out
