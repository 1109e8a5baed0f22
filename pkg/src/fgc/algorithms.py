"""Basic algorithms A, B, C, their threshold-scaled combination, and the
unweighted k-failure algorithm."""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .graph import SpanningTree, UnionFind, contract, edge_connectivity
from .model import (
    FgcInstance,
    InfeasibleSolution,
    InvalidParameters,
    Solution,
    augment_parallel_unsafe,
    is_augmented,
    is_feasible_ids,
    violated_cut,
)
from .simplex import Infeasible
from .subroutines import APPROX_METHODS, KecssMethod, Methods, kecss_approx, two_ecss_approx, wtap_approx
from .thresholds import alpha_mst, compute_thresholds, scaled_weight


def _require_augmented(instance: FgcInstance) -> None:
    if instance.k != 1:
        raise InvalidParameters("algorithms A, B and C handle k = 1 only")
    if not is_augmented(instance):
        raise InvalidParameters("instance needs an unsafe twin for every safe edge")


def _checked(instance: FgcInstance, ids: Iterable[int], name: str) -> Solution:
    ids = set(ids)
    if not is_feasible_ids(instance.graph, ids, instance.k):
        cut = violated_cut(instance.graph, ids, instance.k)
        raise InfeasibleSolution(f"{name} produced an infeasible set: {cut.describe(instance.graph)}")
    return instance.solution(ids)


def _check_alpha(alpha) -> Fraction:
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise InvalidParameters("alpha must lie in [0, 1]")
    return alpha


def _tree_at(instance: FgcInstance, alpha: Fraction, tree) -> SpanningTree:
    """The deterministic alpha-MST, or the caller's tree after checking it is
    also minimum under the scaled weights."""
    best = alpha_mst(instance.graph, alpha)
    if tree is None:
        return best
    g = instance.graph
    if not set(tree.edge_ids) <= set(g.edge_ids):
        raise InvalidParameters("tree uses edges outside the instance")
    scaled = lambda t: sum(scaled_weight(g.edge(i), alpha) for i in t.edge_ids)
    if scaled(tree) != scaled(best):
        raise InvalidParameters(f"tree is not a minimum spanning tree at alpha={alpha}")
    return tree


def algorithm_a(instance: FgcInstance, methods: Methods = APPROX_METHODS) -> Solution:
    """2-ECSS of the augmented graph, minus unsafe edges running parallel to
    a chosen safe edge (such an unsafe edge only ever shares cuts with it)."""
    _require_augmented(instance)
    g = instance.graph
    chosen = two_ecss_approx(g, methods.two_ecss)
    safe_pairs = {frozenset((g.edge(i).u, g.edge(i).v)) for i in chosen if g.edge(i).safe}
    kept = {i for i in chosen
            if g.edge(i).safe or frozenset((g.edge(i).u, g.edge(i).v)) not in safe_pairs}
    return _checked(instance, kept, "algorithm A")


def algorithm_b(instance: FgcInstance, alpha=1, methods: Methods = APPROX_METHODS,
                tree: SpanningTree | None = None) -> Solution:
    """alpha-MST, then cover its unsafe edges by a tree augmentation of the
    graph with the tree's safe edges contracted.

    `tree` replaces the deterministic alpha-MST by another one of equal
    scaled weight.
    """
    _require_augmented(instance)
    alpha = _check_alpha(alpha)
    g = instance.graph
    tree = _tree_at(instance, alpha, tree)
    safe_part = {i for i in tree.edge_ids if g.edge(i).safe}
    shrunk, _ = contract(g, safe_part)
    links = wtap_approx(shrunk, tree.edge_ids - safe_part, methods.wtap)
    return _checked(instance, set(tree.edge_ids) | links, "algorithm B")


def algorithm_c(instance: FgcInstance, alpha=0, methods: Methods = APPROX_METHODS,
                tree: SpanningTree | None = None) -> Solution:
    """Safe edges of the alpha-MST plus a 2-ECSS of the graph with those
    edges contracted. Unsafe tree edges are not kept."""
    _require_augmented(instance)
    alpha = _check_alpha(alpha)
    g = instance.graph
    tree = _tree_at(instance, alpha, tree)
    safe_part = {i for i in tree.edge_ids if g.edge(i).safe}
    shrunk, _ = contract(g, safe_part)
    return _checked(instance, safe_part | two_ecss_approx(shrunk, methods.two_ecss), "algorithm C")


@dataclass(frozen=True)
class Variant:
    name: str
    alpha: Fraction | None
    solution: Solution

    @property
    def weight(self) -> Fraction:
        return self.solution.weight

    @property
    def label(self) -> str:
        return self.name if self.alpha is None else f"{self.name}({self.alpha})"


@dataclass(frozen=True)
class RunReport:
    variants: tuple[Variant, ...]
    chosen: Variant
    seconds: float

    @property
    def solution(self) -> Solution:
        return self.chosen.solution

    @property
    def weight(self) -> Fraction:
        return self.chosen.weight

    def best(self, name: str) -> Variant:
        return min((v for v in self.variants if v.name == name), key=lambda v: v.weight)

    def get(self, name: str, alpha=None) -> Variant:
        alpha = None if alpha is None else Fraction(alpha)
        for v in self.variants:
            if v.name == name and v.alpha == alpha:
                return v
        raise KeyError((name, alpha))


def hybrid(instance: FgcInstance, scaling_set: Iterable | None = None,
           methods: Methods = APPROX_METHODS) -> RunReport:
    """Run A once and B, C at every scaling factor; keep the lightest.

    Without an override the scaling factors are the edge thresholds plus
    0 and 1.
    """
    _require_augmented(instance)
    start = time.perf_counter()
    if scaling_set is None:
        alphas = compute_thresholds(instance).scaling_set()
    else:
        alphas = sorted({_check_alpha(a) for a in scaling_set})
    variants = [Variant("A", None, algorithm_a(instance, methods))]
    variants += [Variant("B", a, algorithm_b(instance, a, methods)) for a in alphas]
    variants += [Variant("C", a, algorithm_c(instance, a, methods)) for a in alphas]
    # first lightest in (name, alpha) order, so ties resolve deterministically
    chosen = min(variants, key=lambda v: v.weight)
    return RunReport(tuple(variants), chosen, time.perf_counter() - start)


ALGORITHMS = {"a": algorithm_a, "b": algorithm_b, "c": algorithm_c}


def solve(instance: FgcInstance, algo: str = "hybrid", alpha=None,
          methods: Methods = APPROX_METHODS) -> Solution:
    """Run an algorithm on any k=1 instance and report the answer in the
    instance's own edge ids (twins added for the run are mapped back)."""
    augmented, twins = augment_parallel_unsafe(instance)
    algo = algo.lower()
    if algo == "hybrid":
        sol = hybrid(augmented, None if alpha is None else [alpha], methods).solution
    elif algo == "a":
        sol = algorithm_a(augmented, methods)
    elif algo in ("b", "c"):
        default = 1 if algo == "b" else 0
        sol = ALGORITHMS[algo](augmented, default if alpha is None else alpha, methods)
    else:
        raise InvalidParameters(f"unknown algorithm {algo!r}")
    ids = {twins.get(i, i) for i in sol.edge_ids}
    return _checked(instance, ids, algo)


# ---------------------------------------------------------------- k failures

def kfgc_size_bound(k: int, theta=1) -> Fraction:
    """Guarantee of the safe-forest algorithm given a theta-approximate
    (k+1)-ECSS routine, as a multiple of OPT."""
    theta = Fraction(theta)
    return theta * Fraction(2 * k + 1, 2 * k + 2) + Fraction(1, k + 1)


def safe_forest(instance: FgcInstance) -> set:
    uf = UnionFind(instance.n)
    return {e.id for e in instance.graph.edges if e.safe and uf.union(e.u, e.v)}


def kfgc_unweighted(instance: FgcInstance, method=KecssMethod.EXACT) -> Solution:
    """Maximal safe forest X plus a (k+1)-edge-connected spanning subgraph
    of G/X."""
    if any(e.weight != 1 for e in instance.graph.edges):
        raise InvalidParameters("all weights must be 1")
    k = instance.k
    forest = safe_forest(instance)
    shrunk, _ = contract(instance.graph, forest)
    if shrunk.vertex_count > 1 and edge_connectivity(shrunk, cap=k + 1) < k + 1:
        raise Infeasible(f"contracted graph is not {k + 1}-edge-connected")
    rest = kecss_approx(shrunk, k + 1, method)
    return _checked(instance, forest | rest, "k-FGC")
