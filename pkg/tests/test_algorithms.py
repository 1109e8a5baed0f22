import random
from fractions import Fraction

import pytest

from fgc.algorithms import (
    algorithm_a,
    algorithm_b,
    algorithm_c,
    hybrid,
    kfgc_size_bound,
    kfgc_unweighted,
    safe_forest,
    solve,
)
from fgc.fixtures import BRIDGED_OPT, bridged_triangles, star_triangle
from fgc.graph import LabeledMultigraph, SpanningTree
from fgc.model import FgcInstance, InfeasibleInstance, InvalidParameters, augment_parallel_unsafe, generate_instance, is_feasible
from fgc.subroutines import APPROX_METHODS, EXACT_METHODS, KecssMethod, exact_fgc
from fgc.thresholds import all_alpha_msts

from corpus import corpus_instance


def instance(n, edges, k=1):
    return FgcInstance(LabeledMultigraph.build(n, [(u, v, Fraction(w), s) for u, v, w, s in edges]), k)


def augmented(inst):
    return augment_parallel_unsafe(inst)[0]


SAFE_PAIR = augmented(instance(2, [(0, 1, 2, "S"), (0, 1, 1, "U")]))
TRIANGLE = instance(3, [(0, 1, 1, "U"), (1, 2, 1, "U"), (2, 0, 1, "U")])
TWO_TRIANGLES = augmented(instance(6, [(0, 1, 1, "U"), (1, 2, 1, "U"), (2, 0, 1, "U"),
                                       (3, 4, 1, "U"), (4, 5, 1, "U"), (5, 3, 1, "U"), (2, 3, 1, "S")]))


class TestAlgorithmA:
    def test_single_safe_edge_drops_twin(self):
        inst = augmented(instance(2, [(0, 1, 2, "S")]))
        for methods in (APPROX_METHODS, EXACT_METHODS):
            sol = algorithm_a(inst, methods)
            assert sol.edge_ids == {0} and sol.weight == 2

    def test_triangle(self):
        assert algorithm_a(TRIANGLE).weight == 3

    def test_star_triangle_within_twice_optimum(self):
        inst = augmented(star_triangle())
        assert algorithm_a(inst, EXACT_METHODS).weight <= 2 * exact_fgc(star_triangle())[1]

    def test_needs_augmented_k1(self):
        with pytest.raises(InvalidParameters):
            algorithm_a(star_triangle())
        k2 = generate_instance("random", 5, 9, 1, Fraction(1, 2), 0, k=2)
        with pytest.raises(InvalidParameters):
            algorithm_a(augmented(k2))


class TestAlgorithmB:
    def test_alpha_one_buys_a_cover(self):
        sol = algorithm_b(SAFE_PAIR, 1)
        assert sol.edge_ids == {0, 1} and sol.weight == 3

    def test_alpha_half_takes_safe_edge(self):
        sol = algorithm_b(SAFE_PAIR, Fraction(1, 2))
        assert sol.edge_ids == {0} and sol.weight == 2

    def test_wtap_case_at_one(self):
        inst = generate_instance("wtap", 6, 10, 5, Fraction(0), 4)
        tree = {e.id for e in inst.graph.edges if e.weight == 0}
        sol = algorithm_b(inst, 1, EXACT_METHODS)
        assert tree <= sol.edge_ids
        from fgc.subroutines import exact_wtap
        assert sol.weight == exact_wtap(inst.graph, tree)[1]

    def test_rejects_bad_alpha(self):
        with pytest.raises(InvalidParameters):
            algorithm_b(SAFE_PAIR, Fraction(3, 2))

    def test_other_minimum_tree(self):
        g = TWO_TRIANGLES.graph
        for tree in all_alpha_msts(g, 1):
            assert is_feasible(TWO_TRIANGLES, algorithm_b(TWO_TRIANGLES, 1, tree=tree))
        # the twin of the safe bridge is heavier than the bridge at alpha=0
        with pytest.raises(InvalidParameters):
            algorithm_c(TWO_TRIANGLES, 0, tree=SpanningTree(g, frozenset({0, 1, 3, 4, 7})))


class TestAlgorithmC:
    def test_safe_pair_at_zero(self):
        sol = algorithm_c(SAFE_PAIR, 0)
        assert sol.edge_ids == {0} and sol.weight == 2

    @pytest.mark.parametrize("alpha", [0, Fraction(1, 3), 1])
    def test_triangle_any_alpha(self, alpha):
        assert algorithm_c(TRIANGLE, alpha).weight == 3

    def test_two_triangles_optimal(self):
        sol = algorithm_c(TWO_TRIANGLES, 0, EXACT_METHODS)
        assert sol.weight == 7 == exact_fgc(TWO_TRIANGLES)[1]
        assert 6 in sol.edge_ids


class TestHybrid:
    def test_safe_pair(self):
        rep = hybrid(SAFE_PAIR)
        names = {v.name for v in rep.variants}
        assert names == {"A", "B", "C"}
        assert rep.weight == 2
        assert rep.get("B", 1).weight == 3

    def test_mst_case_is_optimal(self):
        for seed in range(6):
            inst = generate_instance("mst", 6, 10, 5, Fraction(1), seed)
            rep = hybrid(augmented(inst))
            assert rep.weight == exact_fgc(inst)[1] == rep.get("C", 0).weight

    def test_bridged(self):
        rep = hybrid(augmented(bridged_triangles()), methods=EXACT_METHODS)
        assert BRIDGED_OPT <= rep.weight <= Fraction(3, 2) * BRIDGED_OPT

    @pytest.mark.parametrize("seed", range(0, 500, 25))
    def test_dominates_its_members(self, seed):
        inst = augmented(corpus_instance(seed))
        rep = hybrid(inst)
        assert rep.weight <= algorithm_a(inst).weight
        assert rep.weight <= algorithm_b(inst, 1).weight
        assert rep.weight <= algorithm_c(inst, 0).weight
        assert rep.chosen is min(rep.variants, key=lambda v: v.weight)

    @pytest.mark.parametrize("seed", range(0, 160, 8))
    def test_threshold_set_beats_random_scaling_sets(self, seed):
        inst = augmented(corpus_instance(seed))
        rep = hybrid(inst)
        size = len(rep.variants) // 2
        rng = random.Random(seed)
        for _ in range(5):
            other = {Fraction(rng.randint(0, 1000), 1000) for _ in range(size)}
            assert rep.weight <= hybrid(inst, other).weight


def test_every_output_feasible_on_500_instances():
    for seed in range(500):
        inst = augmented(corpus_instance(seed))
        for v in hybrid(inst).variants:
            assert is_feasible(inst, v.solution), (seed, v.label)


class TestSolve:
    def test_maps_twins_back(self):
        inst = instance(2, [(0, 1, 2, "S"), (0, 1, 1, "U")])
        assert solve(inst).edge_ids == {0}
        path = instance(3, [(0, 1, 1, "S"), (1, 2, 1, "S"), (0, 2, 5, "U")])
        sol = solve(path, "a")
        assert sol.edge_ids <= {0, 1, 2} and is_feasible(path, sol)

    def test_named_algorithms(self):
        inst = bridged_triangles()
        for algo in ("a", "b", "c", "hybrid"):
            assert is_feasible(inst, solve(inst, algo))

    def test_unknown(self):
        with pytest.raises(InvalidParameters):
            solve(bridged_triangles(), "d")


class TestKfgc:
    def test_size_formula(self):
        assert kfgc_size_bound(1) == Fraction(5, 4)
        assert kfgc_size_bound(2) == Fraction(7, 6)
        assert kfgc_size_bound(1, 2) == Fraction(2)

    def test_all_safe_k1(self):
        inst = generate_instance("mst", 6, 10, 1, Fraction(1), 2)
        sol = kfgc_unweighted(inst)
        assert len(sol) == 5 == len(safe_forest(inst))

    def test_unsafe_triangle(self):
        assert len(kfgc_unweighted(TRIANGLE)) == 3

    def test_k4_at_k2(self):
        k4 = instance(4, [(u, v, 1, "U") for u in range(4) for v in range(u + 1, 4)], k=2)
        sol = kfgc_unweighted(k4)
        assert len(sol) == 6 == exact_fgc(k4)[1]

    def test_weighted_rejected(self):
        with pytest.raises(InvalidParameters):
            kfgc_unweighted(bridged_triangles())

    @pytest.mark.parametrize("k", [1, 2])
    def test_exact_is_optimal_and_heuristic_within_measured_ratio(self, k):
        for seed in range(20):
            try:
                inst = generate_instance("random", 5 + seed % 3, 10 + seed % 4, 1, Fraction(1, 3), seed, k)
            except InvalidParameters:
                continue
            opt = exact_fgc(inst)[1]
            exact = kfgc_unweighted(inst)
            assert is_feasible(inst, exact)
            assert len(exact) <= kfgc_size_bound(k) * opt
            assert len(exact) == opt
            heur = kfgc_unweighted(inst, KecssMethod.DEGREE_PRUNING)
            assert is_feasible(inst, heur)
            assert len(heur) <= kfgc_size_bound(k, measured_theta(inst, k)) * opt


def measured_theta(inst, k):
    from fgc.graph import contract
    from fgc.subroutines import exact_kecss, kecss_approx
    shrunk, _ = contract(inst.graph, safe_forest(inst))
    if shrunk.vertex_count <= 1:
        return 1
    best = exact_kecss(shrunk, k + 1)[1]
    return Fraction(len(kecss_approx(shrunk, k + 1, KecssMethod.DEGREE_PRUNING)), best)


def test_unsafe_triangle_cannot_survive_two_failures():
    # its contraction is only 2-edge-connected, so the instance never gets built
    g = LabeledMultigraph.build(3, [(0, 1, 1, "U"), (1, 2, 1, "U"), (2, 0, 1, "U")])
    with pytest.raises(InfeasibleInstance):
        kfgc_unweighted(FgcInstance(g, 2))


def test_kfgc_maximal_forest_can_miss_the_optimum():
    # OPT is a 6-cycle with one safe edge; the forest takes three safe edges
    # and the contraction still needs a 4-edge cycle
    inst = generate_instance("random", 6, 10, 1, Fraction(1, 3), 6, 1)
    assert exact_fgc(inst)[1] == 6
    sol = kfgc_unweighted(inst)
    assert len(sol) == 7 and len(safe_forest(inst)) == 3
    assert len(sol) <= kfgc_size_bound(1) * 6
