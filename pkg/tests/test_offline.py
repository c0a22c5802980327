import itertools
import math

import numpy as np
import pytest

from secmatch import (
    UNBOUNDED,
    BipartiteInstance,
    Edge,
    LeftVertex,
    Matching,
    RngStream,
    SizeError,
    brute_force_opt,
    decompose_opt,
    evaluate,
    greedy_matching,
    restrict,
    threshold,
    threshold_bisect,
)
from secmatch.offline import _greedy_edge_indices, _sweep_greedy_values
from secmatch.verify import (
    check_lemma3_monotonicity,
    check_lemma5_gamma_monotone,
    max_matching_value,
    random_bipartite,
    random_knapsack_class,
)


def enumerate_budgeted_opt(inst, budget=None):
    """Independent oracle: exhaustive over all edge subsets.

    Only usable for a handful of edges; deliberately shares no code with
    brute_force_opt.
    """
    budget = inst.budget if budget is None else budget
    best = 0.0
    for size in range(len(inst.edges) + 1):
        for combo in itertools.combinations(inst.edges, size):
            lefts = [e.left for e in combo]
            rights = [e.right for e in combo]
            if len(set(lefts)) < len(lefts) or len(set(rights)) < len(rights):
                continue
            if sum(inst.bid_of(l) for l in lefts) > budget + 1e-9:
                continue
            best = max(best, sum(e.value for e in combo))
    return best


class TestGreedy:
    def test_no_edges(self):
        inst = BipartiteInstance([LeftVertex(0, 1.0)], 1, [], 5.0)
        assert len(greedy_matching(inst)) == 0

    def test_blocking_example(self, tiny_graph):
        m = greedy_matching(tiny_graph)
        assert m.edges == (Edge(0, 0, 5.0),)
        assert m.value == 5.0
        assert max_matching_value(tiny_graph) == pytest.approx(7.0)

    def test_half_approximation(self):
        root = RngStream(11, "half")
        for k in range(150):
            inst = random_bipartite(root.derive(f"k:{k}"), max_left=6, max_right=6)
            assert greedy_matching(inst).value >= max_matching_value(inst) / 2 - 1e-9

    def test_tie_break_prefers_lower_buck_per_bang(self):
        # equal values: the cheaper-per-value edge wins the scan slot
        inst = BipartiteInstance(
            [LeftVertex(0, 4.0), LeftVertex(1, 2.0)],
            1,
            [Edge(0, 0, 5.0), Edge(1, 0, 5.0)],
            10.0,
        )
        assert greedy_matching(inst).edges == (Edge(1, 0, 5.0),)


class TestRestrict:
    def test_unbounded_keeps_all(self, two_item_graph):
        assert restrict(two_item_graph, UNBOUNDED).edges == two_item_graph.edges

    def test_two_item_at_one(self, two_item_graph):
        kept = restrict(two_item_graph, 1.0)
        assert {e.left for e in kept.edges} == {0}
        assert len(kept.edges) == 2
        assert len(kept.lefts) == 2  # vertices stay, possibly isolated

    def test_zero_prunes_everything(self, two_item_graph):
        assert restrict(two_item_graph, 0.0).edges == ()

    def test_negative_rejected(self, two_item_graph):
        with pytest.raises(ValueError):
            restrict(two_item_graph, -0.5)


class TestThreshold:
    def test_two_item_instance(self, two_item_graph):
        res = threshold(two_item_graph)
        assert res.gamma == pytest.approx(10.0 / 9.0)
        assert res.matching.left_ids() == {0}
        assert res.matching.value == pytest.approx(1.0)
        assert res.cutoff == pytest.approx(1.0)
        # the supremum is not attained: the matching is the one computed
        # strictly inside the last feasible interval
        assert evaluate(res.matching, two_item_graph).spend <= 10.0

    def test_single_item(self):
        from secmatch import Item, KnapsackInstance, knapsack_to_bipartite

        graph = knapsack_to_bipartite(KnapsackInstance([Item(0, 1.0, 1.0)], 10.0))
        res = threshold(graph)
        assert res.gamma == pytest.approx(10.0)
        assert res.matching.left_ids() == {0}

    def test_empty_edge_set(self):
        inst = BipartiteInstance([LeftVertex(0, 1.0)], 2, [], 5.0)
        res = threshold(inst)
        assert res.unbounded
        assert math.isinf(res.gamma)
        assert len(res.matching) == 0

    def test_budget_positive_required(self, two_item_graph):
        with pytest.raises(ValueError):
            threshold(two_item_graph, 0.0)
        with pytest.raises(ValueError):
            threshold(two_item_graph, -3.0)

    def test_budget_never_exceeded(self):
        root = RngStream(5, "budget")
        for k in range(200):
            inst = random_bipartite(root.derive(f"k:{k}"), max_left=10, max_right=10)
            res = threshold(inst)
            assert evaluate(res.matching, inst).spend <= inst.budget + 1e-9
            # charged-value feasibility when finite
            if not res.unbounded:
                charged = res.gamma * res.matching.value
                assert charged <= inst.budget + 1e-9

    def test_matching_reproducible_from_cutoff(self):
        root = RngStream(6, "cutoff")
        for k in range(100):
            inst = random_bipartite(root.derive(f"k:{k}"), max_left=8, max_right=8)
            res = threshold(inst)
            if res.unbounded:
                continue
            assert greedy_matching(restrict(inst, res.cutoff)) == res.matching

    def test_sweep_matches_per_breakpoint_greedy(self):
        # the vectorized sweep must agree with a direct greedy run at every
        # breakpoint, on both the generic and the uniform-row fast path
        root = RngStream(8, "sweep")
        for k in range(40):
            stream = root.derive(f"k:{k}")
            inst = (
                random_knapsack_class(stream, n_range=(2, 8))
                if k % 2
                else random_bipartite(stream, max_left=7, max_right=7)
            )
            bp = inst._cols.breakpoints
            values = _sweep_greedy_values(inst)
            for j, cut in enumerate(bp.tolist()):
                direct = sum(
                    inst.edges[i].value for i in _greedy_edge_indices(inst, cut)
                )
                assert values[j] == pytest.approx(direct, abs=1e-9)

    def test_bisect_agrees(self):
        root = RngStream(9, "bis")
        for k in range(60):
            inst = random_bipartite(root.derive(f"k:{k}"), max_left=7, max_right=7)
            a, b = threshold(inst), threshold_bisect(inst)
            assert a.unbounded == b.unbounded
            if not a.unbounded:
                assert b.gamma == pytest.approx(a.gamma, abs=1e-9)
            assert a.matching == b.matching


class TestBruteForce:
    def test_two_item_optimum(self, two_item_graph):
        opt = brute_force_opt(two_item_graph)
        assert opt.left_ids() == {1}
        assert opt.value == pytest.approx(9.0)

    def test_empty_instance(self):
        inst = BipartiteInstance([], 1, [], 5.0)
        assert brute_force_opt(inst).value == 0.0

    def test_matches_independent_enumeration(self):
        root = RngStream(12, "bf")
        for k in range(60):
            inst = random_bipartite(
                root.derive(f"k:{k}"), max_left=4, max_right=3, edge_prob=0.7
            )
            got = evaluate(brute_force_opt(inst), inst).value
            assert got == pytest.approx(enumerate_budgeted_opt(inst), abs=1e-9)

    def test_budget_respected(self):
        root = RngStream(13, "bf2")
        for k in range(40):
            inst = random_bipartite(root.derive(f"k:{k}"), max_left=6, max_right=6)
            opt = brute_force_opt(inst)
            assert evaluate(opt, inst).spend <= inst.budget + 1e-9

    def test_size_guard(self):
        lefts = [LeftVertex(i, 1.0) for i in range(21)]
        inst = BipartiteInstance(lefts, 1, [Edge(0, 0, 1.0)], 5.0)
        with pytest.raises(SizeError):
            brute_force_opt(inst)


class TestDecompose:
    def test_empty(self, two_item_graph):
        split = decompose_opt(Matching(), 1.0, two_item_graph)
        assert split == (0.0, 0.0)

    def test_boundary_goes_low(self, two_item_graph):
        opt = brute_force_opt(two_item_graph)
        split = decompose_opt(opt, 10.0 / 9.0, two_item_graph)
        assert split.opt_plus_value == pytest.approx(0.0)
        assert split.opt_minus_value == pytest.approx(9.0)

    def test_below_boundary(self, two_item_graph):
        opt = brute_force_opt(two_item_graph)
        split = decompose_opt(opt, 1.0, two_item_graph)
        assert split.opt_plus_value == pytest.approx(9.0)
        assert split.opt_minus_value == pytest.approx(0.0)

    def test_infinite_gamma_rejected(self, two_item_graph):
        with pytest.raises(ValueError):
            decompose_opt(Matching(), math.inf, two_item_graph)

    def test_parts_sum_to_total(self):
        root = RngStream(14, "split")
        for k in range(40):
            inst = random_bipartite(root.derive(f"k:{k}"), max_left=6, max_right=6)
            opt = brute_force_opt(inst)
            gamma = float(RngStream(k, "g").generator().uniform(0, 3))
            split = decompose_opt(opt, gamma, inst)
            assert split.opt_plus_value + split.opt_minus_value == pytest.approx(
                opt.value
            )


class TestMonotonicityLemmas:
    def test_lemma3(self):
        assert check_lemma3_monotonicity(seed=1, triples=300).passed

    def test_lemma5(self):
        assert check_lemma5_gamma_monotone(seed=1, pairs=300).passed
