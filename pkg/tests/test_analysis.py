import math

import numpy as np
import pytest

from secmatch import (
    ArrivalOrder,
    BipartiteInstance,
    Edge,
    LeftVertex,
    RngStream,
    estimate_expectation_identity,
    estimate_half_survival,
    greedy_matching,
    restrict,
    sample_and_permute,
    simulate,
    threshold,
)
from secmatch.analysis import _coins_by_left_id
from secmatch.verify import (
    check_coupling,
    check_monotone_growth,
    check_one_coin_per_left,
    random_bipartite,
    random_knapsack_class,
)


class TestSimulate:
    def test_all_heads_is_greedy(self):
        root = RngStream(1, "heads")
        for k in range(30):
            inst = random_bipartite(root.derive(f"k:{k}"), max_left=6, max_right=6)
            gamma = float(root.derive(f"g:{k}").generator().uniform(0, 3))
            res = simulate(inst, gamma, 1.0, root.derive(f"c:{k}"))
            assert len(res.m2s) == 0
            assert res.m1s == greedy_matching(restrict(inst, gamma))

    def test_all_tails_takes_same_first_edges(self):
        root = RngStream(2, "tails")
        for k in range(30):
            inst = random_bipartite(root.derive(f"k:{k}"), max_left=6, max_right=6)
            res = simulate(inst, math.inf, 0.0, root.derive(f"c:{k}"))
            assert len(res.m1s) == 0
            # with nothing ever blocking, each left lands on its first-scanned
            # edge, the one greedy would give it first
            greedy = greedy_matching(inst)
            for e in greedy:
                assert any(p.left == e.left and p.value >= e.value for p in res.m2s)

    def test_probability_validated(self, two_item_graph):
        with pytest.raises(ValueError):
            simulate(two_item_graph, 1.0, 1.5, RngStream(0))

    def test_one_coin_per_left(self):
        assert check_one_coin_per_left(seed=3, cases=100).passed

    def test_explicit_coin_vector(self):
        inst = random_bipartite(RngStream(4, "vec"), max_left=5, max_right=5,
                                ensure_edges=True)
        coins = np.ones(len(inst.lefts), dtype=bool)
        res = simulate(inst, math.inf, 0.5, coins)
        assert len(res.m2s) == 0


class TestSampleAndPermute:
    def test_all_heads_empty_decision(self):
        inst = random_bipartite(RngStream(5, "sp"), max_left=5, max_right=5,
                                ensure_edges=True)
        coins = np.ones(max(inst.left_ids) + 1, dtype=bool)
        order = ArrivalOrder.uniform(inst.left_ids, RngStream(6, "o"))
        res = sample_and_permute(inst, coins, order)
        assert len(res.m2p) == 0 and len(res.m3p) == 0
        assert res.m1p == threshold(inst).matching

    def test_m3_subset_of_m2(self):
        root = RngStream(7, "sub")
        for k in range(100):
            stream = root.derive(f"k:{k}")
            inst = random_bipartite(stream.derive("inst"), max_left=7, max_right=7)
            order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
            res = sample_and_permute(inst, stream.derive("coins"), order)
            assert set(res.m3p.edges) <= set(res.m2p.edges)

    def test_coupling_with_simulate(self):
        assert check_coupling(seed=8, seeds=300).passed

    def test_gamma_prime_reproduces_offline_matching(self):
        root = RngStream(9, "gp")
        for k in range(50):
            stream = root.derive(f"k:{k}")
            inst = random_bipartite(stream.derive("inst"), max_left=7, max_right=7)
            order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
            res = sample_and_permute(inst, stream.derive("coins"), order)
            heads = _coins_by_left_id(inst, stream.derive("coins"), 0.5)
            sub = inst.subgraph([i for i in inst.left_ids if heads[i]])
            assert greedy_matching(restrict(sub, res.gamma_prime)) == res.m1p


class TestEstimators:
    def test_single_left_half_split(self):
        inst = BipartiteInstance(
            [LeftVertex(0, 1.0)], 1, [Edge(0, 0, 4.0)], 10.0
        )
        est = estimate_expectation_identity(inst, 10.0, 2000, seed=11)
        # one fair coin: both means approach v/2 = 2
        assert est.mean1 + est.mean2 == pytest.approx(4.0)
        assert abs(est.mean1 - 2.0) <= 4 * 4.0 / math.sqrt(2000)

    def test_fixed_gamma_identity(self):
        inst = random_bipartite(RngStream(12, "ident"), max_left=6, max_right=6,
                                ensure_edges=True)
        gamma = threshold(inst).gamma
        if math.isinf(gamma):
            gamma = 10.0
        est = estimate_expectation_identity(inst, gamma, 4000, seed=13)
        assert abs(est.mean1 - est.mean2) <= 3 * est.stderr

    def test_coin_dependent_gamma_reports_without_assert(self):
        # feeding back a coin-dependent cutoff is allowed; the estimator
        # reports means but the equality is not expected to hold
        inst = random_bipartite(RngStream(14, "dep"), max_left=6, max_right=6,
                                ensure_edges=True)
        order = ArrivalOrder.uniform(inst.left_ids, RngStream(15, "o"))
        sp = sample_and_permute(inst, RngStream(16, "c"), order)
        est = estimate_expectation_identity(inst, sp.gamma_prime, 500, seed=17)
        assert math.isfinite(est.mean1) and math.isfinite(est.mean2)

    def test_trials_guard(self, two_item_graph):
        with pytest.raises(ValueError):
            estimate_expectation_identity(two_item_graph, 1.0, 99, seed=0)
        with pytest.raises(ValueError):
            estimate_half_survival(two_item_graph, 99, seed=0)

    def test_monotone_growth_expectation(self):
        assert check_monotone_growth(seed=18, trials=900).passed

    def test_single_left_survival_ratio_one(self):
        inst = BipartiteInstance(
            [LeftVertex(0, 1.0)], 1, [Edge(0, 0, 4.0)], 10.0
        )
        est = estimate_half_survival(inst, 500, seed=19)
        assert est.mean_m3 == pytest.approx(est.mean_m2)

    def test_knapsack_class_survival(self):
        inst = random_knapsack_class(RngStream(20, "surv"), n_range=(8, 8),
                                     budget=6.0)
        est = estimate_half_survival(inst, 3000, seed=21)
        assert est.mean_m3 >= est.mean_m2 / 2 - 3 * est.stderr

    def test_shared_right_survival(self):
        # every edge lands on one right vertex: the proper matching keeps only
        # the first-arriving proposal, still at least half on average
        gen = RngStream(22, "sr").generator()
        inst = BipartiteInstance(
            [LeftVertex(i, float(gen.uniform(0.5, 2.0))) for i in range(8)],
            1,
            [Edge(i, 0, float(gen.uniform(1.0, 10.0))) for i in range(8)],
            4.0,
        )
        est = estimate_half_survival(inst, 3000, seed=23)
        assert est.mean_m3 >= est.mean_m2 / 2 - 3 * est.stderr
