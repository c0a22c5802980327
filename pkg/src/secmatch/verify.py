"""Lemma-level property suites.

Each check replays one of the package's correctness properties on seeded
random inputs and reports a pass/fail with a one-line detail.  The CLI's
``verify`` subcommand runs them all; the test suite reuses them with
criterion-level trial counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .analysis import (
    estimate_expectation_identity,
    estimate_half_survival,
    sample_and_permute,
    simulate,
)
from .core import (
    ArrivalOrder,
    BipartiteInstance,
    Edge,
    Item,
    KnapsackInstance,
    LeftVertex,
    Matching,
    RngStream,
    evaluate,
    knapsack_to_bipartite,
)
from .harness import ExperimentConfig, gen_knapsack_instance, gen_d2d_instance
from .offline import (
    _sweep_greedy_values,
    brute_force_opt,
    decompose_opt,
    greedy_matching,
    restrict,
    threshold,
    threshold_bisect,
)
from .online_knapsack import PriceTable, run_on, run_virtual
from .truthful import (
    RewardTable,
    _membership_coins,
    check_monotone,
    critical_payment_check,
    run_on_truth,
)

__all__ = ["CheckResult", "random_bipartite", "random_knapsack_class", "run_all"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def __str__(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: {self.detail}"


# ---------------------------------------------------------------------------
# Random inputs
# ---------------------------------------------------------------------------


def random_bipartite(
    stream: RngStream,
    max_left: int = 8,
    max_right: int = 8,
    edge_prob: float = 0.6,
    budget_range=(1.0, 25.0),
    ensure_edges: bool = False,
    min_left: int = 1,
    min_right: int = 1,
) -> BipartiteInstance:
    """Small random instance with continuous values and bids (no value ties)."""
    gen = stream.generator()
    while True:
        n = int(gen.integers(min_left, max_left + 1))
        m = int(gen.integers(min_right, max_right + 1))
        lefts = [LeftVertex(i, float(gen.uniform(0.2, 5.0))) for i in range(n)]
        edges = [
            Edge(i, r, float(gen.uniform(0.2, 10.0)))
            for i in range(n)
            for r in range(m)
            if gen.random() < edge_prob
        ]
        if edges or not ensure_edges:
            return BipartiteInstance(
                lefts, m, edges, float(gen.uniform(*budget_range))
            )


def random_knapsack_class(
    stream: RngStream,
    n_range=(4, 12),
    value_range=(1.0, 2.0),
    weight_range=(1.0, 2.0),
    budget: Optional[float] = None,
) -> BipartiteInstance:
    """Mapped knapsack instance (uniform rows, |R| = |L|)."""
    gen = stream.generator()
    n = int(gen.integers(n_range[0], n_range[1] + 1))
    if budget is None:
        # from just-one-item tight to roughly everything-fits slack
        budget = weight_range[1] + float(gen.uniform(0.0, 1.5)) * n
    items = [
        Item(i, float(gen.uniform(*value_range)), float(gen.uniform(*weight_range)))
        for i in range(n)
    ]
    return knapsack_to_bipartite(KnapsackInstance(items, float(budget)))


def _assumption_compliant_config(seed: int) -> ExperimentConfig:
    # Documented defaults for the statistical checks: light-tailed uniform
    # draws where no item is worth a tenth of the offline benchmark.
    return ExperimentConfig(
        kind="knapsack", n_left=50, n_right=50, budget=20.0, trials=1,
        seed=seed, value_range=(1.0, 2.0), bid_range=(1.0, 2.0),
        baseline="threshold",
    )


# ---------------------------------------------------------------------------
# Core checks
# ---------------------------------------------------------------------------


def check_mapping_identity(seed: int = 0, cases: int = 200) -> CheckResult:
    """Mapped instances: value(M) and spend(M) equal item-value and item-weight
    sums over the matched lefts, for random feasible matchings."""
    root = RngStream(seed, "map")
    bad = 0
    for k in range(cases):
        gen = root.derive(f"k:{k}").generator()
        n = int(gen.integers(1, 9))
        items = [
            Item(i, float(gen.uniform(0.5, 5.0)), float(gen.uniform(0.5, 5.0)))
            for i in range(n)
        ]
        inst = KnapsackInstance(items, 100.0)
        graph = knapsack_to_bipartite(inst)
        if graph.right_count != n or len(graph.edges) != n * n:
            bad += 1
            continue
        chosen = [i for i in range(n) if gen.random() < 0.5]
        rights = gen.permutation(n)[: len(chosen)]
        m = Matching(
            Edge(i, int(r), items[i].value) for i, r in zip(chosen, rights)
        )
        value, spend = evaluate(m, graph)
        want_v = sum(items[i].value for i in chosen)
        want_w = sum(items[i].weight for i in chosen)
        if not (math.isclose(value, want_v) and math.isclose(spend, want_w)):
            bad += 1
    return CheckResult(
        "core.mapping_identity", bad == 0, f"{cases - bad}/{cases} cases match"
    )


def check_permutation_uniformity(seed: int = 0, draws: int = 100_000) -> CheckResult:
    """Chi-squared uniformity of ArrivalOrder.uniform over all n! orders,
    n in {3, 4}, at significance 0.001."""
    from scipy.stats import chi2

    import itertools

    worst = 0.0
    ok = True
    detail = []
    for n in (3, 4):
        gen = RngStream(seed, f"perm:{n}").generator()
        cells = {p: 0 for p in itertools.permutations(range(n))}
        for _ in range(draws):
            cells[tuple(ArrivalOrder.uniform(range(n), gen).order)] += 1
        expected = draws / len(cells)
        stat = sum((c - expected) ** 2 / expected for c in cells.values())
        crit = chi2.ppf(1 - 0.001, len(cells) - 1)
        ok &= stat < crit
        detail.append(f"n={n}: chi2 {stat:.1f} < {crit:.1f}")
        worst = max(worst, stat)
    return CheckResult("core.permutation_uniformity", ok, "; ".join(detail))


# ---------------------------------------------------------------------------
# Offline checks
# ---------------------------------------------------------------------------


def _mixed_instance(stream: RngStream, max_left: int) -> BipartiteInstance:
    gen = stream.generator()
    if gen.random() < 0.3:
        return random_knapsack_class(
            stream.derive("kc"), n_range=(1, min(max_left, 20))
        )
    return random_bipartite(
        stream.derive("bp"), max_left=max_left, max_right=max_left + 10
    )


def check_threshold_budget(seed: int = 0, instances: int = 1000, max_left: int = 50) -> CheckResult:
    """Total bid of the threshold rule's matched lefts never exceeds the budget."""
    root = RngStream(seed, "remark1")
    worst = -math.inf
    bad = 0
    for k in range(instances):
        inst = _mixed_instance(root.derive(f"k:{k}"), max_left)
        res = threshold(inst)
        spend = evaluate(res.matching, inst).spend
        worst = max(worst, spend - inst.budget)
        if spend > inst.budget + 1e-9:
            bad += 1
    return CheckResult(
        "offline.threshold_budget",
        bad == 0,
        f"{instances - bad}/{instances} within budget, worst excess {worst:.2e}",
    )


def max_matching_value(inst: BipartiteInstance) -> float:
    """Independent maximum-weight matching oracle (assignment solver)."""
    from scipy.optimize import linear_sum_assignment

    if not inst.edges:
        return 0.0
    cols = inst._cols
    full = np.zeros((len(inst.lefts), inst.right_count))
    full[cols.e_left, cols.e_right] = cols.e_value
    ri, ci = linear_sum_assignment(full, maximize=True)
    return float(full[ri, ci].sum())


def check_greedy_half_approx(seed: int = 0, instances: int = 400) -> CheckResult:
    """Greedy is a half approximation of the max-weight matching, on the full
    graph and on random restrictions."""
    root = RngStream(seed, "half")
    bad = 0
    for k in range(instances):
        stream = root.derive(f"k:{k}")
        inst = random_bipartite(stream, max_left=6, max_right=6)
        gen = stream.derive("gamma").generator()
        for g in (math.inf, float(gen.uniform(0.0, 3.0))):
            sub = restrict(inst, g)
            if evaluate(greedy_matching(sub), sub).value < max_matching_value(sub) / 2 - 1e-9:
                bad += 1
    return CheckResult(
        "offline.greedy_half_approx", bad == 0, f"{bad} violations in {2 * instances} graphs"
    )


def check_appendix_a(seed: int = 0, instances: int = 500) -> CheckResult:
    """Optimal-split inequalities against the exact oracle: the threshold
    matching is worth at least half the optimum's low-spend-rate part, and
    the high part is capped by budget / cutoff.

    The split level is the threshold result's restriction cutoff (the level
    whose greedy run produced the matching).  The reported supremum ``gamma``
    can exceed the cutoff when it is not attained, and the first inequality
    can genuinely fail at that level.
    """
    root = RngStream(seed, "appA")
    bad = 0
    for k in range(instances):
        inst = random_bipartite(
            root.derive(f"k:{k}"), max_left=10, max_right=10, ensure_edges=True
        )
        thr = threshold(inst)
        opt = brute_force_opt(inst)
        split = decompose_opt(opt, thr.cutoff, inst)
        v_thr = evaluate(thr.matching, inst).value
        if v_thr < split.opt_minus_value / 2 - 1e-9:
            bad += 1
            continue
        cap = math.inf if thr.cutoff == 0 else inst.budget / thr.cutoff
        if split.opt_plus_value > cap + 1e-9:
            bad += 1
    return CheckResult(
        "offline.appendix_a", bad == 0, f"{instances - bad}/{instances} instances hold"
    )


def _left_subset_removal(inst: BipartiteInstance, gen) -> BipartiteInstance:
    ids = list(inst.left_ids)
    keep = [i for i in ids if gen.random() < 0.6]
    return inst.subgraph(keep)


def check_lemma3_monotonicity(seed: int = 0, triples: int = 1000) -> CheckResult:
    """Greedy value never increases under left-vertex removal or tighter
    cutoffs, in every combination."""
    root = RngStream(seed, "lem3")
    bad = 0
    for k in range(triples):
        stream = root.derive(f"k:{k}")
        inst = random_bipartite(stream, max_left=8, max_right=8)
        gen = stream.derive("aux").generator()
        sub = _left_subset_removal(inst, gen)
        g1, g2 = sorted(
            (float(gen.uniform(0, 4.0)), float(gen.uniform(0, 4.0))), reverse=True
        )
        v = lambda i: evaluate(greedy_matching(i), i).value
        if v(inst) < v(sub) - 1e-9:
            bad += 1
        if v(restrict(inst, g1)) < v(restrict(inst, g2)) - 1e-9:
            bad += 1
        if v(restrict(inst, g1)) < v(restrict(sub, g1)) - 1e-9:
            bad += 1
    return CheckResult(
        "offline.lemma3_monotonicity", bad == 0, f"{bad} violations in {triples} triples"
    )


def check_lemma5_gamma_monotone(seed: int = 0, pairs: int = 1000) -> CheckResult:
    """Removing left vertices never lowers the threshold (UNBOUNDED tops all)."""
    root = RngStream(seed, "lem5")
    bad = 0
    for k in range(pairs):
        stream = root.derive(f"k:{k}")
        inst = random_bipartite(stream, max_left=8, max_right=8)
        sub = _left_subset_removal(inst, stream.derive("aux").generator())
        if threshold(sub).gamma < threshold(inst).gamma - 1e-12:
            bad += 1
    return CheckResult(
        "offline.lemma5_gamma_monotone", bad == 0, f"{bad} violations in {pairs} pairs"
    )


def check_sweep_prefix(seed: int = 0, instances: int = 300) -> CheckResult:
    """Breakpoint feasibility is prefix shaped: once the charged greedy value
    exceeds the budget it never comes back (this underlies the sweep and the
    bisection variant)."""
    root = RngStream(seed, "prefix")
    bad = 0
    for k in range(instances):
        inst = random_bipartite(root.derive(f"k:{k}"), max_left=8, max_right=8)
        bp = inst._cols.breakpoints
        if bp.size == 0:
            continue
        values = _sweep_greedy_values(inst)
        feasible = bp * values <= inst.budget + 1e-9
        n_feas = int(np.count_nonzero(feasible))
        if not bool(feasible[:n_feas].all()):
            bad += 1
    return CheckResult(
        "offline.sweep_prefix", bad == 0, f"{bad} non-prefix sweeps in {instances}"
    )


def check_bisect_crosscheck(seed: int = 0, instances: int = 200) -> CheckResult:
    """The bisection cross-check agrees with the exact sweep."""
    root = RngStream(seed, "bisect")
    bad = 0
    for k in range(instances):
        inst = random_bipartite(root.derive(f"k:{k}"), max_left=7, max_right=7)
        a = threshold(inst)
        b = threshold_bisect(inst)
        if a.unbounded != b.unbounded:
            bad += 1
            continue
        if not a.unbounded and abs(a.gamma - b.gamma) > 1e-9 * max(1.0, a.gamma):
            bad += 1
            continue
        if a.matching != b.matching:
            bad += 1
    return CheckResult(
        "offline.bisect_crosscheck", bad == 0, f"{bad} disagreements in {instances}"
    )


# ---------------------------------------------------------------------------
# Online knapsack checks
# ---------------------------------------------------------------------------


def check_on_budget(seed: int = 0, runs: int = 1000) -> CheckResult:
    """With the cost condition enforced: total spend fits the budget, every
    selection weighs less than its consumed slot's cost, and the slot costs
    themselves sum to at most the budget."""
    root = RngStream(seed, "lem2")
    bad = 0
    for k in range(runs):
        stream = root.derive(f"k:{k}")
        inst = random_knapsack_class(stream.derive("inst"), n_range=(2, 10))
        gen = stream.derive("t").generator()
        n = len(inst.lefts)
        t = int(gen.integers(0, n + 1))
        order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
        out = run_on(inst, order, t)
        if out.spend > inst.budget + 1e-9:
            bad += 1
            continue
        table = PriceTable(
            threshold(inst.subgraph(order.order[:t]), inst.budget).matching, inst
        )
        if sum(table.cost) > inst.budget + 1e-9:
            bad += 1
            continue
        if any(inst.bid_of(e.left) >= table.cost[e.right] for e in out.selected):
            bad += 1
    return CheckResult("online.budget_per_slot", bad == 0, f"{bad} violations in {runs} runs")


def _dominance_replays(seed: int, runs: int):
    root = RngStream(seed, "dom")
    for k in range(runs):
        stream = root.derive(f"k:{k}")
        inst = random_knapsack_class(stream.derive("inst"), n_range=(2, 12))
        n = len(inst.lefts)
        t = int(stream.derive("t").generator().integers(0, n + 1))
        order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
        virt = run_virtual(inst, order, t)
        on = run_on(inst, order, t, enforce_cost=False).selected.left_ids()
        yield virt, on


def check_virtual_dominance_sets(seed: int = 0, runs: int = 1000) -> CheckResult:
    """Set inclusion: every comparator-selected vertex is also selected by the
    relaxed online rule, run by run.

    This is false in general (a known gap in the claim it mirrors): the
    comparator declines arrivals whose displaced reference price is already
    decision-tagged, while the online rule must consume a real slot for them
    and can run out.  Minimal counterexample: offline prices {5, 3}, decision
    buck-per-bangs 4, 2.9, 2.95.  The check stays faithful to the claim and
    is expected to fail at a small rate; see the count and per-vertex checks
    for the true forms.
    """
    bad = sum(1 for virt, on in _dominance_replays(seed, runs) if not virt <= on)
    return CheckResult(
        "online.virtual_dominance_sets",
        bad == 0,
        f"{bad} violations in {runs} replays (known gap; expected nonzero)",
    )


def check_virtual_dominance_counts(seed: int = 0, runs: int = 1000) -> CheckResult:
    """Counting form: the comparator never selects more vertices than the
    relaxed online rule in the same replay."""
    bad = sum(1 for virt, on in _dominance_replays(seed, runs) if len(virt) > len(on))
    return CheckResult(
        "online.virtual_dominance_counts", bad == 0, f"{bad} violations in {runs} replays"
    )


def check_virtual_dominance_per_vertex(
    seed: int = 0, instances: int = 2, orders: int = 1500
) -> CheckResult:
    """Probability form: per vertex, the online rule's selection frequency is
    at least the comparator's (this is the step the selection-probability
    argument needs)."""
    worst = -1.0
    for j in range(instances):
        stream = RngStream(seed, f"pv:{j}")
        inst = random_knapsack_class(stream.derive("inst"), n_range=(8, 12))
        n = len(inst.lefts)
        t = max(1, round(n / math.e))
        virt_hits = np.zeros(n)
        on_hits = np.zeros(n)
        for k in range(orders):
            order = ArrivalOrder.uniform(inst.left_ids, stream.derive(f"o:{k}"))
            for i in run_virtual(inst, order, t):
                virt_hits[i] += 1
            for i in run_on(inst, order, t, enforce_cost=False).selected.left_ids():
                on_hits[i] += 1
        worst = max(worst, float(((virt_hits - on_hits) / orders).max()))
    return CheckResult(
        "online.virtual_dominance_per_vertex",
        worst <= 0.0,
        f"worst per-vertex frequency gap {worst:+.4f} (<= 0 means dominance)",
    )


def check_pruning_safety(seed: int = 0, runs: int = 300) -> CheckResult:
    """The prefix threshold never falls below the full-graph threshold, so no
    member of the full-graph target set is pruned in the decision phase."""
    root = RngStream(seed, "prune")
    bad = 0
    for k in range(runs):
        stream = root.derive(f"k:{k}")
        inst = random_knapsack_class(stream.derive("inst"), n_range=(2, 12))
        n = len(inst.lefts)
        t = int(stream.derive("t").generator().integers(0, n + 1))
        order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
        full = threshold(inst)
        gamma_t = threshold(inst.subgraph(order.order[:t]), inst.budget).gamma
        if gamma_t < full.gamma - 1e-12:
            bad += 1
            continue
        lstar = full.matching.left_ids()
        cols = inst._cols
        bpb_of = {
            int(i): float(b / v)
            for i, b, v in zip(cols.left_ids, cols.bids, cols.left_value)
        }
        if any(
            bpb_of[lid] > gamma_t
            for lid in order.order[t:]
            if lid in lstar
        ):
            bad += 1
    return CheckResult("online.pruning_safety", bad == 0, f"{bad} violations in {runs} runs")


def check_eq1_selection_frequency(
    seed: int = 0, orders: int = 2000, instances: int = 4, t: int = 18
) -> CheckResult:
    """Pooled selection frequency of the full-graph target set under the
    comparator stays above 1/e - 0.05 (n = 50, observation length 18).

    Pooled over (member, order) pairs; the minimum per-vertex frequency can
    dip below the bound for the boundary members of the target set.
    """
    hits = total = 0
    per_instance = orders // instances
    for j in range(instances):
        cfg = _assumption_compliant_config(seed + 101 * j)
        root = RngStream(seed, f"eq1:{j}")
        inst = knapsack_to_bipartite(gen_knapsack_instance(cfg, root.derive("inst")))
        lstar = threshold(inst).matching.left_ids()
        for k in range(per_instance):
            order = ArrivalOrder.uniform(inst.left_ids, root.derive(f"o:{k}"))
            sel = run_virtual(inst, order, t)
            hits += len(sel & lstar)
            total += len(lstar)
    freq = hits / total
    bound = 1 / math.e - 0.05
    return CheckResult(
        "online.eq1_selection_frequency",
        freq >= bound,
        f"pooled frequency {freq:.4f} >= {bound:.4f} ({total} member-order pairs)",
    )


def check_theorem1_statistic(seed: int = 0, trials: int = 2000) -> CheckResult:
    """Mean value ratio of the enforced online run to the full-graph threshold
    benchmark stays above 1/(2e) minus three standard errors."""
    cfg = _assumption_compliant_config(seed)
    root = RngStream(seed, "thm1")
    ratios = np.empty(trials)
    for k in range(trials):
        stream = root.derive(f"trial:{k}")
        inst = knapsack_to_bipartite(gen_knapsack_instance(cfg, stream.derive("instance")))
        order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
        out = run_on(inst, order)
        ratios[k] = out.value / evaluate(threshold(inst).matching, inst).value
    mean = float(ratios.mean())
    se = float(ratios.std(ddof=1) / math.sqrt(trials))
    bound = 1 / (2 * math.e) - 3 * se
    return CheckResult(
        "online.theorem1_statistic",
        mean >= bound,
        f"mean ratio {mean:.4f} >= {bound:.4f} (se {se:.4f}, {trials} trials)",
    )


# ---------------------------------------------------------------------------
# Truthful checks
# ---------------------------------------------------------------------------


def _truthful_case(stream: RngStream):
    cfg = ExperimentConfig(
        kind="d2d", n_left=10, n_right=10, budget=12.0, trials=1, seed=0,
        delta=0.8, value_range=(0.0, 10.0), bid_range=(0.0, 4.0),
    )
    inst = gen_d2d_instance(cfg, stream.derive("inst"), 0.8)
    order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
    coins = stream.derive("coins")
    return inst, order, coins


def check_truthful_run_invariants(seed: int = 0, runs: int = 500) -> CheckResult:
    """Per-run audit: payment covers each accepted bid, accepted values meet
    their slot rewards, slots are consumed at most once, and accepted bids
    sum within the budget.  Total payments are reported, not asserted."""
    root = RngStream(seed, "truth")
    bad = 0
    pay_exceed = 0
    for k in range(runs):
        inst, order, coins = _truthful_case(root.derive(f"k:{k}"))
        out = run_on_truth(inst, order, coins)
        if out.spend > inst.budget + 1e-9:
            bad += 1
            continue
        table = RewardTable(
            threshold(inst.subgraph(order.order[: out.t_used]), inst.budget).matching,
            inst,
        )
        seen_rights = set()
        for e in out.selected:
            pay = out.payments[e.left]
            if pay < inst.bid_of(e.left) - 1e-9:
                bad += 1
                break
            if e.value < table.reward[e.right] or table.reward[e.right] <= 0:
                bad += 1
                break
            if e.right in seen_rights:
                bad += 1
                break
            seen_rights.add(e.right)
        if sum(out.payments) > inst.budget + 1e-9:
            pay_exceed += 1
    return CheckResult(
        "truthful.run_invariants",
        bad == 0,
        f"{bad} violations in {runs} runs; payment totals exceeded the budget "
        f"in {pay_exceed} runs (reported only)",
    )


def _sample_winner_cases(seed: int, wanted: int):
    """Yield (inst, order, coins, winner id, payment) until ``wanted`` pairs."""
    root = RngStream(seed, "winners")
    k = 0
    produced = 0
    while produced < wanted:
        inst, order, coins = _truthful_case(root.derive(f"k:{k}"))
        k += 1
        out = run_on_truth(inst, order, coins)
        for e in out.selected:
            if produced >= wanted:
                break
            produced += 1
            yield inst, order, coins, e.left, out.payments[e.left]


def check_monotone_selection(seed: int = 0, pairs: int = 1000) -> CheckResult:
    """Every sampled winner still wins after lowering its bid."""
    root = RngStream(seed, "mono")
    bad = total = 0
    for j, (inst, order, coins, lid, _pay) in enumerate(
        _sample_winner_cases(seed, pairs)
    ):
        gen = root.derive(f"bid:{j}").generator()
        lower = inst.bid_of(lid) * float(gen.uniform(0.05, 0.999))
        total += 1
        if not check_monotone(inst, order, coins, lid, lower):
            bad += 1
    return CheckResult(
        "truthful.monotone_selection", bad == 0, f"{bad} violations in {total} replays"
    )


def check_critical_payment(seed: int = 0, pairs: int = 1000) -> CheckResult:
    """Every sampled winner loses after bidding just above its payment."""
    bad = total = 0
    for inst, order, coins, lid, _pay in _sample_winner_cases(seed + 1, pairs):
        total += 1
        if not critical_payment_check(inst, order, coins, lid):
            bad += 1
    return CheckResult(
        "truthful.critical_payment", bad == 0, f"{bad} violations in {total} replays"
    )


# ---------------------------------------------------------------------------
# Analysis checks
# ---------------------------------------------------------------------------


def check_coupling(seed: int = 0, seeds: int = 1000) -> CheckResult:
    """The mechanism-shaped split and the coin-split greedy scan produce the
    same two piles edge for edge when they share coins and the cutoff."""
    root = RngStream(seed, "couple")
    bad = 0
    for k in range(seeds):
        stream = root.derive(f"k:{k}")
        inst = random_bipartite(stream.derive("inst"), max_left=7, max_right=9)
        order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
        sp = sample_and_permute(inst, stream.derive("coins"), order)
        sim = simulate(inst, sp.gamma_prime, 0.5, stream.derive("coins"))
        if sim.m1s != sp.m1p or sim.m2s != sp.m2p:
            bad += 1
    return CheckResult("analysis.coupling", bad == 0, f"{bad} mismatches in {seeds} seeds")


def check_one_coin_per_left(seed: int = 0, cases: int = 300) -> CheckResult:
    """Exactly one coin matters per assigned left: flipping the coins of all
    unassigned lefts never changes the outcome, flipping an assigned one does."""
    root = RngStream(seed, "coins")
    bad = 0
    for k in range(cases):
        stream = root.derive(f"k:{k}")
        inst = random_bipartite(stream.derive("inst"), max_left=6, max_right=6)
        gen = stream.derive("flip").generator()
        coins = gen.random(max(inst.left_ids, default=-1) + 1) < 0.5
        gamma = float(gen.uniform(0.2, 4.0))
        res = simulate(inst, gamma, 0.5, coins)
        assigned = res.m1s.left_ids() | res.m2s.left_ids()
        if len(assigned) != len(res.m1s) + len(res.m2s):
            bad += 1
            continue
        flipped = coins.copy()
        for i in range(len(flipped)):
            if i not in assigned:
                flipped[i] = not flipped[i]
        if simulate(inst, gamma, 0.5, flipped) != res:
            bad += 1
            continue
        if assigned:
            one = coins.copy()
            pick = sorted(assigned)[int(gen.integers(0, len(assigned)))]
            one[pick] = not one[pick]
            flip_res = simulate(inst, gamma, 0.5, one)
            if (
                pick in flip_res.m1s.left_ids()
            ) == (pick in res.m1s.left_ids()):
                bad += 1
    return CheckResult("analysis.one_coin_per_left", bad == 0, f"{bad} failures in {cases} cases")


def check_expectation_identity(seed: int = 0, trials: int = 10_000) -> CheckResult:
    """With a coin-independent cutoff, the two piles of the coin-split scan
    have equal expected value (within three standard errors)."""
    inst = random_bipartite(RngStream(seed, "ident-inst"), max_left=6, max_right=6,
                            ensure_edges=True)
    gamma = threshold(inst).gamma
    if math.isinf(gamma):
        gamma = 10.0
    est = estimate_expectation_identity(inst, gamma, trials, seed)
    gap = abs(est.mean1 - est.mean2)
    return CheckResult(
        "analysis.expectation_identity",
        gap <= 3 * est.stderr,
        f"|{est.mean1:.4f} - {est.mean2:.4f}| = {gap:.4f} <= {3 * est.stderr:.4f}",
    )


def check_monotone_growth(seed: int = 0, trials: int = 3000, instances: int = 3) -> CheckResult:
    """Raising the cutoff raises the tails pile's value in expectation.

    Pointwise monotonicity fails on a few percent of coin draws (the heads
    matching can shift and block a tails vertex's best right), so the checked
    form is the expectation inequality the argument actually needs, pooled
    over several instances.
    """
    details = []
    ok = True
    per_inst = max(trials // instances, 100)
    for j in range(instances):
        inst = random_bipartite(
            RngStream(seed, f"grow-inst:{j}"), max_left=8, max_right=8,
            min_left=5, min_right=4, ensure_edges=True,
        )
        gamma_f = threshold(inst).gamma
        diffs = np.empty(per_inst)
        root = RngStream(seed, f"grow:{j}")
        for k in range(per_inst):
            stream = root.derive(f"k:{k}")
            coins = _membership_coins(inst, stream.derive("coins"))
            sub = inst.subgraph([i for i in inst.left_ids if coins[i]])
            gamma_sub = threshold(sub).gamma
            hi = simulate(inst, gamma_sub, 0.5, stream.derive("coins")).m2s.value
            lo = simulate(inst, gamma_f, 0.5, stream.derive("coins")).m2s.value
            diffs[k] = hi - lo
        mean = float(diffs.mean())
        se = float(diffs.std(ddof=1) / math.sqrt(per_inst))
        ok &= mean >= -3 * se
        details.append(f"E[gain] {mean:.3f} (se {se:.3f})")
    return CheckResult("analysis.monotone_growth", ok, "; ".join(details))


def check_half_survival(seed: int = 0, trials: int = 10_000) -> CheckResult:
    """The order-pruned matching keeps at least half the pseudo matching's
    value in expectation."""
    inst = random_knapsack_class(RngStream(seed, "surv-inst"), n_range=(8, 8),
                                 budget=6.0)
    est = estimate_half_survival(inst, trials, seed)
    ok = est.mean_m3 >= est.mean_m2 / 2 - 3 * est.stderr
    return CheckResult(
        "analysis.half_survival",
        ok,
        f"mean m3 {est.mean_m3:.4f} vs m2/2 {est.mean_m2 / 2:.4f} (se {est.stderr:.4f})",
    )


# ---------------------------------------------------------------------------
# Harness checks
# ---------------------------------------------------------------------------


def check_generators(seed: int = 0) -> CheckResult:
    """Generator shape and the input-model conditions it is built to honor."""
    problems = []
    cfg = ExperimentConfig(
        kind="d2d", n_left=50, n_right=100, budget=100.0, trials=1, seed=seed,
        delta=0.5, value_range=(0.0, 20.0), bid_range=(0.0, 5.0),
    )
    inst = gen_d2d_instance(cfg, RngStream(seed, "d2d"))
    per_left = {i: 0 for i in inst.left_ids}
    for e in inst.edges:
        per_left[e.left] += 1
    if set(per_left.values()) != {50}:
        problems.append("d2d degree != ceil(delta * n_right)")
    again = gen_d2d_instance(cfg, RngStream(seed, "d2d"))
    if again != inst:
        problems.append("d2d regeneration not identical")
    full = gen_d2d_instance(cfg, RngStream(seed, "d2d"), delta=1.0)
    if len(full.edges) != 50 * 100:
        problems.append("delta=1 is not complete bipartite")

    kcfg = _assumption_compliant_config(seed)
    gen = RngStream(seed, "rank").generator()
    v1, v2 = gen.uniform(1, 2, 100_000), gen.uniform(1, 2, 100_000)
    w1, w2 = gen.uniform(1, 2, 100_000), gen.uniform(1, 2, 100_000)
    mask = w1 / v1 > w2 / v2
    rank = float((w1[mask] > w2[mask]).mean())
    # Independent uniform draws put this near 3/4 (weight and weight-per-value
    # are positively associated), which only makes the enforced online rule's
    # survival odds better than the even-coin heuristic.
    if not 0.70 <= rank <= 0.80:
        problems.append(f"rank statistic {rank:.3f} outside [0.70, 0.80]")
    inst_k = gen_knapsack_instance(kcfg, RngStream(seed, "kgen"))
    graph = knapsack_to_bipartite(inst_k)
    bench = evaluate(threshold(graph).matching, graph).value
    if max(it.value for it in inst_k.items) / bench > 0.1:
        problems.append("large-market proxy violated")

    gen2 = RngStream(seed, "ass2").generator()
    c1, c2 = gen2.uniform(0, 5, 100_000), gen2.uniform(0, 5, 100_000)
    u1, u2 = gen2.uniform(0, 20, 100_000), gen2.uniform(0, 20, 100_000)
    m2 = u1 > u2
    bid_rank = float((c1[m2] < c2[m2]).mean())
    if not 0.48 <= bid_rank <= 0.52:
        problems.append(f"bid rank statistic {bid_rank:.3f} not 1/2")
    return CheckResult(
        "harness.generators",
        not problems,
        "; ".join(problems) if problems else
        f"shape, determinism, rank {rank:.3f}, bid rank {bid_rank:.3f} ok",
    )


def check_reproducibility(seed: int = 0) -> CheckResult:
    """Identical config and seed produce identical experiment rows."""
    from .harness import run_experiment

    cfg = ExperimentConfig(
        kind="d2d", n_left=12, n_right=15, budget=15.0, trials=10, seed=seed,
        delta=(0.4, 0.8), value_range=(0.0, 10.0), bid_range=(0.0, 3.0),
    )
    rows1, sums1 = run_experiment(cfg)
    rows2, sums2 = run_experiment(cfg)
    ok = rows1 == rows2 and sums1 == sums2
    feasible = all(r["feasible"] for r in rows1)
    return CheckResult(
        "harness.reproducibility",
        ok and feasible,
        f"rows identical: {ok}; all feasible: {feasible}",
    )


def check_fig1_trend(seed: int = 0, trials: int = 200) -> CheckResult:
    """Relay-scenario sweep: mean ratio is monotone nondecreasing in delta up
    to one standard error, grows by at least 0.05 from 0.2 to 0.9, and stays
    inside [0.05, 0.6]."""
    from .harness import run_experiment

    cfg = ExperimentConfig(
        kind="d2d", n_left=50, n_right=100, budget=100.0, trials=trials,
        seed=seed, delta=tuple(round(0.1 * k, 1) for k in range(2, 10)),
        value_range=(0.0, 20.0), bid_range=(0.0, 5.0), baseline="threshold",
        algo="on-truth",
    )
    _rows, summaries = run_experiment(cfg)
    means = [s["mean_ratio"] for s in summaries]
    ses = [s["stderr_ratio"] for s in summaries]
    mono = all(
        means[i + 1] >= means[i] - (ses[i] + ses[i + 1])
        for i in range(len(means) - 1)
    )
    gap = means[-1] - means[0]
    in_band = all(0.05 <= m <= 0.6 for m in means)
    ok = mono and gap >= 0.05 and in_band
    return CheckResult(
        "harness.fig1_trend",
        ok,
        f"means {['%.3f' % m for m in means]}, gap {gap:.3f}, "
        f"monotone {mono}, band {in_band}",
    )


# ---------------------------------------------------------------------------
# Suite runner
# ---------------------------------------------------------------------------


def run_all(seed: int = 0, quick: bool = False, report: Callable = print) -> list:
    """Run every property suite; returns the list of CheckResult."""
    scale = 0.1 if quick else 1.0

    def n(x: int, lo: int = 20) -> int:
        return max(lo, int(x * scale))

    checks = [
        lambda: check_mapping_identity(seed, n(200)),
        lambda: check_permutation_uniformity(seed, n(100_000, 20_000)),
        lambda: check_threshold_budget(seed, n(1000), max_left=50 if not quick else 20),
        lambda: check_greedy_half_approx(seed, n(400)),
        lambda: check_appendix_a(seed, n(500)),
        lambda: check_lemma3_monotonicity(seed, n(1000)),
        lambda: check_lemma5_gamma_monotone(seed, n(1000)),
        lambda: check_sweep_prefix(seed, n(300)),
        lambda: check_bisect_crosscheck(seed, n(200)),
        lambda: check_on_budget(seed, n(1000)),
        lambda: check_virtual_dominance_sets(seed, n(1000)),
        lambda: check_virtual_dominance_counts(seed, n(1000)),
        lambda: check_virtual_dominance_per_vertex(seed, orders=n(1500, 200)),
        lambda: check_pruning_safety(seed, n(300)),
        lambda: check_eq1_selection_frequency(seed, n(2000, 400)),
        lambda: check_theorem1_statistic(seed, n(2000, 300)),
        lambda: check_truthful_run_invariants(seed, n(500)),
        lambda: check_monotone_selection(seed, n(1000)),
        lambda: check_critical_payment(seed, n(1000)),
        lambda: check_coupling(seed, n(1000)),
        lambda: check_one_coin_per_left(seed, n(300)),
        lambda: check_expectation_identity(seed, n(10_000, 1000)),
        lambda: check_monotone_growth(seed, n(3000, 500)),
        lambda: check_half_survival(seed, n(10_000, 1000)),
        lambda: check_generators(seed),
        lambda: check_reproducibility(seed),
        lambda: check_fig1_trend(seed, trials=40 if quick else 200),
    ]
    results = []
    for make in checks:
        res = make()
        results.append(res)
        report(str(res))
    failed = [r for r in results if not r.passed]
    report(f"{len(results) - len(failed)}/{len(results)} property suites passed")
    return results
