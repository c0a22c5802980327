"""Truthful budgeted matching mechanism with payments.

The mechanism observes a Binomial(n, 1/2)-sized arrival prefix, computes the
threshold rule's matching on it, and turns each offline-matched right vertex
into a reward slot (reward = matched edge value, cost = matched bid).  A
decision-phase arrival is matched to the unused slot of largest edge value
among those whose reward it meets and, when cost enforcement is on, whose
cost covers its bid; it is then paid cutoff * value, which can never fall
below its bid.  The replay verifiers check the two truthfulness conditions:
bidding lower keeps a winner winning, and bidding above the payment makes it
lose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import (
    BUDGET_TOL,
    ArrivalOrder,
    BipartiteInstance,
    Edge,
    Matching,
    RngStream,
    StructuralError,
    evaluate,
)
from .offline import threshold
from .online_knapsack import RunOutcome

__all__ = [
    "RewardTable",
    "run_on_truth",
    "check_monotone",
    "critical_payment_check",
]


class RewardTable:
    """Per right-vertex reward/cost slots set from the offline matching;
    reward > 0 exactly on offline-matched rights, and a consumed slot is
    never reused."""

    def __init__(self, matching: Matching, inst: BipartiteInstance):
        self.reward = [0.0] * inst.right_count
        self.cost = [0.0] * inst.right_count
        self.used = [False] * inst.right_count
        for e in matching:
            self.reward[e.right] = e.value
            self.cost[e.right] = inst.bid_of(e.left)
        self.rewarded = [r for r in range(inst.right_count) if self.reward[r] > 0]


def _membership_coins(inst: BipartiteInstance, coins: RngStream):
    """One fair coin per left vertex, addressed by id (not by draw order)."""
    gen = coins.generator()
    top = max(inst.left_ids, default=-1) + 1
    flips = gen.random(top) < 0.5
    return flips


def run_on_truth(
    inst: BipartiteInstance,
    order: ArrivalOrder,
    coins: RngStream,
    enforce_cost: bool = True,
) -> RunOutcome:
    """One run of the mechanism; returns selections and per-left payments.

    The offline prefix length is the number of heads among one fair coin per
    left vertex (equal in law to Binomial(n, 1/2); the same coins double as
    the per-vertex membership vector used by the analysis couplings).  With
    no offline matching there are no reward slots and nothing can be
    accepted, in either enforcement mode.
    """
    n = len(inst.lefts)
    if sorted(order.order) != sorted(inst.left_ids):
        raise StructuralError("arrival order does not cover the instance's lefts")
    if set(inst.left_ids) != set(range(n)):
        raise StructuralError("payments need dense left ids 0..n-1")
    k = int(_membership_coins(inst, coins).sum())
    thr = threshold(inst.subgraph(order.order[:k]), inst.budget)
    table = RewardTable(thr.matching, inst)
    edge_map = inst._cols.edge_map

    payments = [0.0] * n
    picked = []
    for pos in range(k, n):
        lid = order.order[pos]
        bid = inst.bid_of(lid)
        best = None  # (value, reward, right)
        for r in table.rewarded:
            if table.used[r]:
                continue
            v = edge_map.get((lid, r))
            if v is None or bid / v > thr.gamma:  # pruning: spend rate over cutoff
                continue
            if v < table.reward[r]:
                continue
            if enforce_cost and bid > table.cost[r]:
                continue
            key = (v, table.reward[r], -r)
            if best is None or key > best[0]:
                best = (key, r, v)
        if best is None:
            continue
        _, r, v = best
        table.used[r] = True
        pay = thr.gamma * v
        assert pay >= bid - 1e-12, "payment fell below the accepted bid"
        payments[lid] = pay
        picked.append(Edge(lid, r, v))
    selected = Matching(picked)
    value, spend = evaluate(selected, inst)
    return RunOutcome(
        selected=selected,
        payments=tuple(payments),
        value=value,
        spend=spend,
        feasible=spend <= inst.budget + BUDGET_TOL,
        gamma_used=thr.gamma,
        t_used=k,
    )


def _reference_run(inst, order, coins, left_id, enforce_cost):
    ref = run_on_truth(inst, order, coins, enforce_cost)
    if left_id not in ref.selected.left_ids():
        raise ValueError(f"left vertex {left_id} is not selected in the reference run")
    return ref


def check_monotone(
    inst: BipartiteInstance,
    order: ArrivalOrder,
    coins: RngStream,
    left_id: int,
    lower_bid: float,
    enforce_cost: bool = True,
) -> bool:
    """Replay with one winner's bid lowered; True iff it still wins.

    A truthful selection rule must always return True here.
    """
    _reference_run(inst, order, coins, left_id, enforce_cost)
    if not 0 < lower_bid < inst.bid_of(left_id):
        raise ValueError("lower_bid must be positive and below the current bid")
    replay = run_on_truth(inst.with_bid(left_id, lower_bid), order, coins, enforce_cost)
    return left_id in replay.selected.left_ids()


def critical_payment_check(
    inst: BipartiteInstance,
    order: ArrivalOrder,
    coins: RngStream,
    left_id: int,
    eps: float = 1e-6,
    enforce_cost: bool = True,
) -> bool:
    """Replay with one winner bidding just above its payment; True iff it
    loses, i.e. the payment is the winner's critical value."""
    ref = _reference_run(inst, order, coins, left_id, enforce_cost)
    raised = ref.payments[left_id] * (1.0 + eps)
    replay = run_on_truth(inst.with_bid(left_id, raised), order, coins, enforce_cost)
    return left_id not in replay.selected.left_ids()
