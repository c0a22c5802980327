"""Online knapsack selection in the random-arrival model.

``run_on`` watches an observation prefix of arrivals, prices the matched
right vertices from the threshold rule's offline matching, and then fills
those priced slots during the decision phase.  ``run_virtual`` is the
comparator used in the analysis: it keeps a reference set of prices and only
credits a selection while the current worst reference price still dates from
the observation phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    BUDGET_TOL,
    ArrivalOrder,
    BipartiteInstance,
    Edge,
    Matching,
    StructuralError,
    evaluate,
    is_knapsack_class,
)
from .offline import threshold

__all__ = [
    "PriceTable",
    "RunOutcome",
    "default_sample_size",
    "run_on",
    "run_virtual",
    "selection_probability_bound",
]


@dataclass(frozen=True)
class RunOutcome:
    """Result of one online run.

    ``payments`` is indexed by left vertex id (0 for unmatched vertices; all
    zeros for algorithms without a payment rule).  ``feasible`` compares the
    bid spend against the budget with the standard boundary tolerance.
    ``gamma_used`` is the cutoff estimated in the observation phase and
    ``t_used`` the number of observed arrivals.
    """

    selected: Matching
    payments: tuple
    value: float
    spend: float
    feasible: bool
    gamma_used: float
    t_used: int

    def to_dict(self) -> dict:
        return {
            "selected": [[e.left, e.right, e.value] for e in self.selected],
            "payments": list(self.payments),
            "value": self.value,
            "spend": self.spend,
            "feasible": self.feasible,
            "gamma": self.gamma_used,
            "t": self.t_used,
        }


class PriceTable:
    """Per right-vertex price/cost slots set from an offline matching.

    A slot is priced (price > 0) exactly when its right vertex was matched
    offline; a consumed slot is never reused.
    """

    def __init__(self, matching: Matching, inst: BipartiteInstance):
        self.price = [0.0] * inst.right_count
        self.cost = [0.0] * inst.right_count
        self.used = [False] * inst.right_count
        for e in matching:
            bid = inst.bid_of(e.left)
            self.price[e.right] = bid / e.value
            self.cost[e.right] = bid
        # slots ordered by (price, right id); take() scans for the smallest
        self._slots = sorted(
            (self.price[r], r) for r in range(inst.right_count) if self.price[r] > 0
        )

    def slot_rights(self) -> list:
        return [r for _, r in self._slots]

    def take(self, bpb: float, weight: float, enforce_cost: bool) -> Optional[int]:
        """Consume and return the unused slot with the smallest price such
        that ``bpb < price`` and (when enforced) ``weight < cost``; None when
        no slot qualifies.  Both comparisons are strict."""
        for price, r in self._slots:
            if self.used[r]:
                continue
            if bpb < price and (not enforce_cost or weight < self.cost[r]):
                self.used[r] = True
                return r
        return None


def default_sample_size(n: int) -> int:
    """Observation-phase length maximizing the selection bound: round(n / e),
    ties to nearest even."""
    return round(n / math.e)


def _check_run_inputs(inst: BipartiteInstance, order: ArrivalOrder, t) -> int:
    if not is_knapsack_class(inst):
        raise ValueError(
            "run requires a knapsack-class instance "
            "(uniform per-left edge values, full rows, enough rights)"
        )
    n = len(inst.lefts)
    if sorted(order.order) != sorted(inst.left_ids):
        raise StructuralError("arrival order does not cover the instance's lefts")
    if t is None:
        t = default_sample_size(n)
    if not 0 <= t <= n:
        raise ValueError(f"t must be in [0, {n}], got {t}")
    return t


def _left_lookup(inst: BipartiteInstance):
    cols = inst._cols
    value_of = {
        int(i): float(v) for i, v in zip(cols.left_ids, cols.left_value)
    }
    bid_of = {int(i): float(b) for i, b in zip(cols.left_ids, cols.bids)}
    return value_of, bid_of


def run_on(
    inst: BipartiteInstance,
    order: ArrivalOrder,
    t: Optional[int] = None,
    enforce_cost: bool = True,
) -> RunOutcome:
    """Observe ``t`` arrivals, price slots from the threshold matching on the
    observed subgraph, then match each later arrival to the cheapest unused
    slot whose price beats its buck per bang (and whose cost exceeds its
    weight, unless ``enforce_cost`` is off).

    Arrivals with buck per bang above the estimated cutoff are pruned
    outright.  With cost enforcement on, the total weight of selections never
    exceeds the budget (each selection weighs less than its slot's cost, and
    the slot costs sum to at most the budget).
    """
    t = _check_run_inputs(inst, order, t)
    value_of, bid_of = _left_lookup(inst)
    thr = threshold(inst.subgraph(order.order[:t]), inst.budget)
    table = PriceTable(thr.matching, inst)
    n = len(inst.lefts)
    payments = [0.0] * n
    picked = []
    for pos in range(t, n):
        lid = order.order[pos]
        weight = bid_of[lid]
        bpb = weight / value_of[lid]
        if bpb > thr.gamma:
            continue  # pruned
        r = table.take(bpb, weight, enforce_cost)
        if r is not None:
            picked.append(Edge(lid, r, value_of[lid]))
    selected = Matching(picked)
    value, spend = evaluate(selected, inst)
    return RunOutcome(
        selected=selected,
        payments=tuple(payments),
        value=value,
        spend=spend,
        feasible=spend <= inst.budget + BUDGET_TOL,
        gamma_used=thr.gamma,
        t_used=t,
    )


def run_virtual(
    inst: BipartiteInstance,
    order: ArrivalOrder,
    t: Optional[int] = None,
) -> frozenset:
    """Reference-set comparator for the analysis; returns selected left ids.

    The observation phase fills a reference set with the priced slots.  A
    decision arrival beating the current largest reference price always
    replaces that price, but is credited as selected only while the displaced
    price still dates from the observation phase.  No budget bookkeeping.
    """
    t = _check_run_inputs(inst, order, t)
    value_of, bid_of = _left_lookup(inst)
    thr = threshold(inst.subgraph(order.order[:t]), inst.budget)
    # (price, right id, from observation phase); ties on price broken toward
    # the lower right id when locating the largest price
    refs = []
    for e in thr.matching:
        refs.append([inst.bid_of(e.left) / e.value, e.right, True])
    selected = set()
    n = len(inst.lefts)
    for pos in range(t, n):
        if not refs:
            break
        lid = order.order[pos]
        bpb = bid_of[lid] / value_of[lid]
        worst = max(refs, key=lambda s: (s[0], -s[1]))
        if bpb < worst[0]:
            if worst[2]:
                selected.add(lid)
            worst[0] = bpb
            worst[2] = False
    return frozenset(selected)


def selection_probability_bound(n: int, t: int) -> float:
    """Analytic lower bound (t/n) * ln(n/t) on the probability that a target
    vertex arriving after the observation phase is selected."""
    if not (isinstance(n, int) and isinstance(t, int) and 1 <= t < n):
        raise ValueError(f"need integers 1 <= t < n, got t={t}, n={n}")
    return (t / n) * math.log(n / t)
