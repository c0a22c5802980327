"""Coupled simulation constructs used to reason about the mechanism.

``simulate`` replays the greedy scan on a cutoff-restricted graph and routes
each newly assigned left vertex to one of two piles by a per-vertex coin:
heads build a proper matching, tails build a pseudo matching (rights may
repeat).  ``sample_and_permute`` runs the same split through the mechanism's
offline/decision structure.  Coins are addressed by left vertex id, never by
scan position, so runs that share a coin stream are coupled edge for edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    ArrivalOrder,
    BipartiteInstance,
    Edge,
    Matching,
    PseudoMatching,
    RngStream,
)
from .offline import restrict, threshold

__all__ = [
    "SimulateResult",
    "SampleAndPermuteResult",
    "IdentityEstimate",
    "SurvivalEstimate",
    "simulate",
    "sample_and_permute",
    "estimate_expectation_identity",
    "estimate_half_survival",
]


class SimulateResult(NamedTuple):
    m1s: Matching
    m2s: PseudoMatching


class SampleAndPermuteResult(NamedTuple):
    m1p: Matching
    m2p: PseudoMatching
    m3p: Matching
    gamma_prime: float


class IdentityEstimate(NamedTuple):
    mean1: float
    mean2: float
    stderr: float


class SurvivalEstimate(NamedTuple):
    mean_m3: float
    mean_m2: float
    stderr: float


def _coins_by_left_id(inst: BipartiteInstance, coins, p: float):
    """Heads outcomes addressed by left id.

    ``coins`` is either a stream (one draw per id, so the vector does not
    depend on consumption order) or an explicit boolean vector, which lets
    callers couple runs through shared or doctored coins; an explicit vector
    ignores ``p``.
    """
    top = max(inst.left_ids, default=-1) + 1
    if isinstance(coins, RngStream):
        return coins.generator().random(top) < p
    flips = np.asarray(coins, dtype=bool)
    if flips.shape[0] < top:
        raise ValueError(f"coin vector must cover left ids up to {top - 1}")
    return flips


def simulate(
    inst: BipartiteInstance,
    gamma: float,
    p: float,
    coins: RngStream,
) -> SimulateResult:
    """Coin-split greedy scan on the gamma-restricted graph.

    Edges are scanned in decreasing value (standard tie break).  An edge is
    taken when its left vertex is still unassigned and the heads-side
    matching stays a matching; the left vertex's coin (one per vertex,
    addressed by id) then routes the edge to the heads matching or the tails
    pseudo matching.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p must be a probability, got {p}")
    heads = _coins_by_left_id(inst, coins, p)
    g = restrict(inst, gamma)
    cols = g._cols
    assigned = set()
    m1_rights = set()
    m1, m2 = [], []
    for i in cols.scan.tolist():
        e = g.edges[i]
        if e.left in assigned or e.right in m1_rights:
            continue
        assigned.add(e.left)
        if heads[e.left]:
            m1.append(e)
            m1_rights.add(e.right)
        else:
            m2.append(e)
    return SimulateResult(Matching(m1), PseudoMatching(m2))


def sample_and_permute(
    inst: BipartiteInstance,
    membership_coins: RngStream,
    order: ArrivalOrder,
) -> SampleAndPermuteResult:
    """Mechanism-shaped split: heads lefts form the offline side, the
    threshold rule on them fixes the cutoff and rewards, and the remaining
    lefts arrive in ``order``.

    Each arrival keeps only edges within the cutoff and proposes its
    largest-value edge meeting the right vertex's reward: the proposal always
    joins the pseudo matching, and joins the proper matching only while that
    stays a matching.  ``gamma_prime`` is the cutoff actually used for the
    pruning, which is also the restriction level that reproduces the offline
    matching (see ThresholdResult.cutoff), so a ``simulate`` run sharing the
    coins and fed ``gamma_prime`` reproduces both piles exactly.
    """
    heads = _coins_by_left_id(inst, membership_coins, 0.5)
    offline_ids = [i for i in inst.left_ids if heads[i]]
    thr = threshold(inst.subgraph(offline_ids), inst.budget)
    cutoff = thr.cutoff
    reward = [0.0] * inst.right_count
    for e in thr.matching:
        reward[e.right] = e.value

    edge_map = inst._cols.edge_map
    bid_of = {int(i): inst.bid_of(int(i)) for i in inst.left_ids}
    m2, m3 = [], []
    m3_rights = set()
    for lid in order.order:
        if heads[lid]:
            continue
        bid = bid_of[lid]
        best = None  # largest value, then lower right id
        for r in range(inst.right_count):
            v = edge_map.get((lid, r))
            if v is None or bid / v > cutoff:
                continue
            if v < reward[r]:
                continue
            if best is None or (v, -r) > (best[2], -best[1]):
                best = (lid, r, v)
        if best is None:
            continue
        e = Edge(*best)
        m2.append(e)
        if e.right not in m3_rights:
            m3_rights.add(e.right)
            m3.append(e)
    return SampleAndPermuteResult(
        thr.matching, PseudoMatching(m2), Matching(m3), cutoff
    )


def estimate_expectation_identity(
    inst: BipartiteInstance,
    gamma_fixed: float,
    trials: int,
    seed: int,
) -> IdentityEstimate:
    """Monte-Carlo means of the two pile values at p = 1/2 under a cutoff
    chosen independently of the coins.

    When the cutoff is coin-independent the two piles have equal expected
    value; the returned stderr is that of the per-trial difference, the right
    scale for testing ``mean1 == mean2``.  The estimator itself runs for any
    cutoff, including coin-dependent ones where the identity need not hold.
    """
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    root = RngStream(seed, "identity")
    v1 = np.empty(trials)
    v2 = np.empty(trials)
    for k in range(trials):
        res = simulate(inst, gamma_fixed, 0.5, root.derive(f"trial:{k}"))
        v1[k] = res.m1s.value
        v2[k] = res.m2s.value
    diff = v1 - v2
    stderr = float(diff.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return IdentityEstimate(float(v1.mean()), float(v2.mean()), stderr)


def estimate_half_survival(
    inst: BipartiteInstance,
    trials: int,
    seed: int,
) -> SurvivalEstimate:
    """Monte-Carlo means of the proper and pseudo decision-phase matchings
    over fresh coins and uniform arrival orders.

    The pruning from pseudo to proper depends only on the relative arrival
    order, and on average retains at least half the pseudo value; the
    returned stderr is that of the per-trial statistic
    ``value(m3p) - value(m2p) / 2``.
    """
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    root = RngStream(seed, "survival")
    v3 = np.empty(trials)
    v2 = np.empty(trials)
    for k in range(trials):
        stream = root.derive(f"trial:{k}")
        order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
        res = sample_and_permute(inst, stream.derive("coins"), order)
        v3[k] = res.m3p.value
        v2[k] = res.m2p.value
    stat = v3 - v2 / 2.0
    stderr = float(stat.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return SurvivalEstimate(float(v3.mean()), float(v2.mean()), stderr)
