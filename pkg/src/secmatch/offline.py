"""Offline subroutines: greedy matching, threshold restriction, the budgeted
threshold rule, and exact small-instance oracles.

The threshold rule finds the largest buck-per-bang cutoff ``gamma`` such that
the greedy matching on the cutoff-restricted graph fits the budget when each
matched edge is charged ``gamma * value``.  Because the greedy matching is
piecewise constant in the cutoff, the search sweeps the sorted distinct
buck-per-bang values (the breakpoints) exactly instead of bisecting a
continuous interval; a bisection variant is kept as a cross check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    BUDGET_TOL,
    UNBOUNDED,
    BipartiteInstance,
    Edge,
    Matching,
    SizeError,
    evaluate,
)

__all__ = [
    "ThresholdResult",
    "OptSplit",
    "greedy_matching",
    "restrict",
    "threshold",
    "threshold_bisect",
    "brute_force_opt",
    "decompose_opt",
]


@dataclass(frozen=True)
class ThresholdResult:
    """Output of the threshold rule.

    ``gamma`` is the supremum of the feasible cutoff set (UNBOUNDED when the
    instance has no edges).  When that supremum is not attained, the greedy
    matching just below it differs from the one at ``gamma``; ``matching`` is
    always the feasible one, computed at ``cutoff``, a representative point
    inside the last feasible breakpoint interval.  ``matching`` therefore
    always equals ``greedy_matching(restrict(inst, cutoff))``.
    """

    gamma: float
    matching: Matching
    cutoff: float

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.gamma)


class OptSplit(NamedTuple):
    opt_plus_value: float
    opt_minus_value: float


# ---------------------------------------------------------------------------
# Greedy matching
# ---------------------------------------------------------------------------


def _greedy_edge_indices(inst: BipartiteInstance, cutoff: float) -> list:
    """Indices (into inst.edges) picked by the greedy scan at the given cutoff.

    Edges are scanned in decreasing value (ties: lower buck per bang, lower
    left id, lower right id); an edge is taken iff both endpoints are free.
    """
    cols = inst._cols
    left_used = bytearray(len(inst.lefts))
    right_used = bytearray(inst.right_count)
    bpb = cols.e_bpb
    e_left = cols.e_left
    e_right = cols.e_right
    picked = []
    for i in cols.scan.tolist():
        if bpb[i] > cutoff:
            continue
        l = e_left[i]
        r = e_right[i]
        if left_used[l] or right_used[r]:
            continue
        left_used[l] = 1
        right_used[r] = 1
        picked.append(i)
    return picked


def greedy_matching(inst: BipartiteInstance) -> Matching:
    """Maximal matching from the greedy scan over all edges."""
    return Matching(inst.edges[i] for i in _greedy_edge_indices(inst, UNBOUNDED))


def restrict(inst: BipartiteInstance, gamma: float) -> BipartiteInstance:
    """Drop every edge whose buck per bang exceeds ``gamma``; vertices stay.

    ``gamma`` may be UNBOUNDED (keep everything) but not negative.
    """
    if not gamma >= 0:
        raise ValueError(f"gamma must be >= 0 or UNBOUNDED, got {gamma}")
    cols = inst._cols
    keep = [e for e, b in zip(inst.edges, cols.e_bpb) if b <= gamma]
    return BipartiteInstance(inst.lefts, inst.right_count, keep, inst.budget)


# ---------------------------------------------------------------------------
# Breakpoint sweep
# ---------------------------------------------------------------------------


def _sweep_greedy_values(inst: BipartiteInstance) -> np.ndarray:
    """Greedy matching value at every breakpoint cutoff, in one pass.

    All breakpoints are simulated simultaneously: the boolean free/used state
    is kept per breakpoint column, and each edge updates the suffix of
    columns whose cutoff admits it.  Column k reproduces exactly the greedy
    scan on the graph restricted at breakpoints[k].
    """
    cols = inst._cols
    bp = cols.breakpoints
    k_total = bp.size
    if k_total == 0:
        return np.empty(0)
    if cols.uniform_complete:
        # Rights never run out, so greedy matches every left whose buck per
        # bang clears the cutoff: the value is a cumulative sum over lefts
        # sorted by buck per bang.
        left_bpb = cols.bids / cols.left_value
        order = np.argsort(left_bpb, kind="stable")
        csum = np.cumsum(cols.left_value[order])
        idx = np.searchsorted(left_bpb[order], bp, side="right") - 1
        return csum[idx]
    left_free = np.ones((len(inst.lefts), k_total), dtype=bool)
    right_free = np.ones((inst.right_count, k_total), dtype=bool)
    values = np.zeros(k_total)
    e_left = cols.e_left
    e_right = cols.e_right
    e_value = cols.e_value
    for i, k0 in zip(cols.scan.tolist(), cols.scan_k0.tolist()):
        l = e_left[i]
        r = e_right[i]
        take = left_free[l, k0:] & right_free[r, k0:]
        if not take.any():
            continue
        left_free[l, k0:] &= ~take
        right_free[r, k0:] &= ~take
        values[k0:][take] += e_value[i]
    return values


def threshold(inst: BipartiteInstance, budget: Optional[float] = None) -> ThresholdResult:
    """Largest feasible buck-per-bang cutoff and the greedy matching it certifies.

    Feasibility of a cutoff g means sum(g * value(e)) <= budget over the
    greedy matching of the g-restricted graph.  The feasible set is an
    interval starting at 0 (asserted on every sweep); the returned ``gamma``
    is its supremum, ``min(budget / V_i, next breakpoint)`` inside the last
    feasible breakpoint interval, or ``budget / V`` when every breakpoint is
    feasible.  No edges at all yields (UNBOUNDED, empty matching).
    """
    budget = inst.budget if budget is None else float(budget)
    if not budget > 0:
        raise ValueError(f"budget must be positive, got {budget}")
    bp = inst._cols.breakpoints
    if bp.size == 0:
        return ThresholdResult(UNBOUNDED, Matching(), UNBOUNDED)
    values = _sweep_greedy_values(inst)
    feasible = bp * values <= budget + BUDGET_TOL
    n_feasible = int(np.count_nonzero(feasible))
    # Once infeasible the sweep never becomes feasible again; the feasible
    # breakpoints must form a prefix.
    assert bool(feasible[:n_feasible].all()), "feasibility is not prefix-shaped"
    if n_feasible == 0:
        # Only cutoffs below the first breakpoint (empty matching) fit.
        return ThresholdResult(float(bp[0]), Matching(), 0.0)
    i = n_feasible - 1
    if i + 1 < bp.size:
        gamma = min(budget / values[i], float(bp[i + 1]))
    else:
        gamma = budget / values[i]
    cutoff = float(bp[i])
    matching = Matching(inst.edges[j] for j in _greedy_edge_indices(inst, cutoff))
    return ThresholdResult(float(gamma), matching, cutoff)


def threshold_bisect(
    inst: BipartiteInstance,
    budget: Optional[float] = None,
    rounds: int = 200,
) -> ThresholdResult:
    """Cross-check variant: continuous bisection on the cutoff.

    Converges to the same supremum as the breakpoint sweep (to float
    precision); the sweep remains the primary method because it is exact.
    """
    budget = inst.budget if budget is None else float(budget)
    if not budget > 0:
        raise ValueError(f"budget must be positive, got {budget}")
    cols = inst._cols
    bp = cols.breakpoints
    if bp.size == 0:
        return ThresholdResult(UNBOUNDED, Matching(), UNBOUNDED)

    def greedy_value(cutoff: float) -> float:
        return float(sum(cols.e_value[i] for i in _greedy_edge_indices(inst, cutoff)))

    def feasible(cutoff: float) -> bool:
        return cutoff * greedy_value(cutoff) <= budget + BUDGET_TOL

    top = float(bp[-1])
    if feasible(top):
        gamma = budget / greedy_value(top)
        matching = Matching(inst.edges[j] for j in _greedy_edge_indices(inst, top))
        return ThresholdResult(float(gamma), matching, top)
    lo, hi = 0.0, top
    for _ in range(rounds):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    matching = Matching(inst.edges[j] for j in _greedy_edge_indices(inst, lo))
    return ThresholdResult(hi, matching, lo)


# ---------------------------------------------------------------------------
# Exact oracle and decomposition
# ---------------------------------------------------------------------------


def brute_force_opt(
    inst: BipartiteInstance,
    budget: Optional[float] = None,
    max_lefts: int = 20,
) -> Matching:
    """Maximum-value matching with total bid spend at most the budget.

    Exhaustive over subsets of left vertices (only budget-maximal ones need
    an assignment solve), with a maximum-weight assignment per subset.  Ties
    in value are broken toward the lexicographically smallest edge set.
    Guarded: raises SizeError above ``max_lefts`` left vertices.
    """
    from scipy.optimize import linear_sum_assignment

    budget = inst.budget if budget is None else float(budget)
    n = len(inst.lefts)
    if n > max_lefts or inst.right_count > 4096:
        raise SizeError(
            f"exhaustive oracle guarded at {max_lefts} lefts / 4096 rights, "
            f"got {n} x {inst.right_count}"
        )
    cols = inst._cols
    bids = cols.bids
    left_ids = cols.left_ids
    # Dense value matrix; absent edges stay at 0 and can never displace a
    # real edge in a maximizing assignment.
    full = np.zeros((n, inst.right_count))
    full[cols.e_left, cols.e_right] = cols.e_value

    best_value = 0.0
    best_edges: tuple = ()
    for mask in range(1 << n):
        rows = [i for i in range(n) if mask >> i & 1]
        spend = float(bids[rows].sum())
        if spend > budget + BUDGET_TOL:
            continue
        maximal = all(
            mask >> j & 1 or spend + bids[j] > budget + BUDGET_TOL
            for j in range(n)
        )
        if not maximal and mask:
            continue
        if not rows:
            continue
        sub = full[rows, :]
        ri, ci = linear_sum_assignment(sub, maximize=True)
        value = float(sub[ri, ci].sum())
        edges = tuple(
            sorted(
                (int(left_ids[rows[a]]), int(b))
                for a, b in zip(ri, ci)
                if sub[a, b] > 0
            )
        )
        if value > best_value + 1e-12 or (
            abs(value - best_value) <= 1e-12 and edges and edges < best_edges
        ):
            best_value = value
            best_edges = edges
    return Matching(
        Edge(l, r, cols.edge_map[(l, r)]) for l, r in best_edges
    )


def decompose_opt(opt: Matching, gamma: float, inst: BipartiteInstance) -> OptSplit:
    """Split a matching's value by buck per bang: above ``gamma`` vs at most
    ``gamma``.  The boundary (exactly ``gamma``) counts toward the low side,
    matching the convention that a restricted graph keeps its boundary edges.
    """
    if not math.isfinite(gamma):
        raise ValueError("gamma must be finite")
    evaluate(opt, inst)  # structural check
    plus = 0.0
    minus = 0.0
    for e in opt.edges:
        if inst.buck_per_bang(e) > gamma:
            plus += e.value
        else:
            minus += e.value
    return OptSplit(plus, minus)
