"""Shared domain model: instances, matchings, arrival orders, seeded RNG streams.

All reals are double precision.  Comparisons against the budget use the
absolute tolerance :data:`BUDGET_TOL`, applied only at the boundary of a
``<=`` / ``>=`` test.  Every type in this module is immutable after
construction and may be shared freely across workers.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

__all__ = [
    "UNBOUNDED",
    "BUDGET_TOL",
    "StructuralError",
    "SizeError",
    "GenerationError",
    "RngStream",
    "Item",
    "KnapsackInstance",
    "LeftVertex",
    "Edge",
    "BipartiteInstance",
    "ArrivalOrder",
    "Matching",
    "PseudoMatching",
    "EvalResult",
    "knapsack_to_bipartite",
    "evaluate",
    "is_knapsack_class",
    "instance_to_dict",
    "instance_from_dict",
    "save_instance",
    "load_instance",
]

#: Sentinel threshold meaning "no restriction": every edge is kept, and it
#: compares greater-or-equal to every finite threshold.
UNBOUNDED = math.inf

#: Absolute tolerance used at budget boundaries, so that summation rounding
#: never turns a feasible selection infeasible.
BUDGET_TOL = 1e-9


class StructuralError(ValueError):
    """An object references vertices or edges that the instance does not have."""


class SizeError(ValueError):
    """Instance is too large for an exhaustive oracle."""


class GenerationError(RuntimeError):
    """An instance generator could not satisfy its post-conditions."""


# ---------------------------------------------------------------------------
# Randomness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RngStream:
    """A named, splittable source of deterministic randomness.

    The pair ``(seed, label)`` fully determines the value sequence, on every
    platform and run.  Streams are split by deriving child labels, e.g. trial
    ``k`` of an experiment uses ``root.derive(f"trial:{k}")``, which makes
    parallel trials order independent.

    ``generator()`` returns a *fresh* NumPy generator each time it is called;
    callers that need a continuing sequence must hold on to the returned
    generator.
    """

    seed: int
    label: str = "root"

    def derive(self, label: str) -> "RngStream":
        return RngStream(self.seed, f"{self.label}/{label}")

    def generator(self) -> np.random.Generator:
        digest = hashlib.sha256(f"{self.seed}:{self.label}".encode()).digest()
        return np.random.default_rng(int.from_bytes(digest[:16], "little"))


# ---------------------------------------------------------------------------
# Knapsack side
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Item:
    """A knapsack element: positive value (utility) and weight (capacity units)."""

    id: int
    value: float
    weight: float

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"item id must be >= 0, got {self.id}")
        if not self.value > 0:
            raise ValueError(f"item value must be positive, got {self.value}")
        if not self.weight > 0:
            raise ValueError(f"item weight must be positive, got {self.weight}")

    @property
    def buck_per_bang(self) -> float:
        """Cost per unit utility, weight / value.  Lower is better."""
        return self.weight / self.value


@dataclass(frozen=True)
class KnapsackInstance:
    items: tuple
    capacity: float

    def __init__(self, items: Iterable[Item], capacity: float):
        object.__setattr__(self, "items", tuple(items))
        object.__setattr__(self, "capacity", float(capacity))
        if not self.capacity > 0:
            raise ValueError("capacity must be positive")
        ids = [it.id for it in self.items]
        if sorted(ids) != list(range(len(ids))):
            raise StructuralError("item ids must be unique and dense 0..n-1")
        for it in self.items:
            if it.weight > self.capacity:
                raise ValueError(
                    f"item {it.id} has weight {it.weight} > capacity {self.capacity}"
                )

    def __len__(self) -> int:
        return len(self.items)


# ---------------------------------------------------------------------------
# Bipartite side
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LeftVertex:
    id: int
    bid: float

    def __post_init__(self) -> None:
        if not self.bid > 0:
            raise ValueError(f"bid must be positive, got {self.bid}")


@dataclass(frozen=True)
class Edge:
    left: int
    right: int
    value: float

    def __post_init__(self) -> None:
        if not self.value > 0:
            raise ValueError(f"edge value must be positive, got {self.value}")


class _Columns(NamedTuple):
    """Array view of an instance, built once and reused by every algorithm.

    Edges appear in ``scan`` order: decreasing value, then lower buck per
    bang, then lower left id, then lower right id.  This is the single tie
    break rule used by every greedy pass in the package.
    """

    left_ids: np.ndarray          # (n_left,) vertex ids, instance order
    bids: np.ndarray              # (n_left,) aligned with left_ids
    index_of: dict                # left id -> row index
    e_left: np.ndarray            # (n_edges,) row index into bids
    e_left_id: np.ndarray         # (n_edges,) original left id
    e_right: np.ndarray           # (n_edges,) right id
    e_value: np.ndarray           # (n_edges,)
    e_bpb: np.ndarray             # (n_edges,) bid(left) / value
    scan: np.ndarray              # edge indices in greedy scan order
    breakpoints: np.ndarray       # sorted distinct buck-per-bang values
    scan_k0: np.ndarray           # per scan position: first breakpoint index >= bpb
    edge_map: dict                # (left id, right id) -> edge value
    uniform_complete: bool        # every left has one value and a full row of
                                  # edges, and rights never run out in greedy
    left_value: np.ndarray        # (n_left,) per-left edge value (uniform only)


@dataclass(frozen=True)
class BipartiteInstance:
    """Left vertices with bids, ``right_count`` anonymous right vertices,
    valued edges, and a total payment budget."""

    lefts: tuple
    right_count: int
    edges: tuple
    budget: float

    def __init__(
        self,
        lefts: Iterable[LeftVertex],
        right_count: int,
        edges: Iterable[Edge],
        budget: float,
    ):
        object.__setattr__(self, "lefts", tuple(lefts))
        object.__setattr__(self, "right_count", int(right_count))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "budget", float(budget))
        if self.right_count < 1:
            raise ValueError("right_count must be >= 1")
        if not self.budget > 0:
            raise ValueError("budget must be positive")
        object.__setattr__(self, "_cols", self._build_columns())

    def _build_columns(self) -> _Columns:
        left_ids = np.fromiter((v.id for v in self.lefts), dtype=np.int64,
                               count=len(self.lefts))
        bids = np.fromiter((v.bid for v in self.lefts), dtype=np.float64,
                           count=len(self.lefts))
        if len(set(left_ids.tolist())) != left_ids.size:
            raise StructuralError("left vertex ids must be unique")
        index_of = {int(i): k for k, i in enumerate(left_ids)}

        m = len(self.edges)
        e_left_id = np.fromiter((e.left for e in self.edges), dtype=np.int64, count=m)
        e_right = np.fromiter((e.right for e in self.edges), dtype=np.int64, count=m)
        e_value = np.fromiter((e.value for e in self.edges), dtype=np.float64, count=m)
        if m and (e_right.min() < 0 or e_right.max() >= self.right_count):
            raise StructuralError("edge references a right vertex out of range")
        try:
            e_left = np.fromiter((index_of[int(i)] for i in e_left_id),
                                 dtype=np.int64, count=m)
        except KeyError as exc:
            raise StructuralError(f"edge references unknown left vertex {exc}") from exc
        pair_key = e_left_id * (self.right_count + 1) + e_right
        if np.unique(pair_key).size != m:
            raise StructuralError("duplicate (left, right) edge")

        e_bpb = bids[e_left] / e_value if m else np.empty(0)
        # lexsort uses the last key as primary
        scan = np.lexsort((e_right, e_left_id, e_bpb, -e_value)) if m else np.empty(0, np.int64)
        breakpoints = np.unique(e_bpb)
        scan_k0 = np.searchsorted(breakpoints, e_bpb[scan]) if m else np.empty(0, np.int64)
        edge_map = {
            (int(l), int(r)): float(v)
            for l, r, v in zip(e_left_id, e_right, e_value)
        }

        uniform_complete = False
        left_value = np.empty(0)
        n = left_ids.size
        if m == n * self.right_count and n and self.right_count >= n:
            counts = np.zeros(n, dtype=np.int64)
            np.add.at(counts, e_left, 1)
            if (counts == self.right_count).all():
                vmin = np.full(n, np.inf)
                vmax = np.full(n, -np.inf)
                np.minimum.at(vmin, e_left, e_value)
                np.maximum.at(vmax, e_left, e_value)
                if (vmin == vmax).all():
                    uniform_complete = True
                    left_value = vmin
        return _Columns(
            left_ids, bids, index_of, e_left, e_left_id, e_right, e_value,
            e_bpb, scan, breakpoints, scan_k0, edge_map, uniform_complete,
            left_value,
        )

    # -- accessors ---------------------------------------------------------

    @property
    def n_left(self) -> int:
        return len(self.lefts)

    @property
    def left_ids(self) -> tuple:
        return tuple(int(i) for i in self._cols.left_ids)

    def bid_of(self, left_id: int) -> float:
        try:
            return float(self._cols.bids[self._cols.index_of[left_id]])
        except KeyError:
            raise StructuralError(f"unknown left vertex {left_id}") from None

    def buck_per_bang(self, edge: Edge) -> float:
        """bid(left) / value(edge): the spend per unit of utility."""
        return self.bid_of(edge.left) / edge.value

    def subgraph(self, left_ids: Iterable[int]) -> "BipartiteInstance":
        """Instance restricted to the given left vertices (original ids kept)."""
        keep = set(left_ids)
        unknown = keep.difference(self._cols.index_of)
        if unknown:
            raise StructuralError(f"unknown left vertices {sorted(unknown)}")
        return BipartiteInstance(
            (v for v in self.lefts if v.id in keep),
            self.right_count,
            (e for e in self.edges if e.left in keep),
            self.budget,
        )

    def with_bid(self, left_id: int, bid: float) -> "BipartiteInstance":
        """Copy of the instance with one left vertex's bid replaced."""
        if left_id not in self._cols.index_of:
            raise StructuralError(f"unknown left vertex {left_id}")
        return BipartiteInstance(
            (LeftVertex(v.id, bid) if v.id == left_id else v for v in self.lefts),
            self.right_count,
            self.edges,
            self.budget,
        )


# ---------------------------------------------------------------------------
# Arrival orders and matchings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArrivalOrder:
    """A permutation of the instance's left vertex ids; position 0 arrives first."""

    order: tuple

    def __init__(self, order: Iterable[int]):
        object.__setattr__(self, "order", tuple(int(i) for i in order))
        if len(set(self.order)) != len(self.order):
            raise ValueError("arrival order must be a permutation (each id once)")

    def __len__(self) -> int:
        return len(self.order)

    @classmethod
    def uniform(
        cls,
        left_ids: Sequence[int],
        rng: Union[RngStream, np.random.Generator],
    ) -> "ArrivalOrder":
        gen = rng.generator() if isinstance(rng, RngStream) else rng
        ids = np.sort(np.asarray(list(left_ids), dtype=np.int64))
        return cls(gen.permutation(ids))


def _degree_check(edges, left_once=True, right_once=True):
    lefts, rights = set(), set()
    for e in edges:
        if left_once and e.left in lefts:
            raise ValueError(f"left vertex {e.left} matched more than once")
        if right_once and e.right in rights:
            raise ValueError(f"right vertex {e.right} matched more than once")
        lefts.add(e.left)
        rights.add(e.right)


@dataclass(frozen=True)
class Matching:
    """Edge set in which every left and every right vertex appears at most once."""

    edges: tuple

    def __init__(self, edges: Iterable[Edge] = ()):
        canon = tuple(sorted(edges, key=lambda e: (e.left, e.right)))
        _degree_check(canon, left_once=True, right_once=True)
        object.__setattr__(self, "edges", canon)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    @property
    def value(self) -> float:
        return float(sum(e.value for e in self.edges))

    def left_ids(self) -> frozenset:
        return frozenset(e.left for e in self.edges)

    def right_ids(self) -> frozenset:
        return frozenset(e.right for e in self.edges)


@dataclass(frozen=True)
class PseudoMatching:
    """Edge set where lefts appear at most once but rights may repeat."""

    edges: tuple

    def __init__(self, edges: Iterable[Edge] = ()):
        canon = tuple(sorted(edges, key=lambda e: (e.left, e.right)))
        _degree_check(canon, left_once=True, right_once=False)
        object.__setattr__(self, "edges", canon)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    @property
    def value(self) -> float:
        return float(sum(e.value for e in self.edges))

    def left_ids(self) -> frozenset:
        return frozenset(e.left for e in self.edges)


class EvalResult(NamedTuple):
    value: float
    spend: float


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def knapsack_to_bipartite(k: KnapsackInstance) -> BipartiteInstance:
    """Map a knapsack instance to its equivalent bipartite matching instance.

    Each item becomes a left vertex bidding its weight; there are as many
    right vertices as items, and every (item, right) edge carries the item's
    value.  The payment budget equals the capacity, so any feasible matching
    spends exactly the weight of its selected items.
    """
    n = len(k.items)
    lefts = [LeftVertex(it.id, it.weight) for it in k.items]
    edges = [
        Edge(it.id, r, it.value) for it in k.items for r in range(n)
    ]
    return BipartiteInstance(lefts, n, edges, k.capacity)


def evaluate(
    m: Union[Matching, PseudoMatching], inst: BipartiteInstance
) -> EvalResult:
    """Total edge value and total bid spend of a (pseudo) matching.

    Raises StructuralError if any edge of ``m`` is not an edge of ``inst``.
    """
    edge_map = inst._cols.edge_map
    value = 0.0
    spend = 0.0
    for e in m.edges:
        have = edge_map.get((e.left, e.right))
        if have is None or have != e.value:
            raise StructuralError(f"edge {e} is not part of the instance")
        value += e.value
        spend += inst.bid_of(e.left)
    return EvalResult(value, spend)


def is_knapsack_class(inst: BipartiteInstance) -> bool:
    """True when the instance has the shape produced by knapsack_to_bipartite:
    one shared value on each left vertex's edges, a full row of edges per
    left, and at least as many rights as lefts."""
    return bool(inst._cols.uniform_complete)


# ---------------------------------------------------------------------------
# Instance files (JSON, one object per file)
# ---------------------------------------------------------------------------


def instance_to_dict(inst: Union[BipartiteInstance, KnapsackInstance]) -> dict:
    if isinstance(inst, KnapsackInstance):
        return {
            "kind": "knapsack",
            "capacity": inst.capacity,
            "items": [
                {"id": it.id, "value": it.value, "weight": it.weight}
                for it in inst.items
            ],
        }
    return {
        "kind": "bipartite",
        "budget": inst.budget,
        "lefts": [{"id": v.id, "bid": v.bid} for v in inst.lefts],
        "right_count": inst.right_count,
        "edges": [
            {"left": e.left, "right": e.right, "value": e.value}
            for e in inst.edges
        ],
    }


def instance_from_dict(data: dict) -> Union[BipartiteInstance, KnapsackInstance]:
    kind = data.get("kind")
    if kind == "knapsack":
        return KnapsackInstance(
            (Item(it["id"], it["value"], it["weight"]) for it in data["items"]),
            data["capacity"],
        )
    if kind == "bipartite":
        return BipartiteInstance(
            (LeftVertex(v["id"], v["bid"]) for v in data["lefts"]),
            data["right_count"],
            (Edge(e["left"], e["right"], e["value"]) for e in data["edges"]),
            data["budget"],
        )
    raise ValueError(f"unknown instance kind {kind!r}")


def save_instance(inst, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2)
        fh.write("\n")


def load_instance(path):
    with open(path) as fh:
        return instance_from_dict(json.load(fh))
