import pytest

from secmatch import (
    ArrivalOrder,
    BipartiteInstance,
    Edge,
    Item,
    KnapsackInstance,
    LeftVertex,
    knapsack_to_bipartite,
)


@pytest.fixture
def two_item_instance():
    """The adversarial two-item instance: a cheap unit item and a dominant
    item worth 9 weighing 10, at capacity 10."""
    return KnapsackInstance([Item(0, 1.0, 1.0), Item(1, 9.0, 10.0)], 10.0)


@pytest.fixture
def two_item_graph(two_item_instance):
    return knapsack_to_bipartite(two_item_instance)


@pytest.fixture
def price_demo_graph():
    """Four-item instance engineered so an observation prefix of two prices
    the slots at 1/5 and 1/6, and the two decision arrivals (spend rates
    1/5.1 and 1/7, lighter than the slot costs) both fit."""
    items = [
        Item(0, 5.0, 1.0),     # price 1/5 slot
        Item(1, 6.0, 1.0),     # price 1/6 slot
        Item(2, 4.59, 0.9),    # b = 1/5.1
        Item(3, 5.6, 0.8),     # b = 1/7
    ]
    return knapsack_to_bipartite(KnapsackInstance(items, 100.0))


@pytest.fixture
def price_demo_order():
    return ArrivalOrder([0, 1, 2, 3])


@pytest.fixture
def tiny_graph():
    """Two lefts, two rights, three edges; greedy takes 5 and blocks the
    4 + 3 = 7 matching."""
    return BipartiteInstance(
        [LeftVertex(0, 1.0), LeftVertex(1, 1.0)],
        2,
        [Edge(0, 0, 5.0), Edge(0, 1, 4.0), Edge(1, 0, 3.0)],
        10.0,
    )
