"""Knapsack instances as budgeted bipartite matching.

Every item becomes a left vertex bidding its weight, with one edge of the
item's value to each of n right vertices; the capacity becomes the payment
budget.  Selecting items under the weight budget and matching left vertices
under the bid budget are then the same problem.
"""

from secmatch import (
    Edge,
    Item,
    KnapsackInstance,
    Matching,
    brute_force_opt,
    evaluate,
    is_knapsack_class,
    knapsack_to_bipartite,
)

items = [Item(0, 4.0, 2.0), Item(1, 3.0, 1.5), Item(2, 5.0, 4.0)]
inst = KnapsackInstance(items, capacity=5.0)
graph = knapsack_to_bipartite(inst)

print(f"{len(items)} items -> {len(graph.lefts)} lefts, "
      f"{graph.right_count} rights, {len(graph.edges)} edges")
print("knapsack-shaped graph:", is_knapsack_class(graph))

# pick items 0 and 1 by matching them to any two distinct rights
chosen = Matching([Edge(0, 0, 4.0), Edge(1, 1, 3.0)])
value, spend = evaluate(chosen, graph)
print(f"matching {{0, 1}}: value {value} (= 4 + 3), spend {spend} (= 2 + 1.5)")

opt = brute_force_opt(graph)
print(f"exact optimum: items {sorted(opt.left_ids())}, value {opt.value}")

# the adversarial two-item configuration: a dominant item takes the whole
# budget, so any rule built on spend rates must leave most value behind
dominant = knapsack_to_bipartite(
    KnapsackInstance([Item(0, 1.0, 1.0), Item(1, 9.0, 10.0)], 10.0)
)
opt2 = brute_force_opt(dominant)
print(f"dominant-item instance: optimum takes item {sorted(opt2.left_ids())} "
      f"worth {opt2.value} (no large-market headroom here)")
