"""The truthful budgeted matching mechanism and its two replay tests.

A Binomial(n, 1/2) prefix of arrivals is observed; the threshold rule on it
fixes the cutoff and turns each offline-matched right vertex into a reward
slot.  A later arrival wins the best unused slot whose reward its edge value
meets and whose cost covers its bid, and is paid cutoff * value, never less
than its bid.  Lowering a winner's bid keeps it winning; bidding above its
payment makes it lose: together these are exactly the two conditions that
make truthful reporting optimal.
"""

from secmatch import (
    ArrivalOrder,
    RngStream,
    check_monotone,
    critical_payment_check,
    run_on_truth,
)
from secmatch.harness import ExperimentConfig, gen_d2d_instance

cfg = ExperimentConfig(
    kind="d2d", n_left=10, n_right=10, budget=12.0, trials=1, seed=3,
    delta=0.8, value_range=(0.0, 10.0), bid_range=(0.0, 4.0),
)
stream = RngStream(3, "demo4")
inst = gen_d2d_instance(cfg, stream.derive("inst"), 0.8)
order = ArrivalOrder.uniform(inst.left_ids, stream.derive("order"))
coins = stream.derive("coins")

out = run_on_truth(inst, order, coins)
print(f"observed prefix: {out.t_used} of {len(inst.lefts)}; "
      f"cutoff {out.gamma_used:.3f}")
print(f"matched {len(out.selected)} vertices, value {out.value:.2f}, "
      f"bid spend {out.spend:.2f} <= budget {inst.budget}")
for e in out.selected:
    print(f"  vertex {e.left}: bid {inst.bid_of(e.left):.2f} -> "
          f"paid {out.payments[e.left]:.2f} (edge value {e.value:.2f})")

winner = min(out.selected.left_ids())
lower = inst.bid_of(winner) / 2
print(f"\nvertex {winner} bidding {lower:.2f} instead: still wins -> "
      f"{check_monotone(inst, order, coins, winner, lower)}")
print(f"vertex {winner} bidding just above its payment: loses -> "
      f"{critical_payment_check(inst, order, coins, winner)}")

total_paid = sum(out.payments)
print(f"\npayments total {total_paid:.2f}; the bid total is what the budget "
      "argument bounds, and it is {:.2f}".format(out.spend))
