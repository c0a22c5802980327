"""Budgeted bipartite matching and knapsack selection under random arrivals.

A library for the observe-then-select family of online algorithms: an exact
budgeted threshold rule for the offline phase, online knapsack selection and
its analysis comparator, a truthful payment mechanism for budgeted matching,
the coupled simulation constructs behind its guarantees, and a seeded
experiment harness.
"""

from .core import (
    UNBOUNDED,
    BUDGET_TOL,
    ArrivalOrder,
    BipartiteInstance,
    Edge,
    EvalResult,
    GenerationError,
    Item,
    KnapsackInstance,
    LeftVertex,
    Matching,
    PseudoMatching,
    RngStream,
    SizeError,
    StructuralError,
    evaluate,
    instance_from_dict,
    instance_to_dict,
    is_knapsack_class,
    knapsack_to_bipartite,
    load_instance,
    save_instance,
)
from .offline import (
    OptSplit,
    ThresholdResult,
    brute_force_opt,
    decompose_opt,
    greedy_matching,
    restrict,
    threshold,
    threshold_bisect,
)
from .online_knapsack import (
    PriceTable,
    RunOutcome,
    default_sample_size,
    run_on,
    run_virtual,
    selection_probability_bound,
)
from .truthful import (
    RewardTable,
    check_monotone,
    critical_payment_check,
    run_on_truth,
)
from .analysis import (
    IdentityEstimate,
    SampleAndPermuteResult,
    SimulateResult,
    SurvivalEstimate,
    estimate_expectation_identity,
    estimate_half_survival,
    sample_and_permute,
    simulate,
)
from .harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    competitive_ratio,
    gen_d2d_instance,
    gen_knapsack_instance,
    run_experiment,
    run_trial,
)

__version__ = "0.1.0"
