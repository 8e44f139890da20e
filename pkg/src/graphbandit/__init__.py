"""Adversarial online learning with feedback graphs.

Exp3-EX with explicit graph-aware exploration, the problem complexities
Q* and R*, LP-based exploration splits, hard-instance environments,
baselines and a simulation harness.
"""
from .complexity import (
    ComplexityReport,
    SplitResult,
    analyze,
    delta_grid,
    q_complexity,
    q_complexity_fixed_delta,
    r_complexity,
    r_complexity_set,
    split_proxies,
)
from .environments import (
    HardInstanceSpec,
    compute_regret,
    gen_fixed,
    gen_hard_instance,
    load_loss_csv,
)
from .graph import (
    FeedbackGraph,
    build_graph,
    exact_dominating_number,
    exact_independence_number,
    gen_complete,
    gen_edgeless,
    gen_random,
    gen_star,
    gen_union_of_stars,
    greedy_dominating_set,
    in_neighborhood,
    load_graph,
    out_neighborhood,
)
from .harness import ExperimentConfig, RegretCurve, run_experiment
from .lp import LinearProgram, LpSolution, LpStatus, solve_lp
from .policies import (
    EtcHub,
    Exp3Ex,
    Exp3Set,
    Feedback,
    exploration_distribution,
    make_policy,
    partition_actions,
)

__version__ = "0.1.0"
