"""
Regret on a star with many leaves
=================================

A hard instance on a star: one leaf is slightly better than the others,
the hub is expensive.  We compare Exp3-EX, Exp3-SET and the hub
explore-then-commit baseline over a handful of seeds.  The full
experiment (256 actions, T=1000, 20 seeds) is in the acceptance tests;
this is a scaled-down version that runs in about a minute.
"""

import numpy as np

from graphbandit import ExperimentConfig, run_experiment

cfg = ExperimentConfig.from_dict({
    "graph": {"generator": "star", "n": 64},
    "environment": {"type": "hard", "I": "leaves", "j_star": 0, "gap": "T^-1/3"},
    "policies": ["exp3ex", "exp3set", "etc-hub"],
    "T": 500,
    "num_seeds": 5,
    "master_seed": 1,
})
curve = run_experiment(cfg)

# %%
# Final pseudo-regret, mean and standard error over seeds.
T = cfg.T
print(f"T={T}  T^(2/3)={T ** (2 / 3):.1f}  T*gap={T * T ** (-1 / 3):.1f}")
for pol in cfg.policies:
    fin = curve.final(pol)
    print(f"{pol:8s} {fin.mean():7.2f} +- {fin.std(ddof=1) / np.sqrt(len(fin)):.2f}")

# %%
# Regret at a few checkpoints of the mean curve.
for pol in cfg.policies:
    m = curve.mean(pol)
    print(pol.ljust(8), " ".join(f"{m[t - 1]:6.1f}" for t in (50, 100, 250, 500)))
