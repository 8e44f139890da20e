"""
Problem complexity of a few feedback graphs
===========================================

How hard a graph-feedback problem is depends on two quantities: the
independence number alpha and how cheaply hard-to-see actions can be
watched from elsewhere.  R* captures both.  Below we compute it for small
graphs and watch it switch between sqrt(alpha T) and T^(2/3).
"""

import numpy as np

from graphbandit import analyze, gen_edgeless, gen_star, gen_union_of_stars

# Edgeless graph: nothing is observed for free, every action must be
# played to be seen.  Once T >= alpha^3 the answer is sqrt(alpha T).
g = gen_edgeless(4)
for T in (16, 64, 256):
    rep = analyze(g, T)
    print(f"edgeless n=4  T={T:4d}  R*={rep.r_star:7.2f}  sqrt(aT)={np.sqrt(4 * T):7.2f}  {rep.regime.value}")

# %%
# A star: the hub sees every leaf but is itself a bad action to play.
# For short horizons paying for hub plays (T^(2/3)) beats exploring the
# 8 leaves one by one (sqrt(8 T)).
g = gen_star(9)
print()
for T in (20, 100, 500, 2000):
    rep = analyze(g, T)
    print(f"star n=9      T={T:4d}  R*={rep.r_star:7.2f}  T^2/3={T ** (2 / 3):7.2f}  "
          f"sqrt(aT)={np.sqrt(8 * T):7.2f}  {rep.regime.value}")

# %%
# Two disjoint stars with 3 leaves each.  alpha = 6, two hubs dominate.
g = gen_union_of_stars([(3, 2)])
print()
for T in (10, 100, 1000):
    rep = analyze(g, T)
    print(f"2 x star(3)   T={T:4d}  alpha={rep.alpha} delta={rep.delta}  "
          f"R*={rep.r_star:7.2f}  Q*={rep.q_star:7.2f}")
