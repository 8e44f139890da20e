"""
Where does Exp3-EX explore?
===========================

Each round Exp3-EX groups actions by weight and by degree, then splits
every group into actions watched from inside the group and actions watched
from a small outside dominating set.  This script runs a few rounds on a
union of stars and prints the split and the resulting exploration mass.
"""

import numpy as np

from graphbandit import Exp3Ex, gen_union_of_stars, split_proxies
from graphbandit.graph import star_hubs
from graphbandit.policies import feedback_from_row

sizes = [(4, 2), (1, 1)]
g = gen_union_of_stars(sizes)
hubs = star_hubs(sizes)
leaves = sorted(set(range(g.n)) - set(hubs))
print("actions:", g.n, " hubs:", hubs)

# %%
# One split, by hand.  With a short horizon the leaves are best watched
# from the hubs; with a long one they are explored directly.
for T in (50, 5000):
    res = split_proxies(g, leaves, T)
    print(f"T={T:5d}  inside={sorted(res.J)}  outside={sorted(res.J_prime)}  "
          f"D={sorted(res.D)}  D'={sorted(res.D_prime)}  gap={res.delta}")

# %%
# The policy against losses where leaf 0 is best (0.2), other leaves 0.4
# and hubs 1.  As weights concentrate the buckets change, and so does the
# exploration mass the hubs receive.
T = 300
pol = Exp3Ex(g, T)
losses = np.where(np.isin(np.arange(g.n), hubs), 1.0, 0.4)
losses[0] = 0.2
rng = np.random.default_rng(0)
for t in range(T):
    p = pol.distribution()
    if t % 60 == 0 or t == T - 1:
        u = pol.last["u"]
        print(f"round {t:3d}: eta={pol.last['eta']:.4f} gamma={pol.last['gamma']:.3f} "
              f"buckets={len(pol.last['partition'].buckets)} p[0]={p[0]:.3f} "
              f"u(hubs)={u[hubs].round(4).tolist()}")
    i = int(rng.choice(g.n, p=p))
    pol.update(feedback_from_row(g, i, losses), p)
