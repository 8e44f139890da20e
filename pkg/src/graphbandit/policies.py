"""Online learning policies for bandits with feedback graphs.

All policies share one protocol, driven by the simulation harness::

    p = policy.distribution()      # sampling distribution for this round
    i = <draw from p>
    policy.update(Feedback(i, {j: loss_j for j in out-neighbors of i}), p)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .complexity import SplitResult, split_proxies
from .graph import FeedbackGraph, exact_independence_number, greedy_independent_set

POLICY_IDS = ("exp3ex", "exp3set", "etc-hub")


class ParameterError(ValueError):
    pass


class ContractError(RuntimeError):
    """A caller broke an interface precondition."""


class EstimatorError(RuntimeError):
    """An observed action had zero observation probability."""


@dataclass(frozen=True)
class Feedback:
    chosen: int
    observed: Mapping[int, float]

    def __post_init__(self):
        if self.chosen not in self.observed:
            raise ContractError("the chosen action must be among the observed ones")


def feedback_from_row(g: FeedbackGraph, chosen: int, losses: np.ndarray) -> Feedback:
    seen = np.flatnonzero(g.adjacency[chosen])
    return Feedback(int(chosen), dict(zip(seen.tolist(), np.asarray(losses)[seen].tolist())))


def loss_estimates(g: FeedbackGraph, fb: Feedback, p: np.ndarray) -> np.ndarray:
    """Importance-weighted estimates ``loss_i * 1{i observed} / P_i``.

    ``P_i`` is the probability mass of the in-neighbors of ``i`` under ``p``.
    """
    obs_prob = p @ g.adjacency
    est = np.zeros(g.n)
    idx = np.fromiter(fb.observed.keys(), dtype=int, count=len(fb.observed))
    vals = np.fromiter(fb.observed.values(), dtype=float, count=len(fb.observed))
    P = obs_prob[idx]
    if np.any(P <= 0.0):
        bad = idx[P <= 0.0].tolist()
        raise EstimatorError(f"observed actions {bad} had zero observation probability")
    est[idx] = vals / P
    return est


def exp_weights(cum_loss_est: np.ndarray, eta: float) -> np.ndarray:
    """Normalised weights ``(1/N) exp(-eta L)``; shifted by the minimum before exponentiating."""
    n = cum_loss_est.shape[0]
    w = np.exp(-eta * (cum_loss_est - cum_loss_est.min())) / n
    return w / w.sum()


# ---------------------------------------------------------------------------
# partitioning


def partition_sizes(N: int) -> tuple[int, int]:
    """Number of probability levels ``K`` and degree levels ``L`` (both 1 for a single action)."""
    if N <= 1:
        return 1, 1
    lg = math.log2(N)
    return math.ceil(5 * lg), math.ceil(lg)


@dataclass(frozen=True)
class Partition:
    K: int
    L: int
    buckets: dict  # (k, l) -> frozenset, nonempty buckets only
    tail: frozenset
    level: np.ndarray = field(repr=False)  # k per action, K + 1 for the tail
    degree: np.ndarray = field(repr=False)  # within-level degree, 0 for the tail
    sublevel: np.ndarray = field(repr=False)  # l per action, 0 for the tail


def probability_level(q: np.ndarray) -> np.ndarray:
    """``k`` with ``q in (2^-k, 2^-k+1]``; zero entries map to a huge level."""
    q = np.asarray(q, dtype=float)
    k = np.full(q.shape, np.iinfo(np.int64).max // 2, dtype=np.int64)
    pos = q > 0
    kk = np.floor(-np.log2(q[pos])).astype(np.int64) + 1
    qq = q[pos]
    # repair rounding of log2 at the interval edges
    kk = np.where(qq > np.ldexp(1.0, -kk + 1), kk - 1, kk)
    kk = np.where(qq <= np.ldexp(1.0, -kk), kk + 1, kk)
    k[pos] = kk
    return k


def degree_level(deg: np.ndarray, N: int, L: int) -> np.ndarray:
    """``l`` with ``deg in (N 2^-l, N 2^-l+1]``, clamped into ``1..L``."""
    deg = np.asarray(deg, dtype=np.int64)
    l = np.ones_like(deg)
    # smallest l >= 1 with deg * 2^l > N
    while True:
        grow = (deg << l) <= N
        if not grow.any():
            break
        l = l + grow
    return np.minimum(l, L)


def partition_actions(q: np.ndarray, g: FeedbackGraph) -> Partition:
    """Group actions by exponential-weight level and by degree inside that level."""
    q = np.asarray(q, dtype=float)
    N = g.n
    K, L = partition_sizes(N)
    k = probability_level(q)
    in_tail = k > K
    level = np.where(in_tail, K + 1, k)
    degree = np.zeros(N, dtype=np.int64)
    sub = np.zeros(N, dtype=np.int64)
    for kv in np.unique(level[~in_tail]):
        members = np.flatnonzero(level == kv)
        degree[members] = g.adjacency[np.ix_(members, members)].sum(axis=1)
        sub[members] = degree_level(degree[members], N, L)
    buckets: dict = {}
    for i in np.flatnonzero(~in_tail):
        buckets.setdefault((int(level[i]), int(sub[i])), []).append(int(i))
    buckets = {kl: frozenset(v) for kl, v in sorted(buckets.items())}
    tail = frozenset(np.flatnonzero(in_tail).tolist())
    return Partition(K, L, buckets, tail, level, degree, sub)


def exploration_distribution(partition: Partition, proxies: Mapping, N: int) -> np.ndarray:
    """Uniform mixture over all actions and each bucket's outside dominating set.

    Buckets that are empty, or whose outside dominating set is empty,
    contribute a uniform component so the mixture always sums to one.
    """
    KL = partition.K * partition.L
    uniform_terms = 1 + KL
    u = np.zeros(N)
    for kl in partition.buckets:
        try:
            pr = proxies[kl]
        except KeyError:
            raise ContractError(f"no proxy supplied for nonempty bucket {kl}") from None
        if pr.D_prime:
            d = sorted(pr.D_prime)
            u[d] += 1.0 / len(d)
            uniform_terms -= 1
    u += uniform_terms / N
    return u / (KL + 1)


# ---------------------------------------------------------------------------
# policies


class Exp3Ex:
    """Exponential weights mixed with graph-aware explicit exploration.

    Each round the actions are bucketed by weight and degree; every bucket
    is split by :func:`split_proxies` into an inside-explored part and an
    outside-explored part whose dominating set receives extra exploration
    mass.  The learning rate is the running minimum of the per-bucket rates.

    ``proxy_cache`` may be a dict shared between policies on the same graph
    and horizon; results are keyed by exact bucket content, so sharing does
    not change trajectories.
    """

    name = "exp3ex"

    def __init__(self, g: FeedbackGraph, T: int, cache: bool = True,
                 proxy_cache: dict | None = None, lp_method: str = "auto"):
        if T < 1:
            raise ParameterError("T must be >= 1")
        self.g, self.T = g, int(T)
        self.K, self.L = partition_sizes(g.n)
        self.t = 0
        self.cum_loss_est = np.zeros(g.n)
        # largest value the per-bucket rate can take (|D| = 1)
        self.eta = self.T ** -0.5
        self.gamma = min(1.0 / (self.eta * self.T), 0.5)
        self.cache_enabled = cache
        self.proxy_cache = (proxy_cache if proxy_cache is not None else {}) if cache else None
        self.lp_method = lp_method
        self.last: dict = {}

    def _proxy(self, I: frozenset) -> SplitResult:
        if self.proxy_cache is None:
            return split_proxies(self.g, I, self.T, method=self.lp_method)
        res = self.proxy_cache.get(I)
        if res is None:
            res = self.proxy_cache[I] = split_proxies(self.g, I, self.T, method=self.lp_method)
        return res

    def distribution(self) -> np.ndarray:
        N, T = self.g.n, self.T
        if N == 1:
            self.last = {"q": np.ones(1), "u": np.ones(1), "eta": self.eta,
                         "gamma": self.gamma, "partition": None}
            return np.ones(1)
        # eta_t must not exceed the rates of this round's own buckets, which
        # depend on eta_t through q; iterate down to the fixed point
        eta = self.eta
        while True:
            q = exp_weights(self.cum_loss_est, eta)
            part = partition_actions(q, self.g)
            proxies = {kl: self._proxy(I) for kl, I in part.buckets.items()}
            rate = min([eta] + [pr.rates(T) for pr in proxies.values()])
            if rate >= eta:
                break
            eta = rate
        self.eta = eta
        self.gamma = min(1.0 / (eta * T), 0.5)
        u = exploration_distribution(part, proxies, N)
        p = (1.0 - self.gamma) * q + self.gamma * u
        self.last = {"q": q, "u": u, "eta": eta, "gamma": self.gamma,
                     "partition": part, "proxies": proxies}
        return p

    def update(self, fb: Feedback, p_used: np.ndarray) -> None:
        self.cum_loss_est += loss_estimates(self.g, fb, p_used)
        self.t += 1


class Exp3Set:
    """Exponential weights with the graph estimator and a fixed rate ``sqrt(ln N / (alpha T))``."""

    name = "exp3set"

    def __init__(self, g: FeedbackGraph, T: int, alpha: int | None = None):
        if T < 1:
            raise ParameterError("T must be >= 1")
        self.g, self.T = g, int(T)
        if alpha is None:
            alpha = exact_independence_number(g) if g.n <= 24 else len(greedy_independent_set(g))
        self.alpha = int(alpha)
        self.eta = math.sqrt(math.log(g.n) / (self.alpha * self.T))
        self.cum_loss_est = np.zeros(g.n)
        self.t = 0

    def distribution(self) -> np.ndarray:
        return exp_weights(self.cum_loss_est, self.eta)

    def update(self, fb: Feedback, p_used: np.ndarray) -> None:
        self.cum_loss_est += loss_estimates(self.g, fb, p_used)
        self.t += 1


def explore_rounds(T: int) -> int:
    """``ceil(T^(2/3))`` without float overshoot on perfect cubes."""
    x = T ** (2.0 / 3.0)
    r = round(x)
    return int(r) if abs(x - r) < 1e-9 * max(1.0, x) else math.ceil(x)


class EtcHub:
    """Play a hub observing every action for ``ceil(T^(2/3))`` rounds, then commit.

    Commits to the smallest empirical mean loss, ties to the smallest index.
    """

    name = "etc-hub"

    def __init__(self, g: FeedbackGraph, T: int, hub: int | None = None):
        full = g.adjacency.all(axis=1)
        if hub is None:
            hubs = np.flatnonzero(full)
            if hubs.size == 0:
                raise ParameterError("graph has no action observing every other action")
            hub = int(hubs[0])
        if not 0 <= hub < g.n or not full[hub]:
            raise ParameterError(f"action {hub} does not observe every action")
        self.g, self.T, self.hub = g, int(T), int(hub)
        self.explore = min(self.T, explore_rounds(self.T))
        self.sums = np.zeros(g.n)
        self.counts = np.zeros(g.n)
        self.committed: int | None = None
        self.t = 0

    def distribution(self) -> np.ndarray:
        p = np.zeros(self.g.n)
        if self.t < self.explore:
            p[self.hub] = 1.0
        else:
            if self.committed is None:
                means = self.sums / np.maximum(self.counts, 1)
                self.committed = int(np.argmin(means))
            p[self.committed] = 1.0
        return p

    def update(self, fb: Feedback, p_used: np.ndarray) -> None:
        if self.t < self.explore:
            for j, loss in fb.observed.items():
                self.sums[j] += loss
                self.counts[j] += 1
        self.t += 1


def make_policy(name: str, g: FeedbackGraph, T: int, **opts):
    if name == "exp3ex":
        return Exp3Ex(g, T, **opts)
    if name == "exp3set":
        return Exp3Set(g, T, **{k: v for k, v in opts.items() if k == "alpha"})
    if name == "etc-hub":
        return EtcHub(g, T, **{k: v for k, v in opts.items() if k == "hub"})
    raise ParameterError(f"unknown policy {name!r}; expected one of {', '.join(POLICY_IDS)}")


def exp3ex_distribution(state: Exp3Ex) -> tuple[np.ndarray, dict]:
    p = state.distribution()
    return p, state.last


def exp3ex_update(state: Exp3Ex, fb: Feedback, p_used: np.ndarray) -> Exp3Ex:
    state.update(fb, p_used)
    return state
