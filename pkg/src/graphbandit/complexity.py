"""Graph problem complexities and the LP-driven exploration split.

``q_complexity*`` evaluate the stationary-policy linear program over a
geometric grid of gaps; ``r_complexity*`` evaluate the combinatorial
counterpart by exhaustive enumeration of splits; ``split_proxies`` turns LP
solutions into explicit inside/outside exploration sets with greedy
dominating sets.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .graph import (
    FeedbackGraph,
    SizeGuardError,
    dominates,
    dominating_number_table,
    exact_independence_number,
    exact_dominating_number,
    greedy_dominating_set,
    greedy_independent_set,
)
from .lp import LinearProgram, solve_lp

R_EXACT_GUARD = 10
# J-membership test tolerance on "inside observations >= half of all observations"
HALF_RTOL = 1e-12


class ParameterError(ValueError):
    pass


class Regime(enum.Enum):
    LARGE_T = "LargeT"
    SMALL_T = "SmallT"


def default_tolerance(n: int, T: int, gap: float) -> float:
    return max(gap * gap / (float(n) ** 4 * float(T) ** 2), 1e-12)


def delta_grid(n: int, T: int) -> list[float]:
    """Gaps ``1/2, 1/4, ..., 2^-(floor(log2(n T)) + 1)``."""
    size = int(math.floor(math.log2(n * T))) + 1
    return [2.0 ** -k for k in range(1, size + 1)]


def _as_set(I: Iterable[int]) -> frozenset:
    return frozenset(int(i) for i in I)


def q_program(g: FeedbackGraph, I: Iterable[int], gap: float, T: int) -> tuple[LinearProgram, np.ndarray]:
    """LP over the actions that observe at least one member of ``I``.

    Returns the program and the action index of each LP variable.  Actions
    observing nothing in ``I`` only add cost and are zero at every optimum,
    so dropping them is exact.  Coverage rows are divided by ``T``:
    ``sum_i pi_i G[i, j] >= 1 / (T gap^2)``.
    """
    idx = sorted(_as_set(I))
    G = g.adjacency
    cols = np.flatnonzero(G[:, idx].any(axis=1))
    inside = np.zeros(g.n, dtype=bool)
    inside[idx] = True
    cost = np.where(inside[cols], T * gap, float(T))
    A = G[np.ix_(cols, idx)].T.astype(float)
    b = np.full(len(idx), 1.0 / (T * gap * gap))
    return LinearProgram(len(cols), cost, A, b, 1.0), cols


def _solve_q(g, I, gap, T, eps, method):
    """LP minimiser as a full-length vector, or None when infeasible."""
    # coverage above the total budget is infeasible for every policy
    if 1.0 / (T * gap * gap) > 1.0 + eps:
        return None
    lp, cols = q_program(g, I, gap, T)
    sol = solve_lp(lp, eps, method)
    if not sol.optimal:
        return None
    pi = np.zeros(g.n)
    pi[cols] = sol.x
    return pi


def q_complexity_fixed_delta(g, I, gap, T, eps=None, method="auto"):
    """Value of the gap-``gap`` program and its minimising policy.

    Returns ``(value, pi)``.  ``value = min(LP optimum, T * gap)``; an empty
    feasible set yields ``T * gap`` and the zero vector.
    """
    I = _as_set(I)
    if not I:
        raise ParameterError("I must be nonempty")
    if not (0.0 < gap <= 0.5):
        raise ParameterError(f"gap must lie in (0, 1/2], got {gap}")
    if T < 1:
        raise ParameterError("T must be >= 1")
    if eps is None:
        eps = default_tolerance(g.n, T, gap)
    pi = _solve_q(g, I, gap, T, eps, method)
    if pi is None:
        return T * gap, np.zeros(g.n)
    inside = np.zeros(g.n, dtype=bool)
    inside[list(I)] = True
    linear = T * gap * pi[inside].sum() + T * pi[~inside].sum()
    return min(float(linear), T * gap), pi


def q_complexity(g, I, T, eps=None, method="auto") -> float:
    """Maximum over the gap grid of :func:`q_complexity_fixed_delta`."""
    I = _as_set(I)
    if not I:
        raise ParameterError("I must be nonempty")
    return max(
        q_complexity_fixed_delta(g, I, gap, T, eps, method)[0] for gap in delta_grid(g.n, T)
    )


# ---------------------------------------------------------------------------
# combinatorial complexity


def _split_value(d_in: float, d_out: float, T: float) -> float:
    return max(math.sqrt(d_in * T), d_out ** (1.0 / 3.0) * T ** (2.0 / 3.0))


class _DominationCache:
    """Exact dominating numbers for one graph, shared across sets and horizons."""

    def __init__(self, g: FeedbackGraph):
        self.g = g
        self._from_v = None
        self._pairs: dict[int, list[tuple[float, float, int]]] = {}

    def from_v(self):
        if self._from_v is None:
            self._from_v = dominating_number_table(self.g, range(self.g.n), range(self.g.n))
        return self._from_v

    def pairs(self, I_mask: int) -> list[tuple[float, float, int]]:
        """``(delta^I(J), delta^V(I minus J), J mask)`` for every ``J`` inside ``I``.

        Only Pareto-relevant pairs are kept, ordered by increasing J mask.
        """
        if I_mask in self._pairs:
            return self._pairs[I_mask]
        members = [v for v in range(self.g.n) if (I_mask >> v) & 1]
        inside = dominating_number_table(self.g, members, members)
        from_v = self.from_v()
        best: dict[tuple[float, float], int] = {}
        sub = 0
        while True:
            key = (inside[sub], from_v[I_mask & ~sub])
            if key not in best:
                best[key] = sub
            if sub == I_mask:
                break
            sub = (sub - I_mask) & I_mask
        pairs = sorted(((a, b, j) for (a, b), j in best.items()), key=lambda t: t[2])
        self._pairs[I_mask] = pairs
        return pairs


_CACHES: dict = {}


def _cache_for(g: FeedbackGraph) -> _DominationCache:
    key = g.fingerprint()
    cache = _CACHES.get(key)
    if cache is None:
        if len(_CACHES) > 64:
            _CACHES.clear()
        cache = _CACHES[key] = _DominationCache(g)
    return cache


def r_complexity_set(g, I, T, guard: int = R_EXACT_GUARD) -> tuple[float, frozenset]:
    """Best split of ``I``: ``min_J max(sqrt(delta^I(J) T), delta^V(I\\J)^(1/3) T^(2/3))``.

    Returns the value and a minimising ``J``.  Values within a relative
    ``1e-12`` count as tied; among ties the pure splits ``J = {}`` and
    ``J = I`` come first (in that order), then the smaller bitmask.
    """
    I = _as_set(I)
    if len(I) > guard:
        raise SizeGuardError(f"|I|={len(I)} exceeds exact guard {guard}")
    if any(not 0 <= v < g.n for v in I):
        raise ParameterError("I has members outside the graph")
    if not I:
        return 0.0, frozenset()
    mask = sum(1 << v for v in I)
    vals = [(_split_value(d_in, d_out, T), j)
            for d_in, d_out, j in _cache_for(g).pairs(mask)
            if not (math.isinf(d_in) or math.isinf(d_out))]
    best = min(v for v, _ in vals)
    tied = [j for v, j in vals if v <= best * (1 + 1e-12)]
    best_j = min(tied, key=lambda j: (j not in (0, mask), j != 0, j))
    return best, frozenset(v for v in range(g.n) if (best_j >> v) & 1)


def r_complexity(g, T, guard: int = R_EXACT_GUARD, return_set: bool = False):
    """Maximum of :func:`r_complexity_set` over every subset of the vertices."""
    if g.n > guard:
        raise SizeGuardError(f"n={g.n} exceeds exact guard {guard}")
    best, best_I = 0.0, frozenset()
    for size in range(1, g.n + 1):
        for I in itertools.combinations(range(g.n), size):
            val, _ = r_complexity_set(g, I, T, guard)
            if val > best:
                best, best_I = val, frozenset(I)
    return (best, best_I) if return_set else best


# ---------------------------------------------------------------------------
# proxies


@dataclass(frozen=True)
class SplitResult:
    J: frozenset
    J_prime: frozenset
    D: frozenset
    D_prime: frozenset
    delta: float
    pi: np.ndarray = field(repr=False)
    criterion_value: float
    fallback: bool = False

    def rates(self, T: int) -> float:
        """Learning-rate cap ``min(|D|^-1/2 T^-1/2, |D'|^-1/3 T^-2/3)`` (empty sets impose none)."""
        r = math.inf
        if self.D:
            r = min(r, len(self.D) ** -0.5 * T ** -0.5)
        if self.D_prime:
            r = min(r, len(self.D_prime) ** (-1.0 / 3.0) * T ** (-2.0 / 3.0))
        return r


def inside_observed(g: FeedbackGraph, I: frozenset, pi: np.ndarray) -> frozenset:
    """Members of ``I`` receiving at least half of their observation mass from ``I``."""
    idx = sorted(I)
    G = g.adjacency[:, idx]
    total = pi @ G
    inside_pi = np.zeros_like(pi)
    inside_pi[idx] = pi[idx]
    from_inside = inside_pi @ G
    ok = from_inside >= 0.5 * total * (1.0 - HALF_RTOL)
    return frozenset(v for v, keep in zip(idx, ok) if keep)


def split_proxies(g, I, T, eps=None, method="auto", check: bool = True) -> SplitResult:
    """Split ``I`` into actions best explored from inside and from outside.

    For each gap of the grid the stationary-policy LP is solved; its
    minimiser decides which members are mostly observed from inside ``I``.
    Both halves get greedy dominating sets (from ``I`` and from all
    vertices).  The gap minimising ``max(sqrt(|D| T), |D'|^(1/3) T^(2/3))``
    is kept, ties going to the larger gap.
    """
    I = _as_set(I)
    if not I:
        raise ParameterError("I must be nonempty")
    V = range(g.n)
    best = None
    for gap in delta_grid(g.n, T):
        tol = default_tolerance(g.n, T, gap) if eps is None else eps
        pi = _solve_q(g, I, gap, T, tol, method)
        if pi is None:
            continue
        J = inside_observed(g, I, pi)
        Jp = I - J
        D = greedy_dominating_set(g, I, J)
        Dp = greedy_dominating_set(g, V, Jp)
        crit = _split_value(len(D), len(Dp), T)
        if best is None or crit < best.criterion_value:
            best = SplitResult(J, Jp, D, Dp, gap, pi, crit)
    if best is None:
        D = greedy_dominating_set(g, I, I)
        best = SplitResult(I, frozenset(), D, frozenset(), math.nan, np.zeros(g.n),
                           _split_value(len(D), 0, T), fallback=True)
    if check:
        assert best.J | best.J_prime == I and not (best.J & best.J_prime)
        assert best.D <= I and dominates(g, best.D, best.J)
        assert dominates(g, best.D_prime, best.J_prime)
    return best


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class ComplexityReport:
    alpha: int
    delta: int
    q_star: float
    r_star: float
    regime: Regime
    exact: bool
    T: int

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "delta": self.delta,
            "q_star": self.q_star,
            "r_star": self.r_star,
            "regime": self.regime.value,
            "exact": self.exact,
        }


def candidate_sets(g: FeedbackGraph, samples: int = 32, seed: int = 0) -> list[frozenset]:
    """Near-optimal-set candidates for large graphs.

    The full vertex set, the degree-ordered greedy independent set and
    greedy maximal independent sets from random vertex orders.
    """
    rng = np.random.default_rng(seed)
    out = {frozenset(range(g.n)), greedy_independent_set(g)}
    for _ in range(samples):
        out.add(greedy_independent_set(g, rng.permutation(g.n).tolist()))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def analyze(g: FeedbackGraph, T: int, exact: bool | None = None, method="auto",
            samples: int = 32, seed: int = 0) -> ComplexityReport:
    """Independence and dominating numbers, Q*, R* and the horizon regime.

    ``exact=None`` picks exhaustive evaluation when the graph fits the exact
    guard.  The approximate mode uses greedy independent/dominating sets,
    restricts ``I`` to :func:`candidate_sets` and evaluates each candidate
    through :func:`split_proxies`.
    """
    if T < 1:
        raise ParameterError("T must be >= 1")
    if exact is None:
        exact = g.n <= R_EXACT_GUARD
    if exact:
        alpha = exact_independence_number(g)
        delta = int(exact_dominating_number(g, range(g.n), range(g.n)))
        r_star = r_complexity(g, T)
        subsets = (
            frozenset(I)
            for size in range(1, g.n + 1)
            for I in itertools.combinations(range(g.n), size)
        )
        q_star = max(q_complexity(g, I, T, method=method) for I in subsets)
    else:
        alpha = len(greedy_independent_set(g))
        delta = len(greedy_dominating_set(g, range(g.n), range(g.n)))
        cands = candidate_sets(g, samples, seed)
        r_star = max(split_proxies(g, I, T, method=method).criterion_value for I in cands)
        q_star = max(q_complexity(g, I, T, method=method) for I in cands)
    regime = Regime.LARGE_T if T >= alpha ** 3 else Regime.SMALL_T
    return ComplexityReport(alpha, delta, float(q_star), float(r_star), regime, bool(exact), int(T))
