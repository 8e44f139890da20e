"""Directed feedback graphs, neighborhoods, generators and small exact solvers.

Vertex sets are plain ``frozenset`` objects of action indices.  Every graph
carries all self-loops, so playing an action always reveals its own loss.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable

import numpy as np

VertexSet = frozenset

EXACT_DOMINATING_GUARD = 20
EXACT_INDEPENDENCE_GUARD = 24


class GraphError(ValueError):
    """Malformed graph input (bad index, bad file)."""


class DominationError(ValueError):
    """The candidate set cannot dominate the target set."""


class SizeGuardError(ValueError):
    """An exact (exponential-time) solver was asked to handle too large an input."""


@dataclass(frozen=True, eq=False)
class FeedbackGraph:
    """Directed observation graph over actions ``0..n-1``.

    ``adjacency[i, j]`` is True iff playing ``i`` reveals the loss of ``j``.
    The array is read-only; self-loops are always set.
    """

    n: int
    adjacency: np.ndarray = field(repr=False)

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=bool, copy=True)
        if adj.shape != (self.n, self.n):
            raise GraphError(f"adjacency shape {adj.shape} does not match n={self.n}")
        np.fill_diagonal(adj, True)
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "_out_masks", None)

    @property
    def vertices(self) -> frozenset:
        return frozenset(range(self.n))

    def edges(self, include_self_loops: bool = False) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(self.adjacency)
        return [(int(i), int(j)) for i, j in zip(ii, jj) if include_self_loops or i != j]

    def out_masks(self) -> tuple[int, ...]:
        """Out-neighborhoods as integer bitmasks (bit j set iff i -> j)."""
        if self._out_masks is None:
            masks = tuple(
                sum(1 << int(j) for j in np.flatnonzero(row)) for row in self.adjacency
            )
            object.__setattr__(self, "_out_masks", masks)
        return self._out_masks

    def fingerprint(self) -> bytes:
        return np.packbits(self.adjacency).tobytes() + self.n.to_bytes(8, "little")

    def __eq__(self, other):
        if not isinstance(other, FeedbackGraph):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.adjacency, other.adjacency))

    def __hash__(self):
        return hash(self.fingerprint())

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}


def build_graph(n: int, edges: Iterable[tuple[int, int]] = ()) -> FeedbackGraph:
    """Build a graph from ordered pairs; self-loops are added, duplicates ignored."""
    n = int(n)
    if n < 1:
        raise GraphError(f"graph needs at least one vertex, got n={n}")
    adj = np.zeros((n, n), dtype=bool)
    for pair in edges:
        try:
            i, j = (int(v) for v in pair)
        except (TypeError, ValueError) as exc:
            raise GraphError(f"edge {pair!r} is not a pair of integers") from exc
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
        adj[i, j] = True
    return FeedbackGraph(n, adj)


def graph_from_dict(data: dict) -> FeedbackGraph:
    if not isinstance(data, dict) or "n" not in data:
        raise GraphError("graph document must be an object with key 'n'")
    return build_graph(data["n"], data.get("edges", []))


def load_graph(path) -> FeedbackGraph:
    """Read the ``{"n": ..., "edges": [[i, j], ...]}`` JSON format."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: invalid JSON ({exc})") from exc
    return graph_from_dict(data)


def save_graph(g: FeedbackGraph, path) -> None:
    Path(path).write_text(json.dumps(g.to_dict()) + "\n")


def out_neighborhood(g: FeedbackGraph, i: int) -> frozenset:
    _check_vertex(g, i)
    return frozenset(int(j) for j in np.flatnonzero(g.adjacency[i]))


def in_neighborhood(g: FeedbackGraph, i: int) -> frozenset:
    _check_vertex(g, i)
    return frozenset(int(j) for j in np.flatnonzero(g.adjacency[:, i]))


def _check_vertex(g, i):
    if not 0 <= i < g.n:
        raise GraphError(f"vertex {i} out of range for n={g.n}")


def _check_set(g, s, name):
    s = frozenset(int(v) for v in s)
    if any(not 0 <= v < g.n for v in s):
        raise GraphError(f"{name} has members outside [0, {g.n})")
    return s


def dominates(g: FeedbackGraph, D: Iterable[int], B: Iterable[int]) -> bool:
    """True iff every vertex of ``B`` is an out-neighbor of some vertex of ``D``."""
    B = list(B)
    if not B:
        return True
    D = list(D)
    if not D:
        return False
    return bool(g.adjacency[np.ix_(D, B)].any(axis=0).all())


# ---------------------------------------------------------------------------
# dominating sets


def greedy_dominating_set(g: FeedbackGraph, A: Iterable[int], B: Iterable[int]) -> frozenset:
    """Greedy cover of ``B`` by out-neighborhoods of vertices in ``A``.

    Each step takes the vertex of ``A`` covering the most still-uncovered
    members of ``B``; ties go to the smallest index.  The result is within a
    factor ``ln n + 1`` of the optimum.
    """
    A = sorted(_check_set(g, A, "A"))
    B = _check_set(g, B, "B")
    if not B:
        return frozenset()
    remaining = np.zeros(g.n, dtype=bool)
    remaining[list(B)] = True
    if not A:
        raise DominationError("empty candidate set cannot dominate a nonempty set")
    rows = g.adjacency[A]
    if not (rows.any(axis=0) | ~remaining).all():
        raise DominationError("candidate set does not dominate the target set")
    chosen = []
    while remaining.any():
        gains = (rows & remaining).sum(axis=1)
        best = int(np.argmax(gains))
        chosen.append(A[best])
        remaining &= ~rows[best]
    return frozenset(chosen)


def exact_dominating_number(
    g: FeedbackGraph, A: Iterable[int], B: Iterable[int], guard: int = EXACT_DOMINATING_GUARD
) -> float:
    """Minimum number of vertices of ``A`` dominating ``B``; ``math.inf`` if impossible."""
    A = _check_set(g, A, "A")
    B = _check_set(g, B, "B")
    if len(A) > guard:
        raise SizeGuardError(f"|A|={len(A)} exceeds exact guard {guard}")
    if not B:
        return 0
    b_list = sorted(B)
    pos = {v: k for k, v in enumerate(b_list)}
    covers = []
    for a in sorted(A):
        m = 0
        for j in np.flatnonzero(g.adjacency[a]):
            k = pos.get(int(j))
            if k is not None:
                m |= 1 << k
        if m:
            covers.append(m)
    return _min_cover((1 << len(b_list)) - 1, tuple(covers))


def _min_cover(target: int, covers: tuple[int, ...]) -> float:
    """Minimum number of masks from ``covers`` whose union contains ``target``."""
    by_bit: dict[int, list[int]] = {}
    for c in covers:
        m = c & target
        while m:
            low = m & -m
            by_bit.setdefault(low, []).append(c)
            m ^= low

    @lru_cache(maxsize=None)
    def solve(mask: int) -> float:
        if not mask:
            return 0
        low = mask & -mask
        best = math.inf
        for c in by_bit.get(low, ()):
            best = min(best, 1 + solve(mask & ~c))
        return best

    return solve(target)


def dominating_number_table(g: FeedbackGraph, A: Iterable[int], universe: Iterable[int]) -> dict[int, float]:
    """Dominating numbers from ``A`` of every subset of ``universe``.

    Returns a map from bitmask (over vertex indices) to the dominating number,
    computed by dynamic programming over submasks: a set is covered by picking
    a dominator of its lowest member and recursing on what remains.
    """
    A = sorted(_check_set(g, A, "A"))
    U = sorted(_check_set(g, universe, "universe"))
    masks = g.out_masks()
    full = sum(1 << v for v in U)
    dominators: dict[int, list[int]] = {1 << v: [] for v in U}
    for a in A:
        m = masks[a] & full
        while m:
            low = m & -m
            dominators[low].append(masks[a])
            m ^= low
    table = {0: 0}
    # increasing integer order visits every proper submask before its superset
    sub = full
    order = []
    while True:
        order.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & full
    for mask in reversed(order):
        if mask == 0:
            continue
        low = mask & -mask
        best = math.inf
        for c in dominators[low]:
            v = table[mask & ~c]
            if v + 1 < best:
                best = v + 1
        table[mask] = best
    return table


# ---------------------------------------------------------------------------
# independent sets


def _undirected_masks(g: FeedbackGraph) -> list[int]:
    sym = g.adjacency | g.adjacency.T
    masks = []
    for i in range(g.n):
        row = sym[i].copy()
        row[i] = False
        masks.append(sum(1 << int(j) for j in np.flatnonzero(row)))
    return masks


def exact_independence_number(g: FeedbackGraph, guard: int = EXACT_INDEPENDENCE_GUARD) -> int:
    """Size of the largest set with no edge in either direction between members."""
    if g.n > guard:
        raise SizeGuardError(f"n={g.n} exceeds exact guard {guard}")
    nbr = _undirected_masks(g)

    @lru_cache(maxsize=None)
    def mis(mask: int) -> int:
        if not mask:
            return 0
        # pick the vertex of maximum degree inside mask
        best_v, best_deg = -1, -1
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            d = (nbr[v] & mask).bit_count()
            if d > best_deg:
                best_v, best_deg = v, d
            m ^= low
        if best_deg == 0:
            return mask.bit_count()
        v = best_v
        without = mis(mask & ~(1 << v))
        with_v = 1 + mis(mask & ~(1 << v) & ~nbr[v])
        return max(without, with_v)

    return mis((1 << g.n) - 1)


def greedy_independent_set(g: FeedbackGraph, order: Iterable[int] | None = None) -> frozenset:
    """Maximal independent set built greedily.

    Without an explicit ``order`` vertices are scanned by increasing undirected
    degree (ties by index), which recovers all leaves of a star.
    """
    nbr = _undirected_masks(g)
    if order is None:
        order = sorted(range(g.n), key=lambda v: (nbr[v].bit_count(), v))
    taken = 0
    blocked = 0
    for v in order:
        if not (blocked >> v) & 1:
            taken |= 1 << v
            blocked |= nbr[v] | (1 << v)
    return frozenset(v for v in range(g.n) if (taken >> v) & 1)


# ---------------------------------------------------------------------------
# generators


def gen_edgeless(n: int) -> FeedbackGraph:
    return build_graph(n, [])


def gen_complete(n: int) -> FeedbackGraph:
    return FeedbackGraph(int(n), np.ones((n, n), dtype=bool))


def gen_star(n: int) -> FeedbackGraph:
    """Star with hub ``n-1`` observing every other vertex."""
    n = int(n)
    if n < 1:
        raise GraphError("star needs n >= 1")
    return build_graph(n, [(n - 1, i) for i in range(n - 1)])


def gen_union_of_stars(sizes: Iterable[tuple[int, int]]) -> FeedbackGraph:
    """Disjoint union of stars.

    ``sizes`` lists ``(k, m)`` pairs: ``m`` copies of a star with ``k``
    leaves.  Each star occupies a contiguous block with its hub last.
    """
    edges = []
    offset = 0
    for k, m in sizes:
        k, m = int(k), int(m)
        if k < 0 or m < 0:
            raise GraphError("star sizes must be nonnegative")
        for _ in range(m):
            hub = offset + k
            edges.extend((hub, offset + leaf) for leaf in range(k))
            offset += k + 1
    if offset == 0:
        raise GraphError("union of stars is empty")
    return build_graph(offset, edges)


def star_hubs(sizes: Iterable[tuple[int, int]]) -> list[int]:
    """Hub indices of the graph built by :func:`gen_union_of_stars`."""
    hubs, offset = [], 0
    for k, m in sizes:
        for _ in range(int(m)):
            hubs.append(offset + int(k))
            offset += int(k) + 1
    return hubs


def gen_random(n: int, p: float, seed: int) -> FeedbackGraph:
    """Directed Erdos-Renyi graph: each ordered pair ``i != j`` present with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability {p} outside [0, 1]")
    rng = np.random.default_rng(seed)
    adj = rng.random((n, n)) < p
    return FeedbackGraph(int(n), adj)
