"""Brute-force reference computations, independent of the library's solvers."""
import itertools
import math

import numpy as np


def covers(adj, D, B):
    return all(any(adj[d][b] for d in D) for b in B)


def brute_dominating_number(adj, A, B):
    A, B = sorted(A), sorted(B)
    if not B:
        return 0
    for size in range(1, len(A) + 1):
        for D in itertools.combinations(A, size):
            if covers(adj, D, B):
                return size
    return math.inf


def brute_independence_number(adj):
    n = len(adj)
    best = 0
    for mask in range(1 << n):
        S = [v for v in range(n) if (mask >> v) & 1]
        if len(S) <= best:
            continue
        if all(not adj[i][j] and not adj[j][i] for i, j in itertools.combinations(S, 2)):
            best = len(S)
    return best


def brute_r_set(adj, I, T):
    I = sorted(I)
    n = len(adj)
    if not I:
        return 0.0
    best = math.inf
    for size in range(len(I) + 1):
        for J in itertools.combinations(I, size):
            rest = [v for v in I if v not in J]
            a = brute_dominating_number(adj, I, J)
            b = brute_dominating_number(adj, range(n), rest)
            best = min(best, max(math.sqrt(a * T), b ** (1 / 3) * T ** (2 / 3)))
    return best


def brute_r_star(adj, T):
    n = len(adj)
    return max(
        brute_r_set(adj, I, T)
        for size in range(1, n + 1)
        for I in itertools.combinations(range(n), size)
    )


def vertex_enumeration_lp(c, A, b, s):
    """min c.x s.t. A x >= b, sum x <= s, x >= 0 by enumerating basic solutions.

    Returns ``(value, x)`` or ``(inf, None)`` when infeasible.
    """
    c = np.asarray(c, float)
    n = c.shape[0]
    A = np.asarray(A, float).reshape(-1, n)
    b = np.asarray(b, float)
    # all constraints as rows . x >= rhs
    rows = [A[i] for i in range(A.shape[0])] + [-np.ones(n)] + list(np.eye(n))
    rhs = list(b) + [-s] + [0.0] * n
    M, r = np.array(rows), np.array(rhs)
    best, best_x = math.inf, None
    for active in itertools.combinations(range(len(rows)), n):
        sub = M[list(active)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, r[list(active)])
        if np.all(M @ x >= r - 1e-9):
            val = float(c @ x)
            if val < best:
                best, best_x = val, x
    return best, best_x
