"""Small dense linear programs of the form

    minimize    c . x
    subject to  A x >= b,   sum(x) <= s,   x >= 0

solved by a deterministic two-phase tableau simplex.  Large programs can be
routed to scipy's HiGHS backend instead; both routes honour the same
tolerance contract.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-11
# the program actually solved is loosened by at most this much
MAX_INTERNAL_SLACK = 1e-9
# above this many tableau entries the HiGHS backend is usually faster
AUTO_SIMPLEX_LIMIT = 6000


class LpInputError(ValueError):
    pass


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LinearProgram:
    num_vars: int
    objective: np.ndarray
    ge_matrix: np.ndarray
    ge_rhs: np.ndarray
    simplex_cap: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        A = np.asarray(self.ge_matrix, dtype=float)
        b = np.asarray(self.ge_rhs, dtype=float).reshape(-1)
        if A.size == 0:
            A = A.reshape(0, self.num_vars)
        if c.shape != (self.num_vars,) or A.ndim != 2 or A.shape[1] != self.num_vars:
            raise LpInputError("row lengths must equal num_vars")
        if A.shape[0] != b.shape[0]:
            raise LpInputError("ge_matrix and ge_rhs disagree on the number of rows")
        for arr in (c, A, b):
            if not np.all(np.isfinite(arr)):
                raise LpInputError("non-finite coefficient in linear program")
        if not np.isfinite(self.simplex_cap) or self.simplex_cap <= 0:
            raise LpInputError("simplex cap must be a positive finite number")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "ge_matrix", A)
        object.__setattr__(self, "ge_rhs", b)

    @classmethod
    def from_rows(cls, objective, rows, simplex_cap=1.0):
        """Build from a list of ``(a, b)`` pairs meaning ``a . x >= b``."""
        objective = np.asarray(objective, dtype=float)
        n = objective.shape[0]
        A = np.array([np.asarray(a, dtype=float) for a, _ in rows]).reshape(len(rows), n)
        b = np.array([float(bb) for _, bb in rows])
        return cls(n, objective, A, b, simplex_cap)


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray
    objective_value: float
    tolerance: float

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def relaxed_bounds(lp: LinearProgram, eps: float) -> tuple[np.ndarray, float]:
    """Right-hand sides loosened by the relative slack ``eps``."""
    b = lp.ge_rhs - eps * np.abs(lp.ge_rhs)
    s = lp.simplex_cap * (1.0 + eps)
    return b, s


def is_feasible(lp: LinearProgram, x: np.ndarray, eps: float) -> bool:
    b, s = relaxed_bounds(lp, eps)
    x = np.asarray(x, dtype=float)
    slack = 1e-12 * (1.0 + np.abs(b))
    return bool(
        np.all(x >= 0)
        and x.sum() <= s * (1 + 1e-12)
        and np.all(lp.ge_matrix @ x >= b - slack)
    )


def solve_lp(lp: LinearProgram, eps: float = 1e-9, method: str = "auto") -> LpSolution:
    """Solve ``lp`` to within the relative feasibility slack ``eps``.

    The program actually solved has every ``>=`` right-hand side shrunk and
    the simplex cap grown by a relative ``min(eps, 1e-9)``; its optimum is
    never above the optimum of the exact program, so the returned objective
    satisfies ``c . x <= OPT + eps`` whenever the exact program is feasible,
    and tight programs are not rejected over rounding.
    ``method`` is ``"simplex"`` (in-repo), ``"highs"`` (scipy) or ``"auto"``.
    """
    if not (eps > 0 and np.isfinite(eps)):
        raise LpInputError(f"tolerance must be positive, got {eps}")
    if method == "auto":
        size = (lp.ge_matrix.shape[0] + 1) * (2 * lp.num_vars + lp.ge_matrix.shape[0] + 2)
        method = "simplex" if size <= AUTO_SIMPLEX_LIMIT else "highs"
    b, s = relaxed_bounds(lp, min(eps, MAX_INTERNAL_SLACK))
    if method == "simplex":
        x = _tableau_simplex(lp.objective, lp.ge_matrix, b, s)
    elif method == "highs":
        x = _highs(lp.objective, lp.ge_matrix, b, s)
    else:
        raise LpInputError(f"unknown LP method {method!r}")
    if x is None:
        return LpSolution(LpStatus.INFEASIBLE, np.zeros(lp.num_vars), float("nan"), eps)
    x = np.maximum(x, 0.0)
    return LpSolution(LpStatus.OPTIMAL, x, float(lp.objective @ x), eps)


def _highs(c, A, b, s):
    from scipy.optimize import linprog

    n = c.shape[0]
    A_ub = np.vstack([-A, np.ones((1, n))])
    b_ub = np.concatenate([-b, [s]])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(0, None), method="highs")
    if res.status == 2:
        return None
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed: {res.message}")
    return np.asarray(res.x, dtype=float)


def _tableau_simplex(c, A, b, s):
    """Two-phase simplex; returns an optimal vertex or None if infeasible."""
    m, n = A.shape
    rows = m + 1
    # column layout: x (n) | surplus/slack per ge row (m) | cap slack (1) | artificials
    flip = b <= 0
    art_rows = np.flatnonzero(~flip)
    n_art = art_rows.size
    ncols = n + m + 1 + n_art
    tab = np.zeros((rows + 1, ncols + 1))
    basis = np.empty(rows, dtype=int)
    for r in range(m):
        if flip[r]:
            tab[r, :n] = -A[r]
            tab[r, n + r] = 1.0
            tab[r, -1] = -b[r]
            basis[r] = n + r
        else:
            tab[r, :n] = A[r]
            tab[r, n + r] = -1.0
            tab[r, -1] = b[r]
    for k, r in enumerate(art_rows):
        col = n + m + 1 + k
        tab[r, col] = 1.0
        basis[r] = col
    tab[m, :n] = 1.0
    tab[m, n + m] = 1.0
    tab[m, -1] = s
    basis[m] = n + m

    scale = max(1.0, float(np.abs(b).max(initial=0.0)), s)
    if n_art:
        tab[-1, :] = -tab[art_rows].sum(axis=0)
        tab[-1, n + m + 1:-1] = 0.0
        _run(tab, basis, ncols)
        if -tab[-1, -1] > 1e-9 * scale:
            return None
        # drive zero-level artificials out of the basis
        keep = np.ones(rows, dtype=bool)
        for r in range(rows):
            if basis[r] >= n + m + 1:
                cand = np.flatnonzero(np.abs(tab[r, : n + m + 1]) > PIVOT_TOL)
                if cand.size:
                    _pivot(tab, r, int(cand[0]))
                    basis[r] = int(cand[0])
                else:
                    keep[r] = False
        if not keep.all():
            tab = np.vstack([tab[:-1][keep], tab[-1:]])
            basis = basis[keep]
        tab = np.hstack([tab[:, : n + m + 1], tab[:, -1:]])
        ncols = n + m + 1
    cost = np.zeros(ncols)
    cost[:n] = c
    tab[-1, :-1] = cost
    tab[-1, -1] = 0.0
    for r, bv in enumerate(basis):
        if cost[bv] != 0.0:
            tab[-1] -= cost[bv] * tab[r]
    _run(tab, basis, ncols)
    x = np.zeros(ncols)
    x[basis] = tab[:-1, -1]
    return x[:n]


def _pivot(tab, r, col):
    tab[r] /= tab[r, col]
    factors = tab[:, col].copy()
    factors[r] = 0.0
    nz = np.flatnonzero(factors)
    if nz.size:
        tab[nz] -= np.outer(factors[nz], tab[r])


def _run(tab, basis, ncols, max_iter=50_000):
    """Primal simplex iterations on the objective stored in the last row.

    Dantzig's most-negative rule, switching to Bland's smallest-index rule
    after a streak of degenerate pivots so the method cannot cycle.
    """
    degenerate_streak = 0
    for _ in range(max_iter):
        red = tab[-1, :ncols]
        if degenerate_streak > 50:
            neg = np.flatnonzero(red < -PIVOT_TOL)
            if neg.size == 0:
                return
            col = int(neg[0])
        else:
            col = int(np.argmin(red))
            if red[col] >= -PIVOT_TOL:
                return
        column = tab[:-1, col]
        pos = np.flatnonzero(column > PIVOT_TOL)
        if pos.size == 0:
            raise RuntimeError("unbounded linear program")
        ratios = tab[pos, -1] / column[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
        r = int(ties[np.argmin(basis[ties])])
        degenerate_streak = degenerate_streak + 1 if best <= 1e-12 else 0
        _pivot(tab, r, col)
        basis[r] = col
    raise RuntimeError("simplex iteration limit reached")
