"""Oblivious loss sources and regret accounting."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .rng import LOSSES, CounterRNG


class EnvironmentConfigError(ValueError):
    pass


class LossMatrix:
    """``T x N`` losses in [0, 1], fixed before play starts.

    Subclasses provide :meth:`row`; ``means`` is set for stochastic sources.
    """

    T: int
    N: int
    means: np.ndarray | None = None

    def row(self, t: int) -> np.ndarray:
        raise NotImplementedError

    def materialize(self) -> np.ndarray:
        return np.vstack([self.row(t) for t in range(self.T)])


class FixedLosses(LossMatrix):
    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.size == 0:
            raise EnvironmentConfigError("loss matrix must be a nonempty T x N array")
        if not np.all(np.isfinite(m)) or m.min() < 0.0 or m.max() > 1.0:
            raise EnvironmentConfigError("losses must lie in [0, 1]")
        m.setflags(write=False)
        self._m = m
        self.T, self.N = m.shape

    def row(self, t):
        return self._m[t]

    def materialize(self):
        return self._m


class BernoulliLosses(LossMatrix):
    """Independent Bernoulli losses; entry ``(t, i)`` depends only on ``(seed, t, i)``."""

    def __init__(self, means, T: int, seed: int):
        means = np.array(means, dtype=float)
        if means.ndim != 1 or means.min() < 0.0 or means.max() > 1.0:
            raise EnvironmentConfigError("means must be a vector in [0, 1]")
        means.setflags(write=False)
        self.means = means
        self.T, self.N = int(T), means.shape[0]
        self.seed = int(seed)
        self._rng = CounterRNG(seed, LOSSES)

    def row(self, t):
        if not 0 <= t < self.T:
            raise IndexError(t)
        return (self._rng.uniform(t, self.N) < self.means).astype(float)


@dataclass(frozen=True)
class HardInstanceSpec:
    I: frozenset
    j_star: int
    gap: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "I", frozenset(int(i) for i in self.I))
        if self.j_star not in self.I:
            raise EnvironmentConfigError("j_star must belong to I")
        if not 0.0 <= self.gap <= 0.5:
            raise EnvironmentConfigError(f"gap must lie in [0, 1/2], got {self.gap}")


def hard_instance_means(n: int, spec: HardInstanceSpec) -> np.ndarray:
    """Loss means: ``1/2 - gap`` for ``j_star``, ``1/2`` on the rest of ``I``, ``1`` outside."""
    if any(not 0 <= i < n for i in spec.I):
        raise EnvironmentConfigError("I has members outside the graph")
    means = np.ones(n)
    means[list(spec.I)] = 0.5
    means[spec.j_star] = 0.5 - spec.gap
    return means


def gen_hard_instance(g, spec: HardInstanceSpec, T: int) -> BernoulliLosses:
    return BernoulliLosses(hard_instance_means(g.n, spec), T, spec.seed)


def gen_fixed(matrix) -> FixedLosses:
    return FixedLosses(matrix)


def load_loss_csv(path) -> FixedLosses:
    """Read a loss matrix from CSV: ``T`` rows, ``N`` columns, optional header."""
    with open(Path(path), newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise EnvironmentConfigError(f"{path}: empty loss file")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        data = [[float(c) for c in r] for r in rows]
    except ValueError as exc:
        raise EnvironmentConfigError(f"{path}: non-numeric loss entry") from exc
    if len({len(r) for r in data}) != 1:
        raise EnvironmentConfigError(f"{path}: ragged rows")
    return FixedLosses(data)


# ---------------------------------------------------------------------------
# regret


def compute_regret(trace: Sequence[tuple[int, Iterable[float]]], mode: str = "realized", means=None) -> float:
    """Regret of a played trace ``[(i_t, loss_row_t), ...]``.

    ``mode="realized"``: learner's total loss minus the best fixed arm's.
    ``mode="pseudo"``: ``sum_t means[i_t] - T * min(means)``.
    """
    return float(regret_curve(trace, mode, means)[-1]) if len(trace) else 0.0


def regret_curve(trace, mode: str = "realized", means=None) -> np.ndarray:
    """Cumulative regret after each round (realized mode uses the best arm of each prefix)."""
    actions = np.array([int(i) for i, _ in trace], dtype=int)
    if mode == "pseudo":
        if means is None:
            raise EnvironmentConfigError("pseudo regret needs the arm means")
        means = np.asarray(means, dtype=float)
        rows = [np.asarray(r) for _, r in trace]
        if any(r.shape != means.shape for r in rows):
            raise EnvironmentConfigError("means length does not match the number of arms")
        return pseudo_regret_curve(actions, means)
    if mode == "realized":
        if means is not None:
            raise EnvironmentConfigError("realized regret does not take means")
        losses = np.vstack([np.asarray(r, dtype=float) for _, r in trace])
        return realized_regret_curve(actions, losses)
    raise EnvironmentConfigError(f"unknown regret mode {mode!r}")


def pseudo_regret_curve(actions: np.ndarray, means: np.ndarray) -> np.ndarray:
    gaps = means - means.min()
    return np.cumsum(gaps[actions])


def realized_regret_curve(actions: np.ndarray, losses: np.ndarray) -> np.ndarray:
    incurred = np.cumsum(losses[np.arange(len(actions)), actions])
    best = np.cumsum(losses, axis=0).min(axis=1)
    return incurred - best
