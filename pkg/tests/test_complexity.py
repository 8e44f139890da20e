import math

import numpy as np
import pytest

from graphbandit import graph as gr
from graphbandit.complexity import (
    ParameterError,
    Regime,
    analyze,
    delta_grid,
    q_complexity,
    q_complexity_fixed_delta,
    r_complexity,
    r_complexity_set,
    split_proxies,
)
from oracles import brute_r_set, brute_r_star, vertex_enumeration_lp


def q_oracle(g, I, gap, T):
    """Unreduced program over all actions, solved by vertex enumeration."""
    n = g.n
    inside = np.isin(np.arange(n), sorted(I))
    c = np.where(inside, T * gap, T).astype(float)
    A = T * g.adjacency[:, sorted(I)].T.astype(float)
    b = np.full(len(I), 1.0 / gap**2)
    val, _ = vertex_enumeration_lp(c, A, b, 1.0)
    return min(val, T * gap)


def test_delta_grid():
    assert delta_grid(1, 4) == [0.5, 0.25, 0.125]
    assert len(delta_grid(3, 27)) == math.floor(math.log2(81)) + 1


def test_q_complete_pair():
    val, pi = q_complexity_fixed_delta(gr.gen_complete(2), {0, 1}, 0.5, 16)
    assert val == pytest.approx(2.0, abs=1e-6)
    assert pi.sum() == pytest.approx(0.25, abs=1e-6)


def test_q_single_action_forced():
    val, pi = q_complexity_fixed_delta(gr.gen_edgeless(1), {0}, 0.5, 4)
    assert val == pytest.approx(2.0, abs=1e-6)
    assert pi[0] == pytest.approx(1.0, abs=1e-6)


def test_q_star_quarter_gap():
    # leaves at 1/4 each cost 64 * 1/4 * 3/4 = 12, cheaper than the hub (16)
    g = gr.gen_star(4)
    val, pi = q_complexity_fixed_delta(g, {0, 1, 2}, 0.25, 64)
    assert val == pytest.approx(12.0, abs=1e-6)
    assert val == pytest.approx(q_oracle(g, {0, 1, 2}, 0.25, 64), abs=1e-6)


def test_q_infeasible_pays_gap():
    # coverage 1/(T gap^2) > 1 cannot be met
    val, pi = q_complexity_fixed_delta(gr.gen_edgeless(3), {0}, 1 / 8, 10)
    assert val == pytest.approx(10 / 8)
    assert not pi.any()


def test_q_parameter_errors():
    g = gr.gen_star(3)
    with pytest.raises(ParameterError):
        q_complexity_fixed_delta(g, set(), 0.25, 10)
    with pytest.raises(ParameterError):
        q_complexity_fixed_delta(g, {0}, 0.75, 10)
    with pytest.raises(ParameterError):
        q_complexity(g, [], 10)


def test_q_matches_oracle_random():
    rng = np.random.default_rng(4)
    for trial in range(25):
        n = int(rng.integers(2, 6))
        g = gr.gen_random(n, float(rng.uniform(0.1, 0.6)), trial)
        I = [v for v in range(n) if rng.random() < 0.6] or [0]
        T = int(rng.choice([10, 50, 100]))
        for gap in delta_grid(n, T)[:4]:
            val, _ = q_complexity_fixed_delta(g, I, gap, T)
            assert val == pytest.approx(q_oracle(g, I, gap, T), abs=1e-6)
            assert val <= T * gap + 1e-12


def test_q_single_action_range():
    assert 0 < q_complexity(gr.gen_edgeless(1), {0}, 4) <= 2 + 1e-9


def test_q_edgeless_sandwich():
    g = gr.gen_edgeless(3)
    q = q_complexity(g, g.vertices, 27)
    r = 9.0
    assert r / (10 * math.log(3)) / 4 <= q <= 2 * r


def test_r_set_examples():
    val, J = r_complexity_set(gr.gen_star(4), {0, 1, 2}, 8)
    assert val == pytest.approx(4.0) and J == frozenset()
    assert r_complexity_set(gr.gen_star(4), set(), 8) == (0.0, frozenset())
    e = gr.gen_edgeless(3)
    val, J = r_complexity_set(e, e.vertices, 27)
    assert val == pytest.approx(9.0) and J == e.vertices


def test_r_examples():
    assert r_complexity(gr.gen_star(4), 8) == pytest.approx(4.0)
    assert r_complexity(gr.gen_edgeless(3), 27) == pytest.approx(9.0)
    for T in (1, 5, 70):
        assert r_complexity(gr.gen_edgeless(1), T) == pytest.approx(math.sqrt(T))


def test_r_guard():
    with pytest.raises(gr.SizeGuardError):
        r_complexity(gr.gen_edgeless(11), 10)
    with pytest.raises(gr.SizeGuardError):
        r_complexity_set(gr.gen_edgeless(12), range(11), 10)


def test_r_matches_brute():
    rng = np.random.default_rng(2)
    for trial in range(10):
        n = int(rng.integers(2, 6))
        g = gr.gen_random(n, float(rng.uniform(0.1, 0.5)), 100 + trial)
        T = int(rng.choice([8, 64, 500]))
        assert r_complexity(g, T) == pytest.approx(brute_r_star(g.adjacency.tolist(), T), rel=1e-12)
        I = [v for v in range(n) if rng.random() < 0.5] or [n - 1]
        assert r_complexity_set(g, I, T)[0] == pytest.approx(brute_r_set(g.adjacency.tolist(), I, T), rel=1e-12)


def test_r_monotone_in_T():
    for seed in range(5):
        g = gr.gen_random(6, 0.3, seed)
        I = [0, 2, 3, 5]
        vals = [r_complexity_set(g, I, T)[0] for T in (1, 3, 10, 40, 200, 1000)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_split_star_leaves():
    g = gr.gen_star(10)
    res = split_proxies(g, range(9), 30)
    assert res.J == frozenset() and res.D_prime == {9}
    assert res.criterion_value == pytest.approx(30 ** (2 / 3))


def test_split_edgeless():
    g = gr.gen_edgeless(3)
    res = split_proxies(g, g.vertices, 1000)
    assert res.J == g.vertices and res.D == g.vertices
    assert res.criterion_value == pytest.approx(math.sqrt(3000))


def test_split_singleton_and_invariants():
    rng = np.random.default_rng(6)
    for trial in range(15):
        n = int(rng.integers(1, 9))
        g = gr.gen_random(n, float(rng.uniform(0, 0.5)), trial)
        T = int(rng.choice([5, 40, 300]))
        i = int(rng.integers(0, n))
        res = split_proxies(g, {i}, T)
        assert res.criterion_value <= max(math.sqrt(T), T ** (2 / 3)) + 1e-9
        assert gr.dominates(g, res.D | res.D_prime, {i})
        I = frozenset(v for v in range(n) if rng.random() < 0.5) or frozenset({0})
        res = split_proxies(g, I, T)
        assert res.J | res.J_prime == I and not res.J & res.J_prime
        assert res.D <= I and gr.dominates(g, res.D, res.J)
        assert gr.dominates(g, res.D_prime, res.J_prime)


def test_split_fallback_when_grid_infeasible():
    # T = 1: every grid gap needs coverage 1/gap^2 > 1
    g = gr.gen_star(3)
    res = split_proxies(g, {0, 1}, 1)
    assert res.fallback and res.J == {0, 1} and res.D == {0, 1}


def test_split_empty_rejected():
    with pytest.raises(ParameterError):
        split_proxies(gr.gen_star(3), [], 10)


def test_analyze_examples():
    r = analyze(gr.gen_star(4), 8)
    assert (r.alpha, r.delta, r.regime) == (3, 1, Regime.SMALL_T)
    assert r.r_star == pytest.approx(4.0)
    r = analyze(gr.gen_edgeless(3), 27)
    assert (r.alpha, r.delta, r.regime) == (3, 3, Regime.LARGE_T)
    assert r.r_star == pytest.approx(9.0)
    r = analyze(gr.gen_edgeless(1), 5)
    assert (r.alpha, r.delta, r.regime) == (1, 1, Regime.LARGE_T)
    assert set(r.to_dict()) == {"alpha", "delta", "q_star", "r_star", "regime", "exact"}


def test_analyze_approximate():
    g = gr.gen_star(40)
    r = analyze(g, 100)
    assert not r.exact
    assert r.alpha == 39 and r.delta == 1
    assert r.r_star == pytest.approx(100 ** (2 / 3))
