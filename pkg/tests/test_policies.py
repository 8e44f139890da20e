import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphbandit import graph as gr
from graphbandit.complexity import SplitResult
from graphbandit.environments import HardInstanceSpec, gen_fixed, gen_hard_instance
from graphbandit.harness import simulate_run
from graphbandit.policies import (
    ContractError,
    EstimatorError,
    EtcHub,
    Exp3Ex,
    Exp3Set,
    Feedback,
    ParameterError,
    exp3ex_distribution,
    exp3ex_update,
    exploration_distribution,
    feedback_from_row,
    loss_estimates,
    make_policy,
    partition_actions,
    partition_sizes,
)
from graphbandit.rng import CounterRNG, sample_index


def proxy(D_prime=(), D=()):
    return SplitResult(frozenset(), frozenset(), frozenset(D), frozenset(D_prime), 0.5, np.zeros(1), 0.0)


def ref_level(x):
    """Smallest k >= 1 with x > 2^-k, by exact rational comparison."""
    x = Fraction(x)
    if x == 0:
        return math.inf
    k = 1
    while x <= Fraction(1, 2**k):
        k += 1
    return k


def rederive(q, g):
    N = g.n
    K, L = partition_sizes(N)
    k = {i: ref_level(q[i]) for i in range(N)}
    buckets, tail = {}, set()
    for i in range(N):
        if k[i] > K:
            tail.add(i)
            continue
        deg = sum(1 for j in range(N) if k[j] == k[i] and g.adjacency[i, j])
        l = 1
        while Fraction(deg) <= Fraction(N, 2**l):
            l += 1
        buckets.setdefault((k[i], min(l, L)), set()).add(i)
    return buckets, tail


def test_partition_sizes():
    assert partition_sizes(8) == (15, 3)
    assert partition_sizes(4) == (10, 2)
    assert partition_sizes(1) == (1, 1)


def test_partition_levels_example():
    part = partition_actions(np.array([0.5, 0.3, 0.15, 0.05]), gr.gen_edgeless(4))
    assert part.level.tolist() == [2, 2, 3, 5]
    assert part.tail == frozenset()


def test_partition_star_degrees():
    # hub 3 and leaf 0 share a level; the other leaves sit lower
    q = np.array([0.4, 0.05, 0.05, 0.5])
    part = partition_actions(q, gr.gen_star(4))
    assert part.level[0] == part.level[3] == 2
    assert part.degree[3] == 2 and part.degree[0] == 1
    # deg 2 lies in (1, 2] -> l = 2; deg 1 would need l = 3, clamped to L = 2
    assert part.sublevel[3] == 2 and part.sublevel[0] == 2


def test_partition_uniform_eight():
    part = partition_actions(np.full(8, 1 / 8), gr.gen_edgeless(8))
    assert (part.K, part.L) == (15, 3)
    # 1/8 lies in (2^-4, 2^-3]
    assert set(part.level.tolist()) == {4}


def test_partition_tail():
    q = np.array([1 - 2e-4, 1e-4, 1e-4, 0.0])
    part = partition_actions(q / q.sum(), gr.gen_edgeless(4))
    assert part.tail == {1, 2, 3}


def test_partition_rederivation_random():
    rng = np.random.default_rng(0)
    graphs = [gr.gen_random(n, 0.3, n) for n in (2, 5, 9, 16, 23)]
    for trial in range(1000):
        g = graphs[trial % len(graphs)]
        q = rng.dirichlet(np.full(g.n, float(rng.choice([0.05, 0.5, 5.0]))))
        if trial % 7 == 0:
            q = np.full(g.n, 1.0 / g.n)
        part = partition_actions(q, g)
        buckets, tail = rederive(q, g)
        assert {kl: frozenset(v) for kl, v in buckets.items()} == part.buckets
        assert part.tail == tail
        members = set().union(*part.buckets.values()) | part.tail
        assert members == set(range(g.n))


def test_exploration_example():
    part = partition_actions(np.array([0.5, 0.3, 0.15, 0.05]), gr.gen_edgeless(4))
    part = type(part)(10, 2, {(2, 2): frozenset({0, 1})}, frozenset(), part.level, part.degree, part.sublevel)
    u = exploration_distribution(part, {(2, 2): proxy(D_prime={3})}, 4)
    assert u[3] == pytest.approx(6 / 21, abs=1e-15)
    assert u[:3] == pytest.approx([5 / 21] * 3, abs=1e-15)
    assert u.sum() == pytest.approx(1.0, abs=1e-15)


def test_exploration_all_empty_uniform():
    part = partition_actions(np.full(4, 0.25), gr.gen_edgeless(4))
    part = type(part)(10, 2, {}, frozenset(range(4)), part.level, part.degree, part.sublevel)
    assert exploration_distribution(part, {}, 4) == pytest.approx(np.full(4, 0.25))


def test_exploration_missing_proxy():
    part = partition_actions(np.full(4, 0.25), gr.gen_edgeless(4))
    with pytest.raises(ContractError):
        exploration_distribution(part, {}, 4)


@given(st.integers(2, 12), st.floats(0, 0.6), st.integers(0, 10**5))
@settings(max_examples=30, deadline=None)
def test_exploration_floor(n, p, seed):
    g = gr.gen_random(n, p, seed)
    q = np.random.default_rng(seed).dirichlet(np.ones(n))
    part = partition_actions(q, g)
    props = {kl: proxy(D_prime=[max(I)]) for kl, I in part.buckets.items()}
    u = exploration_distribution(part, props, n)
    assert u.sum() == pytest.approx(1.0, abs=1e-12)
    assert u.min() >= 1 / ((part.K * part.L + 1) * n) - 1e-15


def test_bucket_rate_arithmetic():
    pr = proxy(D_prime=range(8), D=range(4))
    assert pr.rates(100) == pytest.approx(min(0.05, 0.5 * 100 ** (-2 / 3)))
    assert pr.rates(100) == pytest.approx(0.023208, abs=1e-6)


def test_first_round_uniform_edgeless():
    pol = Exp3Ex(gr.gen_edgeless(4), 100)
    p, last = exp3ex_distribution(pol)
    assert p == pytest.approx(np.full(4, 0.25), abs=1e-15)
    assert last["gamma"] == min(1 / (last["eta"] * 100), 0.5)


def test_estimator_formula():
    g = gr.build_graph(3, [(0, 1)])
    p = np.array([0.5, 0.3, 0.2])
    est = loss_estimates(g, Feedback(0, {0: 0.4, 1: 0.6}), p)
    assert est[1] == pytest.approx(0.75)
    assert est[0] == pytest.approx(0.8)
    assert est[2] == 0.0


def test_update_leaves_unobserved():
    g = gr.build_graph(3, [(0, 1)])
    pol = Exp3Ex(g, 50)
    p = pol.distribution()
    exp3ex_update(pol, Feedback(0, {0: 0.2, 1: 0.6}), p)
    assert pol.cum_loss_est[2] == 0.0 and pol.t == 1


def test_estimator_zero_probability_raises():
    g = gr.gen_edgeless(2)
    with pytest.raises(EstimatorError):
        loss_estimates(g, Feedback(1, {1: 0.5}), np.array([1.0, 0.0]))


def test_feedback_requires_self_observation():
    with pytest.raises(ContractError):
        Feedback(0, {1: 0.3})


def test_estimator_unbiased_small():
    g = gr.build_graph(4, [(0, 1), (2, 3), (3, 1)])
    p = np.array([0.1, 0.2, 0.3, 0.4])
    losses = np.array([0.9, 0.4, 0.7, 0.2])
    rng = np.random.default_rng(5)
    draws = rng.choice(4, size=20000, p=p)
    est = np.array([loss_estimates(g, feedback_from_row(g, i, losses), p) for i in draws])
    se = est.std(axis=0, ddof=1) / math.sqrt(len(draws))
    assert np.all(np.abs(est.mean(axis=0) - losses) <= 4 * se)


def run_trace(policy, g, env, T, seed):
    rng = CounterRNG(seed, 1)
    ps = []
    for t in range(T):
        p = policy.distribution()
        ps.append(p.copy())
        i = sample_index(p, rng.uniform(t))
        policy.update(feedback_from_row(g, i, env.row(t)), p)
    return np.array(ps)


def test_invariants_small_run():
    g = gr.gen_random(12, 0.25, 3)
    T = 120
    env = gen_hard_instance(g, HardInstanceSpec(range(12), 4, 0.2, 9), T)
    pol = Exp3Ex(g, T)
    etas = []
    for t in range(T):
        p = pol.distribution()
        last = pol.last
        KL = last["partition"].K * last["partition"].L
        assert abs(p.sum() - 1) <= 1e-9
        assert p.min() >= last["gamma"] / ((KL + 1) * g.n) - 1e-12
        assert last["gamma"] <= 0.5
        etas.append(last["eta"])
        i = sample_index(p, (t * 0.618) % 1)
        pol.update(feedback_from_row(g, i, env.row(t)), p)
    assert all(a >= b for a, b in zip(etas, etas[1:]))


def test_cache_transparency():
    g = gr.gen_random(10, 0.3, 1)
    T = 80
    env = gen_hard_instance(g, HardInstanceSpec({0, 3, 5, 7}, 3, 0.25, 2), T)
    a = run_trace(Exp3Ex(g, T, cache=True), g, env, T, 11)
    b = run_trace(Exp3Ex(g, T, cache=False), g, env, T, 11)
    assert np.array_equal(a, b)


def test_single_action():
    g = gr.gen_edgeless(1)
    for name in ("exp3ex", "exp3set", "etc-hub"):
        pol = make_policy(name, g, 10)
        env = gen_fixed(np.full((10, 1), 0.3))
        assert np.all(simulate_run(g, env, pol, 10, 0) == 0)


def test_exp3set_identical_arms_stay_uniform():
    g = gr.gen_complete(5)
    pol = Exp3Set(g, 50)
    env = gen_fixed(np.full((50, 5), 0.5))
    for t in range(50):
        p = pol.distribution()
        assert p == pytest.approx(np.full(5, 0.2), abs=1e-12)
        pol.update(feedback_from_row(g, t % 5, env.row(t)), p)


def test_exp3set_rate():
    g = gr.gen_star(9)
    pol = Exp3Set(g, 400)
    assert pol.alpha == 8
    assert pol.eta == pytest.approx(math.sqrt(math.log(9) / (8 * 400)))


def test_etc_schedule():
    g = gr.gen_star(4)
    pol = EtcHub(g, 8)
    losses = np.tile([1.0, 1.0, 0.0, 1.0], (8, 1))
    actions = simulate_run(g, gen_fixed(losses), pol, 8, 0)
    assert actions.tolist() == [3] * 4 + [2] * 4


def test_etc_tie_to_smallest():
    g = gr.gen_star(4)
    actions = simulate_run(g, gen_fixed(np.zeros((8, 4))), EtcHub(g, 8), 8, 0)
    assert actions[-1] == 0


def test_etc_needs_hub():
    with pytest.raises(ParameterError):
        EtcHub(gr.gen_edgeless(3), 10)
    with pytest.raises(ParameterError):
        EtcHub(gr.gen_star(4), 10, hub=0)


def test_etc_finds_best_arm():
    g = gr.gen_star(10)
    T, hits = 1000, 0
    for seed in range(100):
        j = seed % 9
        env = gen_hard_instance(g, HardInstanceSpec(range(9), j, 0.3, seed), T)
        pol = EtcHub(g, T)
        simulate_run(g, env, pol, T, seed)
        hits += pol.committed == j
    assert hits >= 80


def test_unknown_policy():
    with pytest.raises(ParameterError):
        make_policy("ucb", gr.gen_star(3), 10)
