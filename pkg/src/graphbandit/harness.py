"""Experiment orchestration: graph x environment x policy x seed grids.

A config is one JSON document, e.g.::

    {
      "graph": {"generator": "star", "n": 256},
      "environment": {"type": "hard", "I": "leaves", "j_star": 0, "gap": "T^-1/3"},
      "policies": ["exp3ex", "exp3set"],
      "T": 1000, "num_seeds": 20, "master_seed": 0,
      "output": "regret.csv"
    }

Graph sources: ``{"path": "g.json"}`` or ``{"generator": "star"|"edgeless"|
"complete"|"random"|"union_of_stars", ...}``.  Environments: ``hard``
(Bernoulli hard instance), ``bernoulli`` (explicit ``means``) and ``fixed``
(``matrix`` or ``path`` to a CSV).
"""
from __future__ import annotations

import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import graph as gr
from .environments import (
    BernoulliLosses,
    HardInstanceSpec,
    LossMatrix,
    gen_fixed,
    gen_hard_instance,
    load_loss_csv,
    pseudo_regret_curve,
    realized_regret_curve,
)
from .policies import POLICY_IDS, feedback_from_row, make_policy
from .rng import SAMPLING, CounterRNG, derive_seed, sample_index

CSV_HEADER = "policy,seed,t,cum_regret"
SUMMARY_HEADER = "policy,t,mean,stderr"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    graph: dict
    environment: dict
    policies: tuple
    T: int
    num_seeds: int = 1
    master_seed: int = 0
    output: str | None = None
    cache: bool = True
    exact: bool | None = None
    workers: int = 1
    regret: str | None = None  # "pseudo" | "realized"; default depends on environment
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        if int(self.T) < 1:
            raise ConfigError("T must be >= 1")
        if int(self.num_seeds) < 1:
            raise ConfigError("num_seeds must be >= 1")
        if not self.policies:
            raise ConfigError("at least one policy is required")
        unknown = [p for p in self.policies if p not in POLICY_IDS]
        if unknown:
            raise ConfigError(f"unknown policies {unknown}; known: {list(POLICY_IDS)}")
        if self.regret not in (None, "pseudo", "realized"):
            raise ConfigError(f"unknown regret mode {self.regret!r}")

    @classmethod
    def from_dict(cls, data: dict, base_dir: str = ".") -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        missing = [k for k in ("graph", "environment", "policies", "T") if k not in data]
        if missing:
            raise ConfigError(f"config missing keys: {missing}")
        known = {f for f in cls.__dataclass_fields__ if f != "base_dir"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        kw = dict(data)
        kw["policies"] = tuple(kw["policies"])
        try:
            return cls(base_dir=base_dir, **kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data, base_dir=str(path.parent))


def _resolve(cfg: ExperimentConfig, p) -> Path:
    p = Path(p)
    return p if p.is_absolute() else Path(cfg.base_dir) / p


def build_graph_from_spec(spec: dict, base_dir: str = ".") -> gr.FeedbackGraph:
    if not isinstance(spec, dict):
        raise ConfigError("graph spec must be an object")
    if "path" in spec:
        p = Path(spec["path"])
        p = p if p.is_absolute() else Path(base_dir) / p
        if not p.exists():
            raise ConfigError(f"graph file not found: {p}")
        return gr.load_graph(p)
    kind = spec.get("generator")
    try:
        if kind == "star":
            return gr.gen_star(spec["n"])
        if kind == "edgeless":
            return gr.gen_edgeless(spec["n"])
        if kind == "complete":
            return gr.gen_complete(spec["n"])
        if kind == "random":
            return gr.gen_random(spec["n"], spec["p"], spec.get("seed", 0))
        if kind == "union_of_stars":
            return gr.gen_union_of_stars([tuple(s) for s in spec["sizes"]])
    except KeyError as exc:
        raise ConfigError(f"graph generator {kind!r} missing parameter {exc}") from exc
    raise ConfigError(f"unknown graph generator {kind!r}")


def _gap_value(gap, T: int) -> float:
    if isinstance(gap, str):
        if gap.replace(" ", "") in ("T^-1/3", "T^(-1/3)"):
            return T ** (-1.0 / 3.0)
        raise ConfigError(f"unrecognised gap expression {gap!r}")
    return float(gap)


def _near_optimal_set(g: gr.FeedbackGraph, I) -> frozenset:
    if I == "leaves":
        hubs = set(np.flatnonzero(g.adjacency.sum(axis=1) > 1).tolist())
        return frozenset(v for v in range(g.n) if v not in hubs)
    if I == "all":
        return frozenset(range(g.n))
    return frozenset(int(i) for i in I)


def build_environment(cfg: ExperimentConfig, g: gr.FeedbackGraph, seed: int) -> LossMatrix:
    spec = cfg.environment
    if not isinstance(spec, dict):
        raise ConfigError("environment spec must be an object")
    kind = spec.get("type")
    if kind == "hard":
        I = _near_optimal_set(g, spec.get("I", "leaves"))
        j_star = int(spec.get("j_star", min(I) if I else 0))
        hs = HardInstanceSpec(I, j_star, _gap_value(spec.get("gap", "T^-1/3"), cfg.T), seed)
        return gen_hard_instance(g, hs, cfg.T)
    if kind == "bernoulli":
        means = spec.get("means")
        if means is None or len(means) != g.n:
            raise ConfigError("bernoulli environment needs one mean per action")
        return BernoulliLosses(means, cfg.T, seed)
    if kind == "fixed":
        env = gen_fixed(spec["matrix"]) if "matrix" in spec else load_loss_csv(_resolve(cfg, spec["path"]))
        if env.N != g.n or env.T < cfg.T:
            raise ConfigError(f"loss matrix is {env.T}x{env.N}, need at least {cfg.T}x{g.n}")
        return env
    raise ConfigError(f"unknown environment type {kind!r}")


# ---------------------------------------------------------------------------
# runs


@dataclass
class RunResult:
    policy: str
    seed: int
    curve: np.ndarray
    actions: np.ndarray


@dataclass
class RegretCurve:
    policies: tuple
    num_seeds: int
    T: int
    runs: list  # RunResult in run-index order

    def per_seed(self, policy: str) -> np.ndarray:
        return np.vstack([r.curve for r in self.runs if r.policy == policy])

    def mean(self, policy: str) -> np.ndarray:
        return self.per_seed(policy).mean(axis=0)

    def stderr(self, policy: str) -> np.ndarray:
        c = self.per_seed(policy)
        if c.shape[0] < 2:
            return np.zeros(c.shape[1])
        return c.std(axis=0, ddof=1) / np.sqrt(c.shape[0])

    def final(self, policy: str) -> np.ndarray:
        return self.per_seed(policy)[:, -1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for r in self.runs:
            for t, v in enumerate(r.curve, start=1):
                buf.write(f"{r.policy},{r.seed},{t},{float(v)!r}\n")
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        buf.write(SUMMARY_HEADER + "\n")
        for pol in self.policies:
            m, s = self.mean(pol), self.stderr(pol)
            for t in range(self.T):
                buf.write(f"{pol},{t + 1},{float(m[t])!r},{float(s[t])!r}\n")
        return buf.getvalue()


def simulate_run(g, env: LossMatrix, policy, T: int, sampling_seed: int):
    """Play one policy against one loss matrix; returns the actions taken."""
    rng = CounterRNG(sampling_seed, SAMPLING)
    actions = np.empty(T, dtype=np.int64)
    for t in range(T):
        p = policy.distribution()
        i = sample_index(p, rng.uniform(t))
        row = env.row(t)
        policy.update(feedback_from_row(g, i, row), p)
        actions[t] = i
    return actions


_PROXY_CACHES: dict = {}


def _shared_proxy_cache(g, T):
    key = (g.fingerprint(), T)
    if key not in _PROXY_CACHES:
        if len(_PROXY_CACHES) > 8:
            _PROXY_CACHES.clear()
        _PROXY_CACHES[key] = {}
    return _PROXY_CACHES[key]


def _run_one(cfg: ExperimentConfig, run_index: int) -> RunResult:
    g = build_graph_from_spec(cfg.graph, cfg.base_dir)
    n_pol = len(cfg.policies)
    seed_idx, pol_idx = divmod(run_index, n_pol)
    name = cfg.policies[pol_idx]
    env = build_environment(cfg, g, derive_seed(cfg.master_seed, seed_idx, 0))
    opts = {}
    if name == "exp3ex":
        opts["cache"] = cfg.cache
        if cfg.cache:
            opts["proxy_cache"] = _shared_proxy_cache(g, cfg.T)
    policy = make_policy(name, g, cfg.T, **opts)
    actions = simulate_run(g, env, policy, cfg.T, derive_seed(cfg.master_seed, seed_idx, 1, pol_idx))
    mode = cfg.regret or ("pseudo" if env.means is not None else "realized")
    if mode == "pseudo":
        if env.means is None:
            raise ConfigError("pseudo regret needs an environment with known means")
        curve = pseudo_regret_curve(actions, env.means)
    else:
        losses = np.vstack([env.row(t) for t in range(cfg.T)])
        curve = realized_regret_curve(actions, losses)
    return RunResult(name, seed_idx, curve, actions)


def worker_count(cfg: ExperimentConfig) -> int:
    n = max(1, int(cfg.workers))
    cap = os.environ.get("GRAPHBANDIT_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def run_experiment(cfg: ExperimentConfig) -> RegretCurve:
    """Run every (seed, policy) pair; results are ordered by run index.

    Seeds of environments and of action sampling are pure functions of the
    master seed and the run coordinates, so outputs do not depend on the
    number of workers or on proxy caching.
    """
    g = build_graph_from_spec(cfg.graph, cfg.base_dir)
    build_environment(cfg, g, 0)  # validate before fanning out
    total = cfg.num_seeds * len(cfg.policies)
    workers = worker_count(cfg)
    if workers == 1:
        runs = [_run_one(cfg, k) for k in range(total)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            runs = list(ex.map(_run_one, [cfg] * total, range(total)))
    return RegretCurve(tuple(cfg.policies), cfg.num_seeds, cfg.T, runs)


def write_outputs(curve: RegretCurve, output) -> tuple[Path, Path]:
    out = Path(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(curve.to_csv())
    summary = out.with_name(out.stem + ".summary.csv")
    summary.write_text(curve.summary_csv())
    return out, summary


def sweep(cfg: ExperimentConfig, param: str, values) -> list[dict]:
    """Final-regret statistics of ``cfg`` for each value of ``T`` or ``gap``."""
    rows = []
    for v in values:
        if param == "T":
            c = replace(cfg, T=int(v))
        elif param == "gap":
            env = dict(cfg.environment)
            if env.get("type") != "hard":
                raise ConfigError("gap sweeps need a hard environment")
            env["gap"] = v
            c = replace(cfg, environment=env)
        else:
            raise ConfigError(f"cannot sweep over {param!r}; use 'T' or 'gap'")
        res = run_experiment(c)
        for pol in c.policies:
            fin = res.final(pol)
            se = fin.std(ddof=1) / np.sqrt(len(fin)) if len(fin) > 1 else 0.0
            rows.append({"param": param, "value": v, "policy": pol,
                         "mean_final_regret": float(fin.mean()), "stderr": float(se)})
    return rows


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write("param,value,policy,mean_final_regret,stderr\n")
    for r in rows:
        buf.write(f"{r['param']},{r['value']},{r['policy']},{r['mean_final_regret']!r},{r['stderr']!r}\n")
    return buf.getvalue()
