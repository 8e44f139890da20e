"""Command-line entry point.

    graphbandit simulate --config exp.json [--output out.csv] [--no-cache] [--workers N]
    graphbandit complexity --graph g.json --T 100 [--approx]
    graphbandit graph gen --star 10 [--out g.json]
    graphbandit sweep --config exp.json --param T --values 100 200 400
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import graph as gr
from .complexity import analyze
from .environments import EnvironmentConfigError
from .harness import ConfigError, ExperimentConfig, run_experiment, sweep, sweep_csv, write_outputs
from .policies import ParameterError


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphbandit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an experiment config and write regret curves")
    sim.add_argument("--config", required=True)
    sim.add_argument("--output", help="CSV path (overrides the config)")
    sim.add_argument("--no-cache", action="store_true", help="disable proxy caching")
    sim.add_argument("--workers", type=int)
    sim.add_argument("--master-seed", type=int)

    cx = sub.add_parser("complexity", help="report alpha, delta, Q*, R* for a graph")
    cx.add_argument("--graph", required=True)
    cx.add_argument("--T", type=int, required=True)
    mode = cx.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=None)
    mode.add_argument("--approx", action="store_true")

    g = sub.add_parser("graph", help="graph utilities")
    gsub = g.add_subparsers(dest="graph_command", required=True)
    gen = gsub.add_parser("gen", help="emit a generated graph as JSON")
    kind = gen.add_mutually_exclusive_group(required=True)
    kind.add_argument("--star", type=int, metavar="N")
    kind.add_argument("--edgeless", type=int, metavar="N")
    kind.add_argument("--complete", type=int, metavar="N")
    kind.add_argument("--union-of-stars", metavar="K:M[,K:M...]")
    kind.add_argument("--random", nargs=3, metavar=("N", "P", "SEED"))
    gen.add_argument("--out")

    sw = sub.add_parser("sweep", help="final regret over a grid of T or gap values")
    sw.add_argument("--config", required=True)
    sw.add_argument("--param", choices=["T", "gap"], required=True)
    sw.add_argument("--values", nargs="+", required=True)
    sw.add_argument("--output")
    return ap


def _generated(args) -> gr.FeedbackGraph:
    if args.star is not None:
        return gr.gen_star(args.star)
    if args.edgeless is not None:
        return gr.gen_edgeless(args.edgeless)
    if args.complete is not None:
        return gr.gen_complete(args.complete)
    if args.union_of_stars is not None:
        try:
            sizes = [tuple(int(x) for x in part.split(":")) for part in args.union_of_stars.split(",")]
        except ValueError:
            raise gr.GraphError("--union-of-stars expects K:M pairs, e.g. 3:2,10:1") from None
        return gr.gen_union_of_stars(sizes)
    n, p, seed = args.random
    return gr.gen_random(int(n), float(p), int(seed))


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "simulate":
            cfg = ExperimentConfig.load(args.config)
            overrides = {}
            if args.output:
                overrides["output"] = args.output
            if args.no_cache:
                overrides["cache"] = False
            if args.workers is not None:
                overrides["workers"] = args.workers
            if args.master_seed is not None:
                overrides["master_seed"] = args.master_seed
            cfg = replace(cfg, **overrides)
            curve = run_experiment(cfg)
            if cfg.output:
                out = Path(cfg.output)
                if not out.is_absolute() and not args.output:
                    out = Path(cfg.base_dir) / out
                out, summary = write_outputs(curve, out)
                print(f"wrote {out} and {summary}", file=sys.stderr)
            else:
                sys.stdout.write(curve.to_csv())
        elif args.command == "complexity":
            path = Path(args.graph)
            if not path.exists():
                raise ConfigError(f"graph file not found: {path}")
            g = gr.load_graph(path)
            exact = False if args.approx else (True if args.exact else None)
            report = analyze(g, args.T, exact=exact)
            print(json.dumps(report.to_dict()))
        elif args.command == "graph":
            g = _generated(args)
            _emit(json.dumps(g.to_dict()) + "\n", args.out)
        elif args.command == "sweep":
            cfg = ExperimentConfig.load(args.config)
            values = [int(v) if args.param == "T" else float(v) for v in args.values]
            _emit(sweep_csv(sweep(cfg, args.param, values)), args.output)
    except (ConfigError, gr.GraphError, EnvironmentConfigError, ParameterError,
            gr.SizeGuardError, OSError, ValueError) as exc:
        print(f"graphbandit: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
