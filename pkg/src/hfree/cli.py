"""Command-line front end: ``hfree <subcommand> [flags]``.

Every subcommand builds an experiment config and runs it, so ``--seed``,
``--trials``, ``--out-dir``, ``--verify`` and the ``--budget-*`` caps mean
the same thing everywhere. Without ``--out-dir`` a single trial prints its
certificate and several trials print the aggregate.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiment import ConfigError, ExperimentConfig, dump_certificate, run_experiment
from .hypercore import HypergraphError


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run control")
    g.add_argument("--seed", type=int, default=None, help="base seed (default 0)")
    g.add_argument("--trials", type=int, default=None, help="number of seeds base..base+trials-1")
    g.add_argument("--out-dir", default=None, help="write trials.csv, aggregate.json and certificates here")
    g.add_argument("--verify", choices=["none", "freeness", "full"], default=None)
    g.add_argument("--workers", type=int, default=None, help="process pool size")
    g.add_argument("--budget-nodes", type=int, default=None, help="search node cap")
    g.add_argument("--budget-seconds", type=float, default=None, help="wall-clock cap per search")
    g.add_argument("--budget-resamples", type=int, default=None, help="resampling cap")


def _host_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", help="host hypergraph file")
    p.add_argument("--random", nargs=3, metavar=("N", "R", "P"), help="sample G(N, R, P) per seed instead")
    p.add_argument("--forbid", help="remove a maximal packing of this pattern from the random host")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hfree", description="Coloring and constructing H-free hypergraphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="density, automorphisms and canonical code of a pattern")
    p.add_argument("pattern", help="pattern (fr:3, rl:3:2, clique:3:4, ...) or file")
    _common(p)

    p = sub.add_parser("check-free", help="search a host for copies of a pattern")
    _host_args(p)
    p.add_argument("--pattern", required=True)
    _common(p)

    p = sub.add_parser("solve", help="exact independence or weak chromatic number")
    p.add_argument("what", choices=["chi", "alpha"])
    _host_args(p)
    _common(p)

    p = sub.add_parser("color", help="color a host with one of the bounded-palette methods")
    p.add_argument("method", choices=["lll", "peel", "indnbd", "tree"])
    _host_args(p)
    p.add_argument("--k", type=int, help="palette size (lll, indnbd)")
    p.add_argument("--alpha", default=None, help="peeling exponent, e.g. 1/2")
    p.add_argument("--extractor", choices=["exact", "turan"], default=None)
    p.add_argument("--tree", help="forbidden r-tree (path:R:T, star:R:T or file)")
    p.add_argument("--no-trace", action="store_true", help="omit the tree-coloring trace")
    _common(p)

    p = sub.add_parser("plan", help="evaluate the deletion-construction constants")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--strict", action="store_true", help="raise on unbalanced or sparse families")
    _common(p)

    p = sub.add_parser("construct", help="build an H-free hypergraph")
    p.add_argument("kind", choices=["deletion", "cliquefree"])
    p.add_argument("--family", help="forbidden family (deletion)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, help="uniformity (cliquefree)")
    p.add_argument("--p", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("-o", "--output", help="write the hypergraph of a single trial here")
    _common(p)

    p = sub.add_parser("constants", help="closed-form constants against the generic pipeline")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--rl", nargs=2, type=int, metavar=("R", "L"))
    grp.add_argument("--fr", type=int, metavar="R")
    _common(p)

    p = sub.add_parser("experiment", help="run a batch described by a JSON or YAML config")
    p.add_argument("--config", required=True)
    _common(p)
    return ap


def _host_params(a) -> dict:
    if a.random:
        n, r, p = a.random
        host = {"n": int(n), "r": int(r), "p": float(p)}
        if a.forbid:
            host["forbid"] = a.forbid
        return {"host": host}
    if not a.input:
        raise ConfigError("give a host file or --random N R P")
    return {"input": a.input}


def _drop_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def config_from_args(a) -> ExperimentConfig:
    cmd = a.command
    if cmd == "invariants":
        task, params = "invariants", {"pattern": a.pattern}
    elif cmd == "check-free":
        task, params = "check-free", {**_host_params(a), "pattern": a.pattern}
    elif cmd == "solve":
        task, params = f"solve-{a.what}", _host_params(a)
    elif cmd == "color":
        task = f"color-{a.method}"
        params = _host_params(a)
        if a.method in ("lll", "indnbd"):
            if a.k is None:
                raise ConfigError(f"color {a.method} needs --k")
            params["k"] = a.k
        elif a.method == "peel":
            params.update(_drop_none({"alpha": a.alpha, "extractor": a.extractor}))
        else:
            if not a.tree:
                raise ConfigError("color tree needs --tree")
            params["tree"] = a.tree
            if a.no_trace:
                params["trace"] = False
    elif cmd == "plan":
        task = "plan"
        params = _drop_none({"family": a.family, "n": a.n, "p": a.p, "t": a.t})
        if a.strict:
            params["strict"] = True
    elif cmd == "construct":
        if a.kind == "deletion":
            if not a.family:
                raise ConfigError("construct deletion needs --family")
            task, params = "construct-deletion", _drop_none({"family": a.family, "n": a.n, "p": a.p, "t": a.t})
        else:
            if a.r is None:
                raise ConfigError("construct cliquefree needs --r")
            task, params = "construct-cliquefree", {"n": a.n, "r": a.r}
    elif cmd == "constants":
        task = "constants"
        params = {"rl": list(a.rl)} if a.rl else {"fr": a.fr}
    else:
        raise ConfigError(f"unknown command {cmd}")
    return _apply_flags(ExperimentConfig(task=task, params=params), a)


def _apply_flags(cfg: ExperimentConfig, a) -> ExperimentConfig:
    data = {
        "task": cfg.task,
        "params": cfg.params,
        "seeds": cfg.seeds,
        "base_seed": cfg.base_seed,
        "trials": cfg.trials,
        "verify": cfg.verify,
        "budget": dict(cfg.budget),
        "out_dir": cfg.out_dir,
        "workers": cfg.workers,
    }
    if a.seed is not None:
        data["base_seed"] = a.seed
        data["seeds"] = None
    if a.trials is not None:
        data["trials"] = a.trials
        data["seeds"] = None
    for key, flag in (("out_dir", a.out_dir), ("verify", a.verify), ("workers", a.workers)):
        if flag is not None:
            data[key] = flag
    for key, flag in (
        ("max_nodes", a.budget_nodes),
        ("max_seconds", a.budget_seconds),
        ("max_resamples", a.budget_resamples),
    ):
        if flag is not None:
            data["budget"][key] = flag
    return ExperimentConfig(**data)


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        if a.command == "experiment":
            cfg = _apply_flags(ExperimentConfig.load(a.config), a)
        else:
            cfg = config_from_args(a)
    except (ConfigError, HypergraphError, OSError, ValueError) as exc:
        print(f"hfree: {exc}", file=sys.stderr)
        return 2

    res = run_experiment(cfg)
    if cfg.out_dir:
        print(
            f"{res.aggregate['passed']}/{res.aggregate['trials']} trials passed; reports in {cfg.out_dir}",
            file=sys.stderr,
        )
    elif len(res.records) == 1:
        sys.stdout.write(dump_certificate(res.certificates[0]))
    else:
        print(json.dumps(res.aggregate, indent=2, sort_keys=True, default=str))
    out = getattr(a, "output", None)
    if out and res.graphs and res.graphs[0] is not None:
        Path(out).write_text(res.graphs[0])
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
