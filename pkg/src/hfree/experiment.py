"""Seeded trial runner, certificates and CSV/JSON reports.

Every task is a function ``(params, seed, verify, budget) -> (row, cert)``.
``row`` fills the fixed CSV columns; ``cert`` is a JSON certificate with no
runtimes in it, so reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import yaml

from . import rng
from .constructions import (
    VERIFY_LEVELS,
    clique_free_edge_bound_ok,
    clique_free_from_layers,
    clique_free_layers,
    closed_form_constants,
    deletion_construct,
    gen_clique,
    parse_pattern,
    plan_construction,
    sample_random_hypergraph,
)
from .embeddings import (
    contains_copy,
    fan_copy_from_witness,
    independent_neighborhoods_check,
    max_edge_disjoint_packing,
)
from .hypercore import Hypergraph, read_hypergraph, serialize_hypergraph
from .invariants import canonical_code, compute_rho, edge_automorphisms, NontrivialRequired
from .solvers import (
    BudgetExceeded,
    SolverBudget,
    exact_extractor,
    exhaustive_chromatic_number,
    exhaustive_independence_number,
    independence_number,
    indnbd_coloring,
    lll_coloring,
    peel_palette_bound,
    recursive_coloring,
    turan_independent_set,
    weak_chromatic_number,
)
from .treecolor import palette_bound, tree_free_coloring

SCHEMA_VERSION = 1

# CSV header, in order. Stable across versions; new columns only append.
COLUMNS = [
    "trial",
    "seed",
    "task",
    "n",
    "r",
    "family",
    "edges_in",
    "edges",
    "removed_edges",
    "alpha",
    "alpha_exact",
    "chi",
    "palette",
    "bound",
    "free",
    "proper",
    "feasible",
    "passed",
    "error",
    "certificate",
    "runtime_s",
]
_INT = {"trial", "seed", "n", "r", "edges_in", "edges", "removed_edges", "alpha", "chi", "palette", "bound"}
_BOOL = {"alpha_exact", "free", "proper", "feasible", "passed"}
_FLOAT = {"runtime_s"}

ORACLE_ALPHA_CAP = 20
ORACLE_CHI_CAP = 12


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    task: str
    params: dict = field(default_factory=dict)
    seeds: list[int] | None = None
    base_seed: int = 0
    trials: int = 1
    verify: str = "freeness"
    budget: dict = field(default_factory=dict)
    out_dir: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; choose from {sorted(TASKS)}")
        allowed = TASK_PARAMS[self.task]
        extra = set(self.params) - allowed
        if extra:
            raise ConfigError(f"task {self.task} does not take {sorted(extra)}; allowed: {sorted(allowed)}")
        if self.verify not in VERIFY_LEVELS:
            raise ConfigError(f"verify must be one of {VERIFY_LEVELS}")
        if self.seeds is not None:
            if not all(isinstance(s, int) and s >= 0 for s in self.seeds):
                raise ConfigError("seeds must be non-negative integers")
            self.trials = len(self.seeds)
        if self.trials < 0:
            raise ConfigError("trials must be >= 0")
        if self.base_seed < 0:
            raise ConfigError("base_seed must be >= 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        bad = set(self.budget) - {"max_nodes", "max_seconds", "max_resamples"}
        if bad:
            raise ConfigError(f"unknown budget keys {sorted(bad)}")
        self.solver_budget()  # validates values

    def seed_list(self) -> list[int]:
        if self.seeds is not None:
            return list(self.seeds)
        return [self.base_seed + i for i in range(self.trials)]

    def solver_budget(self) -> SolverBudget:
        return SolverBudget(**self.budget)

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if "task" not in data:
            raise ConfigError("config needs a task")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        text = Path(path).read_text()
        data = yaml.safe_load(text) or {}  # YAML is a superset of JSON
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a mapping at top level")
        return cls.from_mapping(data)


# -- hosts -----------------------------------------------------------------


def _family(spec) -> list[Hypergraph]:
    if isinstance(spec, list):
        return [H for s in spec for H in parse_pattern(s)]
    return parse_pattern(str(spec))


def _host(params: dict, seed: int) -> tuple[Hypergraph, dict]:
    """Read ``input`` or sample ``host: {n, r, p, forbid?}``.

    With ``forbid`` a maximal packing of copies of that pattern is removed,
    so the host is free of it.
    """
    if "input" in params:
        G = read_hypergraph(params["input"])
        return G, {"source": str(params["input"])}
    spec = params.get("host")
    if not spec:
        raise ConfigError("give either input (a file) or host: {n, r, p}")
    extra = set(spec) - {"n", "r", "p", "forbid"}
    if extra:
        raise ConfigError(f"unknown host keys {sorted(extra)}")
    G = sample_random_hypergraph(int(spec["n"]), int(spec["r"]), float(spec["p"]), seed, stream_path=(rng.STREAM_HOST,))
    info = {"source": "random", "sampled_edges": G.m}
    if spec.get("forbid"):
        removed = set()
        for i, H in enumerate(_family(spec["forbid"])):
            removed |= max_edge_disjoint_packing(G, H, order_seed=seed, stream_path=(rng.STREAM_HOST, i)).edges
        G = G.without_edges(removed)
        info["forbid"] = spec["forbid"]
    return G, info


def _digest(G: Hypergraph) -> str:
    return hashlib.sha256(serialize_hypergraph(G).encode()).hexdigest()


# -- tasks -----------------------------------------------------------------


def task_invariants(params, seed, verify, budget):
    fam = _family(params["pattern"]) if "pattern" in params else [read_hypergraph(params["input"])]
    out = []
    for H in fam:
        item: dict[str, Any] = {"r": H.r, "n": H.n, "m": H.m, "canonical_code": canonical_code(H).decode()}
        try:
            rep = compute_rho(H)
            item.update(rho=rep.rho_str, balanced=rep.balanced, witness=[list(e) for e in rep.witness], notes=list(rep.notes))
        except NontrivialRequired:
            item["rho"] = None
        if H.m:
            aut = edge_automorphisms(H)
            item.update(
                alpha_min=aut.alpha_min,
                alpha_per_edge=[[list(e), a] for e, a in sorted(aut.alpha_per_edge.items())],
                group_order=aut.group_order,
            )
        out.append(item)
    row = {"n": fam[0].n, "r": fam[0].r, "family": str(params.get("pattern", params.get("input"))), "passed": True}
    return row, {"members": out}


def task_constants(params, seed, verify, budget):
    if "rl" in params:
        r, l = params["rl"]
        tab = closed_form_constants(rl=(int(r), int(l)))
        fam = f"rl:{r}:{l}"
    else:
        r = int(params["fr"])
        tab = closed_form_constants(fr=r)
        fam = f"fr:{r}"
    ok = tab["c1_rel_err"] <= 1e-12
    disc = [] if tab["c_matches_generic"] else ["closed-form constant differs from the generic constant"]
    tab["discrepancies"] = disc
    return {"r": int(r), "family": fam, "passed": ok}, tab


def task_plan(params, seed, verify, budget):
    fam = _family(params["family"])
    plan = plan_construction(fam, int(params["n"]), p=params.get("p"), t=params.get("t"), strict=bool(params.get("strict", False)))
    row = {"n": plan.n, "r": plan.r, "family": str(params["family"]), "feasible": plan.feasible, "passed": True}
    return row, plan.to_json()


def task_check_free(params, seed, verify, budget):
    G, info = _host(params, seed)
    fam = _family(params["pattern"])
    res = []
    free = True
    for H in fam:
        c = contains_copy(G, H)
        res.append({"free": c is None, "witness": None if c is None else [list(e) for e in c.edges]})
        free &= c is None
    cert: dict[str, Any] = {"host": info, "host_sha256": _digest(G), "members": res}
    passed = free
    spec = str(params["pattern"])
    if spec.startswith("fr:"):
        nb = independent_neighborhoods_check(G)
        cert["independent_neighborhoods"] = nb.ok
        if not nb.ok:
            cert["fan_witness"] = [list(e) for e in fan_copy_from_witness(G, nb)]
        # the neighborhood test must agree with the embedding search
        cert["oracles_agree"] = nb.ok == free
        passed = free and nb.ok
    row = {"n": G.n, "r": G.r, "edges_in": G.m, "family": spec, "free": free, "passed": passed}
    return row, cert


def task_solve_alpha(params, seed, verify, budget):
    G, info = _host(params, seed)
    row: dict[str, Any] = {"n": G.n, "r": G.r, "edges_in": G.m}
    cert: dict[str, Any] = {"host": info, "host_sha256": _digest(G)}
    try:
        a, wit = independence_number(G, budget)
    except BudgetExceeded as exc:
        cert.update(lower=exc.lower, upper=exc.upper)
        row.update(alpha=exc.lower, alpha_exact=False, passed=False, error="BudgetExceeded")
        return row, cert
    cert.update(alpha=a, witness=list(wit.vertices))
    ok = G.is_independent(wit.vertices) and len(wit) == a
    if verify == "full" and G.n <= ORACLE_ALPHA_CAP:
        oracle = exhaustive_independence_number(G)[0]
        cert["oracle_alpha"] = oracle
        ok &= oracle == a
    row.update(alpha=a, alpha_exact=True, passed=ok)
    return row, cert


def task_solve_chi(params, seed, verify, budget):
    G, info = _host(params, seed)
    row: dict[str, Any] = {"n": G.n, "r": G.r, "edges_in": G.m}
    cert: dict[str, Any] = {"host": info, "host_sha256": _digest(G)}
    try:
        chi, col = weak_chromatic_number(G, budget)
    except BudgetExceeded as exc:
        cert.update(lower=exc.lower, upper=exc.upper)
        row.update(chi=exc.upper, passed=False, error="BudgetExceeded")
        return row, cert
    cert.update(chi=chi, coloring=list(col.colors))
    ok = col.is_proper(G) and col.used <= chi
    if verify == "full" and G.n <= ORACLE_CHI_CAP:
        oracle = exhaustive_chromatic_number(G)
        cert["oracle_chi"] = oracle
        ok &= oracle == chi
    row.update(chi=chi, palette=col.palette_size, proper=col.is_proper(G), passed=ok)
    return row, cert


def _coloring_result(G, col, bound, info, extra=None):
    proper = col.is_proper(G)
    cert = {"host": info, "host_sha256": _digest(G), "coloring": col.to_json(), "bound": bound}
    if extra:
        cert.update(extra)
    row = {
        "n": G.n,
        "r": G.r,
        "edges_in": G.m,
        "palette": col.palette_size,
        "bound": bound,
        "proper": proper,
        "passed": proper and (bound is None or col.palette_size <= bound),
    }
    return row, cert


def task_color_lll(params, seed, verify, budget):
    G, info = _host(params, seed)
    k = int(params["k"])
    col = lll_coloring(G, k, seed, budget)
    return _coloring_result(G, col, k, info, {"resamples": col.meta.get("resamples", 0)})


def task_color_peel(params, seed, verify, budget):
    G, info = _host(params, seed)
    alpha = Fraction(str(params.get("alpha", "1/2")))
    how = params.get("extractor", "exact")
    if how == "exact":
        ext = exact_extractor
    elif how == "turan":
        calls = [0]

        def ext(sub):
            calls[0] += 1
            return turan_independent_set(sub, seed, stream_path=(calls[0],))

    else:
        raise ConfigError(f"extractor must be exact or turan, got {how!r}")
    col = recursive_coloring(G, ext, alpha)
    return _coloring_result(G, col, peel_palette_bound(G.n, alpha), info, {"alpha": str(alpha), "extractor": how})


def task_color_indnbd(params, seed, verify, budget):
    G, info = _host(params, seed)
    col, rep = indnbd_coloring(G, int(params["k"]), seed, budget, exact_cap=int(params.get("exact_cap", 40)))
    bound = rep.k // 2 + rep.stage2_bound
    return _coloring_result(G, col, bound, info, {"stages": rep.to_json()})


def task_color_tree(params, seed, verify, budget):
    G, info = _host(params, seed)
    fam = _family(params["tree"])
    if len(fam) != 1:
        raise ConfigError("tree must name a single r-tree")
    T = fam[0]
    col, trace = tree_free_coloring(G, T)
    extra = {"tree": [list(e) for e in T.edges]}
    if params.get("trace", True):
        extra["trace"] = trace.to_json()
    row, cert = _coloring_result(G, col, palette_bound(T.r, T.m), info, extra)
    row["family"] = str(params["tree"])
    return row, cert


def task_construct_deletion(params, seed, verify, budget):
    fam = _family(params["family"])
    plan = plan_construction(fam, int(params["n"]), p=params.get("p"), t=params.get("t"))
    res = deletion_construct(plan, seed, verify, exact_cap=int(params.get("exact_cap", 40)), budget=budget)
    G = res.final
    ver = res.verification
    if "alpha" not in ver and G.n <= int(params.get("exact_cap", 40)):
        # the alpha column is filled whenever an exact answer is cheap
        try:
            ver["alpha"], ver["alpha_exact"] = independence_number(G, budget)[0], True
        except BudgetExceeded:
            pass
    free = all(ver["freeness"]) if "freeness" in ver else None
    row = {
        "n": G.n,
        "r": G.r,
        "family": str(params["family"]),
        "edges_in": res.sampled_edges,
        "edges": G.m,
        "removed_edges": res.removed_edges,
        "alpha": ver.get("alpha"),
        "alpha_exact": ver.get("alpha_exact"),
        "free": free,
        "feasible": plan.feasible,
        "passed": free is not False,
    }
    cert = {"plan": plan.to_json(), "result": res.to_json(), "graph_sha256": _digest(G)}
    return row, cert, G


def task_construct_cliquefree(params, seed, verify, budget):
    n, r = int(params["n"]), int(params["r"])
    layers = clique_free_layers(n, r, seed)
    G = clique_free_from_layers(n, r, layers)
    cover = all(
        sorted(v for part in parts for v in part) == list(range(i + 1, n))
        and max(map(len, parts)) - min(map(len, parts)) <= 1
        for i, parts in enumerate(layers)
    )
    bound_ok = clique_free_edge_bound_ok(G)
    free = None
    if verify != "none":
        free = contains_copy(G, gen_clique(r, r + 1)) is None
    row = {
        "n": n,
        "r": r,
        "family": f"clique:{r}:{r + 1}",
        "edges": G.m,
        "free": free,
        "passed": cover and bound_ok and free is not False,
    }
    cert = {
        "n": n,
        "r": r,
        "edges": G.m,
        "edge_bound_ok": bound_ok,
        "partition_cover_ok": cover,
        "clique_free": free,
        "graph_sha256": _digest(G),
    }
    return row, cert, G


TASKS: dict[str, Callable] = {
    "invariants": task_invariants,
    "constants": task_constants,
    "plan": task_plan,
    "check-free": task_check_free,
    "solve-alpha": task_solve_alpha,
    "solve-chi": task_solve_chi,
    "color-lll": task_color_lll,
    "color-peel": task_color_peel,
    "color-indnbd": task_color_indnbd,
    "color-tree": task_color_tree,
    "construct-deletion": task_construct_deletion,
    "construct-cliquefree": task_construct_cliquefree,
}
_HOST = {"input", "host"}
TASK_PARAMS: dict[str, set[str]] = {
    "invariants": {"pattern", "input"},
    "constants": {"rl", "fr"},
    "plan": {"family", "n", "p", "t", "strict"},
    "check-free": _HOST | {"pattern"},
    "solve-alpha": _HOST,
    "solve-chi": _HOST,
    "color-lll": _HOST | {"k"},
    "color-peel": _HOST | {"alpha", "extractor"},
    "color-indnbd": _HOST | {"k", "exact_cap"},
    "color-tree": _HOST | {"tree", "trace"},
    "construct-deletion": {"family", "n", "p", "t", "exact_cap"},
    "construct-cliquefree": {"n", "r"},
}


# -- running ---------------------------------------------------------------


def dump_certificate(cert: dict) -> str:
    """Canonical JSON text: sorted keys, fixed indent, trailing newline."""
    return json.dumps(cert, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _clean(x):
    # non-finite floats become strings so the JSON stays standard
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def run_trial(config: ExperimentConfig, index: int, seed: int) -> tuple[dict, dict, str | None]:
    """One trial: (CSV row, certificate, optional hypergraph text).

    Exceptions are recorded on the row, never raised.
    """
    fn = TASKS[config.task]
    start = time.perf_counter()
    graph = None
    try:
        out = fn(config.params, seed, config.verify, config.solver_budget())
        row, cert = out[0], out[1]
        if len(out) == 3:
            graph = serialize_hypergraph(out[2])
    except Exception as exc:  # recorded per trial, batch goes on
        row = {"passed": False, "error": type(exc).__name__}
        cert = {"error": type(exc).__name__, "message": str(exc)}
        witness = getattr(exc, "witness", None)
        if witness is not None:
            cert["witness"] = [list(e) for e in witness.edges]
    full = {c: None for c in COLUMNS}
    full.update(row)
    full.update(trial=index, seed=seed, task=config.task, runtime_s=round(time.perf_counter() - start, 6))
    envelope = {
        "schema_version": SCHEMA_VERSION,
        "task": config.task,
        "seed": seed,
        "verify": config.verify,
        "params": config.params,
        "passed": bool(full["passed"]),
        "result": cert,
    }
    return full, _clean(envelope), graph


def _run_indexed(args):
    config, i, seed = args
    return i, run_trial(config, i, seed)


@dataclass
class ExperimentResult:
    records: list[dict]
    aggregate: dict
    certificates: list[dict]
    graphs: list[str | None]

    @property
    def exit_code(self) -> int:
        return 0 if all(r["passed"] for r in self.records) else 1


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    seeds = config.seed_list()
    jobs = [(config, i, s) for i, s in enumerate(seeds)]
    results: dict[int, tuple] = {}
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for i, res in pool.map(_run_indexed, jobs):
                results[i] = res
    else:
        for job in jobs:
            i, res = _run_indexed(job)
            results[i] = res
    records, certs, graphs = [], [], []
    for i in range(len(jobs)):
        row, cert, graph = results[i]
        records.append(row)
        certs.append(cert)
        graphs.append(graph)
    result = ExperimentResult(records, aggregate(records, config), certs, graphs)
    if config.out_dir:
        emit_reports(result, config.out_dir)
    return result


def aggregate(records: list[dict], config: ExperimentConfig | None = None) -> dict:
    stats = {}
    for col in COLUMNS:
        if col in ("trial", "seed"):
            continue
        if col in _INT or col in _FLOAT:
            vals = [r[col] for r in records if r.get(col) is not None]
            if vals:
                stats[col] = {"min": min(vals), "mean": sum(vals) / len(vals), "max": max(vals), "count": len(vals)}
        elif col in _BOOL and col != "passed":
            vals = [bool(r[col]) for r in records if r.get(col) is not None]
            if vals:
                stats[col] = {"rate": sum(vals) / len(vals), "count": len(vals)}
    failing = [r["seed"] for r in records if not r["passed"]]
    return {
        "schema_version": SCHEMA_VERSION,
        "task": config.task if config else (records[0]["task"] if records else None),
        "config": asdict(config) if config else None,
        "trials": len(records),
        "passed": len(records) - len(failing),
        "failed": len(failing),
        "pass_rate": (len(records) - len(failing)) / len(records) if records else None,
        "failing_seeds": failing,
        "stats": stats,
    }


def emit_reports(result: ExperimentResult, out_dir) -> dict[str, Path]:
    """Write trials.csv, aggregate.json, certs/*.json and graphs/*.hg.

    Certificate and graph paths in the CSV are relative to ``out_dir``.
    """
    out = Path(out_dir)
    try:
        (out / "certs").mkdir(parents=True, exist_ok=True)
        for row, cert, graph in zip(result.records, result.certificates, result.graphs):
            stem = f"trial_{row['trial']:04d}_seed_{row['seed']}"
            if graph is not None:
                (out / "graphs").mkdir(exist_ok=True)
                rel_g = f"graphs/{stem}.hg"
                (out / rel_g).write_text(graph)
                cert["result"]["graph_file"] = rel_g
            rel = f"certs/{stem}.json"
            (out / rel).write_text(dump_certificate(cert))
            row["certificate"] = rel
        write_csv(result.records, out / "trials.csv")
        (out / "aggregate.json").write_text(json.dumps(_clean(result.aggregate), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"could not write reports under {out}: {exc}") from exc
    return {"csv": out / "trials.csv", "aggregate": out / "aggregate.json", "certs": out / "certs"}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def write_csv(records: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for r in records:
            w.writerow([_cell(r.get(c)) for c in COLUMNS])


def _parse_cell(col: str, s: str):
    if s == "":
        return None
    if col in _INT:
        return int(s)
    if col in _BOOL:
        return s == "true"
    if col in _FLOAT:
        return float(s)
    return s


def read_records(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != COLUMNS:
        raise ValueError(f"{path}: header does not match the documented columns")
    return [{c: _parse_cell(c, v) for c, v in zip(COLUMNS, row)} for row in rows[1:]]
