"""Command-line entry point: ``geodiam {generate,diameter,properties,bench}``.

Exit codes: 0 success, 1 usage, 2 disconnected input, 3 budget exceeded,
4 IO or parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields


from .diameter import BudgetExceeded, Outcome, compute_diameter, decide
from .geometry import SpaceKind
from .graphcore import Disconnected, GeometricGraph, all_eccentricities, distance_matrix, is_connected
from .graphgen import GraphFormatError, RadiusTooLarge, RggParams, read_graph, sample_rgg, write_graph
from .ifub import TwoSweep, ifub
from .oracle import OracleTooLarge, build_oracle
from .partition import default_leaf_level, induce_partition
from . import propcheck

EXIT_OK, EXIT_USAGE, EXIT_DISCONNECTED, EXIT_BUDGET, EXIT_IO = 0, 1, 2, 3, 4

BENCH_SCHEMA = 1
BENCH_COLUMNS = ["schema", "n", "rho", "kind", "algo", "seed", "m", "diameter", "work",
                 "naive_proxy", "work_ratio", "oracle_work", "decide_calls", "leaf_level",
                 "fringe_bfs", "wall_time"]

PROPERTY_IDS = ("1", "2", "3", "4", "5", "stretch", "concentration")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = ""
    input: str | None = None
    n: int | None = None
    rho: float | None = 0.3
    r: float | None = None
    kind: str = "square"
    seed: int = 0
    algo: str = "framework"
    leaf_level: int | None = None
    k: int | None = None
    ell: int | None = None
    budget: int | None = None
    out: str | None = None
    format: str = "text"
    properties: str = "stretch"
    max_apsp_n: int = 3000
    ns: list = field(default_factory=lambda: [500, 1000, 2000, 4000])
    rhos: list = field(default_factory=lambda: [0.2, 0.3])
    kinds: list = field(default_factory=lambda: ["square", "torus"])
    algos: list = field(default_factory=lambda: ["framework", "ifub", "naive"])
    seeds: list = field(default_factory=lambda: [0])
    jobs: int = 1

    def validate(self) -> None:
        if self.command in ("diameter", "properties"):
            if (self.input is None) == (self.n is None):
                raise UsageError("give exactly one of --in or generation parameters (--n ...)")
        if self.command == "generate" and self.n is None:
            raise UsageError("generate needs --n")
        if self.n is not None and self.n < 1:
            raise UsageError("--n must be positive")
        if self.r is None and self.rho is not None and not 0 < self.rho < 0.5:
            raise UsageError(f"--rho must lie in (0, 1/2), got {self.rho}")
        for rho in self.rhos:
            if not 0 < rho < 0.5:
                raise UsageError(f"--rhos entries must lie in (0, 1/2), got {rho}")
        for kind in [self.kind, *self.kinds]:
            if kind not in ("square", "torus"):
                raise UsageError(f"unknown kind {kind!r}")
        for algo in [self.algo, *self.algos]:
            if algo not in ("framework", "ifub", "naive"):
                raise UsageError(f"unknown algorithm {algo!r}")
        if self.leaf_level is not None and self.leaf_level < 0:
            raise UsageError("--leaf-level must be non-negative")
        if self.k is not None and self.k < 1:
            raise UsageError("--k must be positive")
        if self.ell is not None and self.ell < 1:
            raise UsageError("--ell must be positive")
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")
        if self.format not in ("text", "json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="input", help="graph file to read")
    p.add_argument("--n", type=int)
    p.add_argument("--rho", type=float, help="radius exponent, r = n^rho")
    p.add_argument("--r", type=float, help="explicit radius (overrides --rho)")
    p.add_argument("--kind", choices=["square", "torus"])
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="geodiam", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file with defaults for any option")
    ap.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("generate", help="sample a random geometric graph")
    _instance_args(g)
    g.add_argument("--out", help="output path (default stdout)")

    d = sub.add_parser("diameter", help="exact diameter")
    _instance_args(d)
    d.add_argument("--algo", choices=["framework", "ifub", "naive"])
    d.add_argument("--leaf-level", type=int)
    d.add_argument("--k", type=int, help="size-based stop rule with this k")
    d.add_argument("--ell", type=int, help="run a single decide call for this guess")
    d.add_argument("--budget", type=int, help="work cap")
    d.add_argument("--format", choices=["text", "json"])
    d.add_argument("--out", help="write the report here as JSON")

    pr = sub.add_parser("properties", help="property checks as CSV")
    _instance_args(pr)
    pr.add_argument("--properties", help="comma list from " + ",".join(PROPERTY_IDS))
    pr.add_argument("--leaf-level", type=int)
    pr.add_argument("--max-apsp-n", type=int, help="largest n for all-pairs based checks")
    pr.add_argument("--out")

    b = sub.add_parser("bench", help="benchmark grid as CSV")
    b.add_argument("--ns", type=int, nargs="+")
    b.add_argument("--rhos", type=float, nargs="+")
    b.add_argument("--kinds", nargs="+", choices=["square", "torus"])
    b.add_argument("--algos", nargs="+", choices=["framework", "ifub", "naive"])
    b.add_argument("--seeds", type=int, nargs="+")
    b.add_argument("--leaf-level", type=int)
    b.add_argument("--jobs", type=int)
    b.add_argument("--out")
    return ap


def resolve_config(argv=None) -> tuple[RunConfig, bool]:
    """Flags beat the config file, which beats the defaults."""
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError("missing subcommand")
    values = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                values.update(json.load(fh))
        except OSError as e:
            raise IOError(f"cannot read config: {e}") from e
        except json.JSONDecodeError as e:
            raise GraphFormatError(f"config is not valid JSON: {e.msg}", e.lineno) from e
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key, v in vars(ns).items():
        if key in known and v is not None:
            values[key] = v
    values["command"] = ns.command
    cfg = RunConfig(**values)
    if getattr(ns, "r", None) is not None and getattr(ns, "rho", None) is None:
        cfg.rho = None
    cfg.validate()
    return cfg, ns.dump_config


def _load(cfg: RunConfig) -> GeometricGraph:
    if cfg.input is not None:
        return read_graph(cfg.input)
    return sample_rgg(RggParams(cfg.n, cfg.rho, SpaceKind(cfg.kind), cfg.seed, cfg.r))


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_generate(cfg: RunConfig) -> int:
    g = sample_rgg(RggParams(cfg.n, cfg.rho, SpaceKind(cfg.kind), cfg.seed, cfg.r))
    if cfg.out is None:
        from .graphgen import format_graph
        sys.stdout.write(format_graph(g))
        out = sys.stderr
    else:
        write_graph(g, cfg.out)
        out = sys.stdout
    avg = 2 * g.m / g.n if g.n else 0.0
    print(f"n {g.n}\nm {g.m}\naverage_degree {avg:.4f}\nconnected {is_connected(g)}", file=out)
    return EXIT_OK


def run_diameter(g: GeometricGraph, algo: str, leaf_level=None, k=None, budget=None) -> dict:
    """Diameter plus work counters for one algorithm, as a flat dict."""
    t = time.perf_counter()
    if algo == "naive":
        if not is_connected(g):
            from .graphcore import require_connected
            require_connected(g)
        ecc, arcs = all_eccentricities(g)
        res = {"diameter": int(ecc.max()) if g.n else 0, "work": arcs}
    elif algo == "ifub":
        d, tr = ifub(g, TwoSweep(0))
        res = {"diameter": d, "work": tr.arcs, "center": tr.center, "fringe_bfs": tr.explored,
               "total_bfs": tr.total_bfs, "explored_fraction": tr.explored / g.n}
    else:
        if leaf_level is None:
            leaf_level = default_leaf_level(g.n, g.radius or 1.0)
        rep = compute_diameter(g, leaf_level=leaf_level, refined=k is None,
                               budget_cap=budget)
        fin = rep.final or {}
        res = {"diameter": rep.diameter, "work": rep.work, "oracle_work": rep.oracle_work,
               "decide_calls": rep.decide_calls, "leaf_level": rep.leaf_level, "k": rep.k,
               "final_budget": rep.budget,
               "candidate_pairs_per_level": [h["pairs"] for h in fin.get("levels", [])],
               "engines": fin.get("engines", {}),
               "final_blocks": fin.get("final_blocks"), "final_pairs": fin.get("final_pairs")}
    res["algo"] = algo
    res["wall_time"] = time.perf_counter() - t
    return res


def cmd_diameter(cfg: RunConfig) -> int:
    g = _load(cfg)
    if cfg.ell is not None:
        if cfg.algo != "framework":
            raise UsageError("--ell needs --algo framework")
        lvl = cfg.leaf_level if cfg.leaf_level is not None else default_leaf_level(g.n, g.radius or 1.0)
        P = induce_partition(g, lvl)
        O = build_oracle(g, P)
        v = decide(g, P, O, cfg.ell, k=cfg.k, budget=cfg.budget)
        res = {"algo": "framework", "ell": cfg.ell, "outcome": v.outcome.value, "work": v.work,
               "leaf_level": lvl, "final_pairs": v.stats.get("final_pairs")}
        if v.outcome is Outcome.EQUAL_OR_GREATER:
            res["diameter"] = v.value
        _report(cfg, res)
        return EXIT_BUDGET if v.outcome is Outcome.TIMEOUT else EXIT_OK
    res = run_diameter(g, cfg.algo, cfg.leaf_level, cfg.k, cfg.budget)
    _report(cfg, res)
    return EXIT_OK


def _report(cfg: RunConfig, res: dict) -> None:
    if cfg.out is not None:
        with open(cfg.out, "w") as fh:
            json.dump(res, fh, indent=2)
    if cfg.format == "json":
        print(json.dumps(res))
        return
    if "diameter" in res:
        print(f"diameter {res['diameter']}")
    for key, v in res.items():
        if key != "diameter":
            print(f"{key} {v}")


def property_reports(g: GeometricGraph, ids, leaf_level=None, max_apsp_n: int = 3000):
    ids = list(ids)
    for i in ids:
        if i not in PROPERTY_IDS:
            raise UsageError(f"unknown property id {i!r}; choose from {','.join(PROPERTY_IDS)}")
    needs_apsp = {"1", "2"} & set(ids)
    if needs_apsp and g.n > max_apsp_n:
        raise UsageError(f"properties {sorted(needs_apsp)} need all-pairs distances; n={g.n} "
                         f"exceeds the budget max_apsp_n={max_apsp_n}")
    out = []
    D = distance_matrix(g) if needs_apsp else None
    P = None
    if {"3", "4", "5", "concentration"} & set(ids):
        lvl = leaf_level if leaf_level is not None else max(1, default_leaf_level(g.n, g.radius or 1.0))
        P = induce_partition(g, lvl)
    diams = propcheck.block_diameters(g, P) if P is not None and {"4", "5"} & set(ids) else None
    for i in ids:
        if i == "stretch":
            out += [propcheck.check_lower_stretch(g), propcheck.measure_upper_stretch(g)]
        elif i == "1":
            out.append(propcheck.measure_local_partners(g, D))
        elif i == "2":
            out.append(propcheck.measure_few_corners(g, D))
        elif i == "3":
            out.append(propcheck.measure_separators(g, P))
        elif i == "4":
            out.append(propcheck.check_size_dependent_diameters(g, P, diams))
        elif i == "5":
            out.append(propcheck.measure_fragmentation(g, P, diams=diams))
        elif i == "concentration":
            out.append(propcheck.check_block_concentration(g, P))
    return out


def cmd_properties(cfg: RunConfig) -> int:
    g = _load(cfg)
    ids = [s.strip() for s in cfg.properties.split(",") if s.strip()]
    reps = property_reports(g, ids, cfg.leaf_level, cfg.max_apsp_n)
    name = cfg.input or f"rgg-{cfg.kind}-n{cfg.n}-rho{cfg.rho}-seed{cfg.seed}"
    _emit(propcheck.reports_to_csv(reps, name), cfg.out)
    return EXIT_OK


def bench_cell(n: int, rho: float, kind: str, algo: str, seed: int, leaf_level=None) -> dict:
    g = sample_rgg(RggParams(n, rho, SpaceKind(kind), seed))
    row = {"schema": BENCH_SCHEMA, "n": n, "rho": rho, "kind": kind, "algo": algo, "seed": seed,
           "m": g.m}
    try:
        res = run_diameter(g, algo, leaf_level)
    except Disconnected:
        row.update(diameter="disconnected")
        return row
    row.update(diameter=res["diameter"], work=res["work"], naive_proxy=n * g.m,
               work_ratio=res["work"] / (n * g.m) if g.m else "",
               oracle_work=res.get("oracle_work", ""), decide_calls=res.get("decide_calls", ""),
               leaf_level=res.get("leaf_level", ""), fringe_bfs=res.get("fringe_bfs", ""),
               wall_time=f"{res['wall_time']:.4f}")
    return row


def bench_grid(cfg: RunConfig) -> list[tuple]:
    return [(n, rho, kind, algo, seed, cfg.leaf_level)
            for n in cfg.ns for rho in cfg.rhos for kind in cfg.kinds
            for seed in cfg.seeds for algo in cfg.algos]


def cmd_bench(cfg: RunConfig) -> int:
    cells = bench_grid(cfg)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as ex:
            rows = list(ex.map(_bench_star, cells))
    else:
        rows = [_bench_star(c) for c in cells]
    fh = sys.stdout if cfg.out is None else open(cfg.out, "w", newline="")
    try:
        w = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS, restval="", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _bench_star(args):
    return bench_cell(*args)


COMMANDS = {"generate": cmd_generate, "diameter": cmd_diameter,
            "properties": cmd_properties, "bench": cmd_bench}


def main(argv=None) -> int:
    try:
        cfg, dump = resolve_config(argv)
        if dump:
            print(json.dumps(asdict(cfg), indent=2, sort_keys=True))
            return EXIT_OK
        return COMMANDS[cfg.command](cfg)
    except SystemExit as e:
        return int(e.code or 0)
    except (UsageError, RadiusTooLarge) as e:
        print(f"geodiam: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Disconnected as e:
        a, b = e.representatives
        print(f"geodiam: error: input is disconnected; components represented by {a} and {b}",
              file=sys.stderr)
        return EXIT_DISCONNECTED
    except (BudgetExceeded, OracleTooLarge) as e:
        print(f"geodiam: error: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (GraphFormatError, OSError) as e:
        print(f"geodiam: error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
