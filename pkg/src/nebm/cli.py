"""Command-line front end: generate, solve, bench, bks, oracle, trace.

Every subcommand is non-interactive and writes only to the paths named in
its arguments. An optional ``--config FILE`` supplies defaults as JSON
(keys match the long flag names with underscores); explicit flags override
the file. Exit codes: 0 success, 1 internal failure, 2 bad usage or
unparseable input, 3 missing best-known-solution cache entries.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench as bench_mod
from .mis import brute_force_mis, generate_mis_graph, load_graph, mis_to_qubo, save_graph
from .qubo import load_qubo, save_qubo

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_MISSING_BKS = 3


def _merge(args, cfg: dict, name: str, default=None):
    # precedence: explicit flag > config file > default
    v = getattr(args, name, None)
    if v is not None:
        return v
    if name in cfg:
        return cfg[name]
    return default


def _load_config(args) -> dict:
    path = getattr(args, "config", None)
    if path is None:
        return {}
    with open(path) as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return cfg


def _int_list(text) -> tuple:
    return tuple(int(v) for v in str(text).split(","))


def _float_list(text) -> tuple:
    return tuple(float(v) for v in str(text).split(","))


def cmd_generate(args) -> int:
    cfg = _load_config(args)
    n = _merge(args, cfg, "n")
    density = _merge(args, cfg, "density")
    if n is None or density is None:
        raise ValueError("generate requires --n and --density")
    seed = _merge(args, cfg, "seed", 0)
    penalty = _merge(args, cfg, "penalty", 8)
    out = _merge(args, cfg, "out")
    if out is None:
        raise ValueError("generate requires --out (output path prefix)")
    g = generate_mis_graph(int(n), float(density), int(seed))
    q = mis_to_qubo(g, int(penalty))
    graph_path = f"{out}.graph"
    qubo_path = f"{out}.qubo"
    save_graph(g, graph_path)
    save_qubo(q, qubo_path)
    print(
        f"wrote {graph_path} (n={g.n} edges={g.m}) and "
        f"{qubo_path} (nnz={g.n + g.m})"
    )
    return EXIT_OK


def _solver_spec(args, cfg) -> dict:
    name = _merge(args, cfg, "solver", "nebm")
    if name not in bench_mod.SOLVER_NAMES:
        raise ValueError(
            f"unknown solver {name!r}; expected one of {bench_mod.SOLVER_NAMES}"
        )
    spec = {"name": name}

    def put(key, default=None):
        v = _merge(args, cfg, key, default)
        if v is not None:
            spec[key] = v

    if name == "nebm":
        put("schedule")
        put("t0")
        put("alpha")
        put("delta")
        put("refresh")
        put("t_min")
        put("r_min")
        put("r_max")
        put("init")
        put("workers")
    elif name == "sa":
        put("t0")
        put("alpha")
        put("t_min")
        put("init")
    else:
        put("tenure")
        put("restart_after")
        # 0 on the command line means "no restarts".
        if spec.get("restart_after") == 0:
            spec["restart_after"] = None
        put("init")
    return spec


def _budget(args, cfg) -> tuple[str, float]:
    steps = _merge(args, cfg, "max_steps")
    seconds = _merge(args, cfg, "max_seconds")
    if steps is not None and seconds is not None:
        raise ValueError("--max-steps and --max-seconds are mutually exclusive")
    if seconds is not None:
        return "seconds", float(seconds)
    if steps is None:
        steps = 10_000
    return "steps", int(steps)


def _run_solve(args, trace_sink=None) -> int:
    cfg = _load_config(args)
    q = load_qubo(args.qubo)
    spec = _solver_spec(args, cfg)
    kind, value = _budget(args, cfg)
    seed = int(_merge(args, cfg, "seed", 0))
    res = bench_mod.run_solver(spec, q, seed, kind, value, trace=trace_sink)
    out = getattr(args, "out", None)
    if out is not None:
        with open(out, "w") as f:
            f.write("".join(map(str, res.best_assignment.tolist())) + "\n")
    print(
        f"best_cost={res.best_cost} steps={res.steps} "
        f"wall_ms={res.elapsed_s * 1000.0:.3f}"
    )
    return EXIT_OK


def cmd_solve(args) -> int:
    return _run_solve(args)


def cmd_trace(args) -> int:
    if args.trace_out is None:
        return _run_solve(args, trace_sink=sys.stdout)
    with open(args.trace_out, "w") as sink:
        return _run_solve(args, trace_sink=sink)


def _plan_from_args(args, cfg) -> bench_mod.BenchmarkPlan:
    plan_path = _merge(args, cfg, "plan")
    if plan_path is not None:
        return bench_mod.BenchmarkPlan.from_file(plan_path)
    fields = {}
    nodes = _merge(args, cfg, "nodes")
    if nodes is not None:
        fields["nodes"] = _int_list(nodes) if not isinstance(nodes, (list, tuple)) else tuple(nodes)
    densities = _merge(args, cfg, "densities")
    if densities is not None:
        fields["densities"] = (
            _float_list(densities)
            if not isinstance(densities, (list, tuple))
            else tuple(densities)
        )
    seeds = _merge(args, cfg, "seeds")
    if seeds is not None:
        fields["instance_seeds"] = (
            _int_list(seeds) if not isinstance(seeds, (list, tuple)) else tuple(seeds)
        )
    return bench_mod.BenchmarkPlan(**fields)


def cmd_bks(args) -> int:
    cfg = _load_config(args)
    plan = _plan_from_args(args, cfg)
    cache_path = _merge(args, cfg, "cache")
    if cache_path is None:
        raise ValueError("bks requires --cache (cache file path)")
    try:
        cache = bench_mod.load_bks(cache_path)
    except FileNotFoundError:
        cache = {}
    sweeps = int(_merge(args, cfg, "tabu_sweeps", bench_mod.DEFAULT_BKS_SWEEPS))
    added = bench_mod.ensure_bks(plan, cache, tabu_sweeps=sweeps)
    bench_mod.save_bks(cache_path, cache)
    print(f"bks cache {cache_path}: {len(added)} computed, {len(cache)} total")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _load_config(args)
    plan = _plan_from_args(args, cfg)
    out = _merge(args, cfg, "out")
    if out is None:
        raise ValueError("bench requires --out (results file path)")
    bks_path = _merge(args, cfg, "bks")
    cache = {}
    if bks_path is not None:
        try:
            cache = bench_mod.load_bks(bks_path)
        except FileNotFoundError:
            cache = {}
    before = len(cache)
    records = bench_mod.run_plan(plan, cache)
    bench_mod.save_records(out, records)
    if bks_path is not None and len(cache) != before:
        bench_mod.save_bks(bks_path, cache)
    summary_path = _merge(args, cfg, "summary")
    if summary_path is not None:
        bench_mod.save_summary(summary_path, bench_mod.summarize(records))
    print(f"wrote {len(records)} records to {out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = load_graph(args.graph)
    size, witness = brute_force_mis(g)
    bits = "".join(map(str, witness.tolist()))
    print(f"mis_size={size} cost={-size} bits={bits}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nebm",
        description=(
            "Parallel annealing QUBO solver with sequential baselines and a "
            "maximum-independent-set benchmarking harness."
        ),
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_config(sp):
        sp.add_argument(
            "--config",
            metavar="FILE",
            help="JSON file of defaults; explicit flags override it",
        )

    g = sub.add_parser(
        "generate", help="generate a random MIS instance (graph + QUBO files)"
    )
    g.add_argument("--n", type=int, help="node count")
    g.add_argument("--density", type=float, help="edge probability in [0,1]")
    g.add_argument("--seed", type=int, help="instance seed (default 0)")
    g.add_argument(
        "--penalty", type=int, help="edge penalty in the QUBO encoding (default 8)"
    )
    g.add_argument(
        "--out", help="output path prefix; writes <out>.graph and <out>.qubo"
    )
    add_config(g)
    g.set_defaults(func=cmd_generate)

    def add_solve_args(sp, with_trace: bool):
        sp.add_argument("qubo", help="QUBO instance file")
        sp.add_argument(
            "--solver",
            choices=bench_mod.SOLVER_NAMES,
            help="solver to run (default nebm)",
        )
        sp.add_argument("--seed", type=int, help="run seed (default 0)")
        sp.add_argument(
            "--max-steps",
            type=int,
            dest="max_steps",
            help="step/sweep budget (default 10000 when no budget given)",
        )
        sp.add_argument(
            "--max-seconds",
            type=float,
            dest="max_seconds",
            help="wall-clock budget in seconds (excludes --max-steps)",
        )
        sp.add_argument(
            "--init",
            choices=("random", "zeros"),
            help="initial assignment mode (default random)",
        )
        sp.add_argument("--out", help="write the best assignment to this file")
        sp.add_argument(
            "--schedule",
            choices=("geometric", "linear"),
            help="nebm cooling family (default geometric)",
        )
        sp.add_argument(
            "--t0",
            type=float,
            help="start temperature; nebm: integer t_hat units, sa: real "
            "(default: derived from the initial state)",
        )
        sp.add_argument(
            "--alpha",
            help="cooling ratio; nebm geometric: exact fraction such as 19/20 "
            "(default), sa: float (default 0.95)",
        )
        sp.add_argument(
            "--delta",
            type=int,
            help="nebm linear schedule decrement per refresh (default 1)",
        )
        sp.add_argument(
            "--refresh",
            type=int,
            help="nebm steps between temperature updates (default 10)",
        )
        sp.add_argument(
            "--t-min",
            type=float,
            dest="t_min",
            help="temperature floor; nebm: integer (default 1), sa: real "
            "(default 0.5)",
        )
        sp.add_argument(
            "--r-min", type=int, dest="r_min", help="refractory minimum (default 1)"
        )
        sp.add_argument(
            "--r-max", type=int, dest="r_max", help="refractory maximum (default 8)"
        )
        sp.add_argument(
            "--workers",
            type=int,
            help="worker threads for the nebm decision phase (default 1; "
            "any count gives identical results)",
        )
        sp.add_argument(
            "--tenure",
            type=int,
            help="tabu tenure in sweeps (default max(7, n//10))",
        )
        sp.add_argument(
            "--restart-after",
            type=int,
            dest="restart_after",
            help="tabu sweeps without improvement before a restart "
            "(default 400; 0 disables)",
        )
        if with_trace:
            sp.add_argument(
                "--trace-out",
                dest="trace_out",
                help="write step trace lines here instead of stdout "
                "(format: step flips cost_emitted t_hat)",
            )
        add_config(sp)

    s = sub.add_parser("solve", help="solve a QUBO file, print a one-line summary")
    add_solve_args(s, with_trace=False)
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser(
        "trace", help="solve with nebm while writing a per-step trace"
    )
    add_solve_args(t, with_trace=True)
    t.set_defaults(func=cmd_trace)

    def add_plan_args(sp):
        sp.add_argument("--plan", help="benchmark plan JSON file")
        sp.add_argument(
            "--nodes", help="comma list of node counts (when no --plan given)"
        )
        sp.add_argument("--densities", help="comma list of densities")
        sp.add_argument("--seeds", help="comma list of instance seeds")

    b = sub.add_parser("bench", help="run a benchmark plan, write results CSV")
    add_plan_args(b)
    b.add_argument("--bks", help="best-known-solution cache file")
    b.add_argument("--out", help="results CSV path (sidecar: <out>.assignments)")
    b.add_argument("--summary", help="also write an aggregate table here")
    add_config(b)
    b.set_defaults(func=cmd_bench)

    k = sub.add_parser(
        "bks", help="compute and cache best-known solutions for an instance set"
    )
    add_plan_args(k)
    k.add_argument("--cache", help="cache file to create or extend")
    k.add_argument(
        "--tabu-sweeps",
        type=int,
        dest="tabu_sweeps",
        help=f"sweep budget for large instances (default {bench_mod.DEFAULT_BKS_SWEEPS})",
    )
    add_config(k)
    k.set_defaults(func=cmd_bks)

    o = sub.add_parser(
        "oracle", help="exact maximum independent set of a graph file (n <= 30)"
    )
    o.add_argument("graph", help="graph file")
    o.set_defaults(func=cmd_oracle)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except bench_mod.MissingBksError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MISSING_BKS
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e!r}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
