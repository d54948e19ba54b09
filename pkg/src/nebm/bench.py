"""Benchmark harness: plans, best-known-solution cache, gap metric, results.

A plan is a grid of MIS instances times solvers times budgets times
repetitions. Each cell regenerates its instance from ``(n, density, seed)``,
resolves the best-known cost from a cache (exact for small instances,
recorded long tabu runs otherwise), runs the solver under a step or
wall-clock budget, and emits one record. Step-budget cells are bit
reproducible; wall-clock cells are measurement-only.

Result files are plain CSV (one fixed header, one row per record) with the
best assignments persisted in a sidecar so every ``best_cost`` can be
re-verified by re-evaluating the stored bits.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields as dc_fields
from fractions import Fraction

import numpy as np

from . import baselines, network
from .mis import BRUTE_FORCE_LIMIT, brute_force_mis, generate_mis_graph, mis_to_qubo
from .qubo import QuboMatrix
from .result import RunResult

RESULTS_HEADER = (
    "instance_n,density,instance_seed,solver,config_hash,budget_kind,"
    "budget,run_seed,best_cost,bks_cost,gap_percent,steps,wall_ms"
)
BKS_HEADER = "instance_n,density,instance_seed,bks_cost,provenance"

#: Long-run sweep budget used when an instance is too big for brute force.
DEFAULT_BKS_SWEEPS = 10_000

SOLVER_NAMES = ("nebm", "sa", "tabu")


class MissingBksError(RuntimeError):
    """A plan referenced an instance with no cached best-known solution."""

    def __init__(self, n, density, seed):
        self.instance = (n, density, seed)
        super().__init__(
            f"no best-known solution cached for instance "
            f"(n={n}, density={fmt_density(density)}, seed={seed}); "
            f"run the bks subcommand over this instance set first"
        )


def fmt_density(d) -> str:
    """Canonical text form of a density, used in files and cache keys."""
    return format(float(d), ".6g")


def gap_percent(cost, bks) -> float:
    """Percentage gap ``100 * |min(cost, 0) - bks| / |bks|``.

    Costs above zero are truncated to zero first, so the empty assignment
    always scores 100. ``bks`` must be negative (a nontrivial best-known
    solution must exist).
    """
    bks = int(bks)
    if bks >= 0:
        raise ValueError(f"bks must be < 0, got {bks}")
    c = min(int(cost), 0)
    return 100.0 * abs(c - bks) / abs(bks)


def config_hash(config: dict) -> str:
    """12-hex-digit digest of a canonicalised config mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class BenchmarkPlan:
    """Instance grid x solver list x budget grid x repetitions.

    Defaults cover the full benchmark grid: n in {10, 25, 50, 100, 250,
    500, 1000}, densities {5%, 15%, 30%}, instance seeds 0..4, five
    repetitions per cell.
    """

    nodes: tuple = (10, 25, 50, 100, 250, 500, 1000)
    densities: tuple = (0.05, 0.15, 0.30)
    instance_seeds: tuple = (0, 1, 2, 3, 4)
    solvers: tuple = ({"name": "nebm"}, {"name": "sa"}, {"name": "tabu"})
    budget_kind: str = "steps"
    budgets: tuple = (10_000,)
    repetitions: int = 5
    penalty: int = 8

    def __post_init__(self):
        if self.budget_kind not in ("steps", "seconds"):
            raise ValueError(f"budget_kind must be steps|seconds, got {self.budget_kind!r}")
        if not all(b > 0 for b in self.budgets):
            raise ValueError("budgets must be positive")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.penalty < 2:
            raise ValueError("penalty must be >= 2")
        for spec in self.solvers:
            if spec.get("name") not in SOLVER_NAMES:
                raise ValueError(
                    f"unknown solver {spec.get('name')!r}; expected one of {SOLVER_NAMES}"
                )

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkPlan":
        known = {f.name for f in dc_fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown plan fields: {sorted(extra)}")
        kw = dict(d)
        for key in ("nodes", "densities", "instance_seeds", "budgets", "solvers"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "BenchmarkPlan":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def instances(self):
        for n in self.nodes:
            for d in self.densities:
                for s in self.instance_seeds:
                    yield n, d, s


@dataclass(eq=False)
class BenchmarkRecord:
    """One (instance, solver, budget, repetition) outcome row."""

    instance_n: int
    density: float
    instance_seed: int
    solver: str
    config_hash: str
    budget_kind: str
    budget: float
    run_seed: int
    best_cost: int
    bks_cost: int
    gap_percent: float
    steps: int
    wall_ms: float
    assignment: np.ndarray = field(default=None, repr=False)

    def csv_row(self) -> str:
        budget = (
            str(int(self.budget))
            if self.budget_kind == "steps"
            else format(float(self.budget), ".6g")
        )
        return ",".join(
            [
                str(self.instance_n),
                fmt_density(self.density),
                str(self.instance_seed),
                self.solver,
                self.config_hash,
                self.budget_kind,
                budget,
                str(self.run_seed),
                str(self.best_cost),
                str(self.bks_cost),
                f"{self.gap_percent:.6f}",
                str(self.steps),
                f"{self.wall_ms:.3f}",
            ]
        )


def instance_key(n, density, seed) -> tuple:
    return (int(n), fmt_density(density), int(seed))


def compute_bks(
    n, density, seed, *, penalty: int = 8, tabu_sweeps: int = DEFAULT_BKS_SWEEPS
) -> tuple[int, str]:
    """Best-known cost for one instance plus its provenance tag.

    Exact branch-and-bound up to n = 30 (``"exact"``); above that, one long
    deterministic tabu run whose sweep budget is recorded
    (``"tabu:<sweeps>"``).
    """
    g = generate_mis_graph(n, density, seed)
    if n <= BRUTE_FORCE_LIMIT:
        size, _ = brute_force_mis(g)
        return -size, "exact"
    q = mis_to_qubo(g, penalty)
    res = baselines.tabu_search(q, 0, sweeps=tabu_sweeps, init="random")
    return res.best_cost, f"tabu:{tabu_sweeps}"


def ensure_bks(
    plan: BenchmarkPlan,
    cache: dict,
    *,
    tabu_sweeps: int = DEFAULT_BKS_SWEEPS,
) -> list[tuple]:
    """Fill ``cache`` for every instance in ``plan``; return the keys added."""
    added = []
    for n, d, s in plan.instances():
        key = instance_key(n, d, s)
        if key in cache:
            continue
        cache[key] = compute_bks(
            n, d, s, penalty=plan.penalty, tabu_sweeps=tabu_sweeps
        )
        added.append(key)
    return added


def save_bks(path, cache: dict) -> None:
    with open(path, "w") as f:
        f.write(BKS_HEADER + "\n")
        for (n, dens, seed), (cost, prov) in sorted(cache.items()):
            f.write(f"{n},{dens},{seed},{cost},{prov}\n")


def load_bks(path) -> dict:
    cache = {}
    with open(path) as f:
        header = f.readline().strip()
        if header != BKS_HEADER:
            raise ValueError(f"{path}: bad cache header {header!r}")
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 fields")
            n, dens, seed, cost, prov = parts
            cache[(int(n), fmt_density(float(dens)), int(seed))] = (int(cost), prov)
    return cache


def _nebm_kwargs(spec: dict, used: set) -> dict:
    kind = spec.get("schedule", "geometric")
    used.add("schedule")
    sched_keys = {
        "geometric": ("t0", "alpha", "refresh", "t_min"),
        "linear": ("t0", "delta", "refresh", "t_min"),
    }
    if kind not in sched_keys:
        raise ValueError(f"unknown schedule {kind!r}")
    sk = {}
    for key in sched_keys[kind]:
        if key in spec:
            sk[key] = spec[key]
            used.add(key)
    if "refresh" in sk:
        sk["refresh_every"] = int(sk.pop("refresh"))
    if "alpha" in sk:
        sk["alpha"] = Fraction(str(sk["alpha"]))
    # integer temperature units; tolerate float-typed CLI values
    for key in ("t0", "t_min", "delta"):
        if sk.get(key) is not None:
            sk[key] = int(sk[key])
    if kind == "geometric":
        schedule = network.GeometricSchedule(**sk)
    else:
        schedule = network.LinearSchedule(**sk)
    policy = network.RefractoryPolicy(
        spec.get("r_min", 1), spec.get("r_max", 8)
    )
    used.update(("r_min", "r_max"))
    out = {
        "schedule": schedule,
        "refractory": policy,
        "init": spec.get("init", "random"),
        "workers": spec.get("workers", 1),
    }
    used.update(("init", "workers"))
    return out


def run_solver(
    spec: dict,
    q: QuboMatrix,
    seed: int,
    budget_kind: str,
    budget,
    *,
    target_cost=None,
    trace=None,
) -> RunResult:
    """Dispatch one run of solver ``spec`` on ``q`` under the given budget.

    ``spec`` is the plan's solver mapping (``name`` plus solver-specific
    parameters); unknown parameters are rejected rather than ignored.
    ``trace`` (a text sink for per-step records) only exists for ``nebm``.
    """
    name = spec.get("name")
    used = {"name"}
    if trace is not None and name != "nebm":
        raise ValueError("trace output is only available for the nebm solver")
    if budget_kind == "steps":
        budget_kw = {"max_steps" if name == "nebm" else "sweeps": int(budget)}
    elif budget_kind == "seconds":
        budget_kw = {"max_seconds": float(budget)}
    else:
        raise ValueError(f"budget_kind must be steps|seconds, got {budget_kind!r}")
    if name == "nebm":
        kw = _nebm_kwargs(spec, used)
        _reject_unknown(spec, used)
        return network.solve_qubo(
            q, seed, target_cost=target_cost, trace=trace, **budget_kw, **kw
        )
    if name == "sa":
        # Pass through only the provided schedule fields so the schedule's
        # own defaults stay authoritative.
        sk = {k: spec[k] for k in ("t0", "alpha", "t_min") if k in spec}
        sched = baselines.CoolingSchedule(**sk) if sk else None
        used.update(("t0", "alpha", "t_min", "init"))
        _reject_unknown(spec, used)
        return baselines.sequential_sa(
            q,
            seed,
            schedule=sched,
            init=spec.get("init", "random"),
            target_cost=target_cost,
            **budget_kw,
        )
    if name == "tabu":
        kw = {}
        if "tenure" in spec:
            kw["tenure"] = spec["tenure"]
        # None is meaningful here (disables restarts), so only forward the
        # key when the caller actually set it.
        if "restart_after" in spec:
            kw["restart_after"] = spec["restart_after"]
        used.update(("tenure", "restart_after", "init"))
        _reject_unknown(spec, used)
        return baselines.tabu_search(
            q,
            seed,
            init=spec.get("init", "random"),
            target_cost=target_cost,
            **budget_kw,
            **kw,
        )
    raise ValueError(f"unknown solver {name!r}")


def _reject_unknown(spec: dict, used: set) -> None:
    extra = set(spec) - used
    if extra:
        raise ValueError(f"unknown solver parameters: {sorted(extra)}")


def run_plan(plan: BenchmarkPlan, bks: dict | None = None) -> list[BenchmarkRecord]:
    """Execute every cell of ``plan``; return one record per cell.

    ``bks`` is the best-known-solution cache (see :func:`load_bks`).
    Instances small enough for the exact oracle get their entry computed on
    the spot (and inserted into ``bks``); anything larger must already be
    cached or :class:`MissingBksError` is raised.
    """
    if bks is None:
        bks = {}
    records = []
    for n, density, iseed in plan.instances():
        key = instance_key(n, density, iseed)
        if key not in bks:
            if n <= BRUTE_FORCE_LIMIT:
                bks[key] = compute_bks(n, density, iseed, penalty=plan.penalty)
            else:
                raise MissingBksError(n, density, iseed)
        bks_cost, _prov = bks[key]
        g = generate_mis_graph(n, density, iseed)
        q = mis_to_qubo(g, plan.penalty)
        for spec in plan.solvers:
            chash = config_hash({"penalty": plan.penalty, **spec})
            for budget in plan.budgets:
                for run_seed in range(plan.repetitions):
                    res = run_solver(spec, q, run_seed, plan.budget_kind, budget)
                    records.append(
                        BenchmarkRecord(
                            instance_n=n,
                            density=density,
                            instance_seed=iseed,
                            solver=spec["name"],
                            config_hash=chash,
                            budget_kind=plan.budget_kind,
                            budget=budget,
                            run_seed=run_seed,
                            best_cost=res.best_cost,
                            bks_cost=bks_cost,
                            gap_percent=gap_percent(res.best_cost, bks_cost),
                            steps=res.steps,
                            wall_ms=res.elapsed_s * 1000.0,
                            assignment=res.best_assignment,
                        )
                    )
    return records


def save_records(path, records, *, assignments_path=None) -> None:
    """Write the results CSV plus the assignments sidecar.

    The sidecar holds one ``<row> <n> <bits>`` line per record (row numbers
    match CSV data-row order) so best costs stay re-verifiable.
    """
    if assignments_path is None:
        assignments_path = str(path) + ".assignments"
    with open(path, "w") as f:
        f.write(RESULTS_HEADER + "\n")
        for rec in records:
            f.write(rec.csv_row() + "\n")
    with open(assignments_path, "w") as f:
        for row, rec in enumerate(records):
            bits = "".join(map(str, rec.assignment.tolist()))
            f.write(f"{row} {rec.instance_n} {bits}\n")


def load_records(path) -> list[dict]:
    """Read a results CSV back into typed dicts (no assignments)."""
    out = []
    with open(path) as f:
        header = f.readline().strip()
        if header != RESULTS_HEADER:
            raise ValueError(f"{path}: bad results header {header!r}")
        names = RESULTS_HEADER.split(",")
        types = {
            "instance_n": int,
            "density": float,
            "instance_seed": int,
            "budget": float,
            "run_seed": int,
            "best_cost": int,
            "bks_cost": int,
            "gap_percent": float,
            "steps": int,
            "wall_ms": float,
        }
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(names):
                raise ValueError(f"{path}:{lineno}: expected {len(names)} fields")
            rec = {
                k: types.get(k, str)(v) for k, v in zip(names, parts)
            }
            out.append(rec)
    return out


def load_assignments(path) -> dict[int, np.ndarray]:
    out = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            row, n, bits = line.split()
            arr = np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
            if arr.size != int(n):
                raise ValueError(f"assignment row {row}: length mismatch")
            out[int(row)] = arr.astype(np.int8)
    return out


def summarize(records) -> list[dict]:
    """Aggregate gap and timing per (solver, n, density, budget) group.

    Output order is canonical (sorted group keys), so summaries are
    invariant to the input record order.
    """
    groups: dict[tuple, list] = {}
    for rec in records:
        if isinstance(rec, BenchmarkRecord):
            key = (rec.solver, rec.instance_n, rec.density, rec.budget_kind, rec.budget)
            row = (rec.gap_percent, rec.steps, rec.wall_ms)
        else:
            key = (
                rec["solver"],
                rec["instance_n"],
                rec["density"],
                rec["budget_kind"],
                rec["budget"],
            )
            row = (rec["gap_percent"], rec["steps"], rec["wall_ms"])
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups):
        rows = groups[key]
        gaps = [r[0] for r in rows]
        out.append(
            {
                "solver": key[0],
                "instance_n": key[1],
                "density": key[2],
                "budget_kind": key[3],
                "budget": key[4],
                "runs": len(rows),
                "gap_mean": sum(gaps) / len(gaps),
                "gap_min": min(gaps),
                "gap_max": max(gaps),
                "steps_mean": sum(r[1] for r in rows) / len(rows),
                "wall_ms_mean": sum(r[2] for r in rows) / len(rows),
            }
        )
    return out


SUMMARY_HEADER = (
    "solver,instance_n,density,budget_kind,budget,runs,"
    "gap_mean,gap_min,gap_max,steps_mean,wall_ms_mean"
)


def save_summary(path, summary: list[dict]) -> None:
    with open(path, "w") as f:
        f.write(SUMMARY_HEADER + "\n")
        for g in summary:
            budget = (
                str(int(g["budget"]))
                if g["budget_kind"] == "steps"
                else format(float(g["budget"]), ".6g")
            )
            f.write(
                ",".join(
                    [
                        g["solver"],
                        str(g["instance_n"]),
                        fmt_density(g["density"]),
                        g["budget_kind"],
                        budget,
                        str(g["runs"]),
                        f"{g['gap_mean']:.6f}",
                        f"{g['gap_min']:.6f}",
                        f"{g['gap_max']:.6f}",
                        f"{g['steps_mean']:.3f}",
                        f"{g['wall_ms_mean']:.3f}",
                    ]
                )
                + "\n"
            )


__all__ = [
    "BKS_HEADER",
    "BenchmarkPlan",
    "BenchmarkRecord",
    "DEFAULT_BKS_SWEEPS",
    "MissingBksError",
    "RESULTS_HEADER",
    "SUMMARY_HEADER",
    "compute_bks",
    "config_hash",
    "ensure_bks",
    "fmt_density",
    "gap_percent",
    "instance_key",
    "load_assignments",
    "load_bks",
    "load_records",
    "run_plan",
    "run_solver",
    "save_bks",
    "save_records",
    "save_summary",
    "summarize",
]
