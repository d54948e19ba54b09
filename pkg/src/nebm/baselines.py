"""Sequential reference solvers: single-flip annealing and tabu search.

Both walk the same single-flip neighbourhood as the parallel network and
share its exact integer cost kernel, so cost columns are directly
comparable. The annealer is the conventional control arm: real-valued
temperature, true exponential in the Metropolis test, one variable at a
time with immediate propagation. Tabu search is the deterministic
counterpart: per sweep it flips the single best non-tabu move, uphill if
nothing improves, and blocks the flipped variable for ``tenure`` sweeps.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .metropolis import INIT_STREAM, Rng24, exact_accept, rand24_stream, stream_seed
from .qubo import QuboMatrix, as_assignment, evaluate_cost, local_fields
from .result import RunResult

#: Stream index for a sequential solver's single decision stream.
DECISION_STREAM = 1 << 33


@dataclass(frozen=True)
class CoolingSchedule:
    """Real-valued geometric cooling ``T(sweep) = max(t_min, t0 * alpha^sweep)``.

    ``t0 = None`` derives the start from the initial state as
    ``max_i |q_ii + 2 z_i|`` (same convention as the parallel solver).
    ``t_min`` must stay strictly positive because the exact Metropolis test
    is undefined at zero temperature. The default floor keeps a trickle of
    unit-uphill moves alive (accept chance e^-2 per visit) so long runs can
    leave local minima instead of freezing.
    """

    t0: float | None = None
    alpha: float = 0.95
    t_min: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.t_min <= 0.0:
            raise ValueError("t_min must be > 0")
        if self.t0 is not None and self.t0 <= 0.0:
            raise ValueError("t0 must be > 0")

    def temperature(self, sweep: int) -> float:
        return max(self.t_min, self.t0 * self.alpha**sweep)


@dataclass(frozen=True)
class Decision:
    """One audited accept/reject: ``accepted == exact_accept(delta_c, temp, u)``."""

    sweep: int
    index: int
    delta_c: int
    temperature: float
    u: float
    accepted: bool


def _initial_state(q: QuboMatrix, seed: int, init):
    if isinstance(init, str):
        if init == "zeros":
            x = np.zeros(q.n, dtype=np.int8)
        elif init == "random":
            bits = rand24_stream(stream_seed(seed, INIT_STREAM), q.n) >> 23
            x = bits.astype(np.int8)
        else:
            raise ValueError(f"unknown init {init!r}")
    else:
        x = as_assignment(init, q.n).copy()
    z = local_fields(q, x)
    cost = int(np.sum(x * (z + q.diag)))
    return x, z, cost


def _flip_inplace(q: QuboMatrix, x, z, i: int) -> None:
    # Single-flip z patch over the adjacency row; sign follows the new bit.
    x[i] ^= 1
    lo, hi = int(q.adj_ptr[i]), int(q.adj_ptr[i + 1])
    if lo == hi:
        return
    if x[i]:
        z[q.adj_j[lo:hi]] += q.adj_q[lo:hi]
    else:
        z[q.adj_j[lo:hi]] -= q.adj_q[lo:hi]


def sequential_sa(
    q: QuboMatrix,
    seed: int,
    *,
    sweeps: int | None = None,
    max_seconds: float | None = None,
    schedule: CoolingSchedule | None = None,
    init="random",
    target_cost: int | None = None,
    record_decisions: bool = False,
) -> RunResult:
    """Single-flip simulated annealing with the exact Boltzmann test.

    Each sweep visits every variable once in a fresh uniformly random order;
    each visit draws one uniform ``u`` and accepts iff
    ``exp(-delta_c / T) >= u`` (downhill moves always pass). Accepted flips
    take effect immediately, so later decisions in the same sweep see them.
    ``record_decisions`` attaches the full audit trail to the result.
    """
    if q.n == 0:
        raise ValueError("cannot anneal zero variables")
    if sweeps is None and max_seconds is None:
        raise ValueError("need sweeps and/or max_seconds")
    if sweeps is not None and sweeps < 0:
        raise ValueError(f"sweeps must be non-negative, got {sweeps}")
    x, z, cost = _initial_state(q, seed, init)
    best_cost = cost
    best_x = x.copy()
    rng = Rng24(stream_seed(seed, DECISION_STREAM))
    if schedule is None:
        schedule = CoolingSchedule()
    if schedule.t0 is None:
        t0 = float(max(1, int(np.max(np.abs(q.diag + 2 * z)))))
        schedule = CoolingSchedule(t0=t0, alpha=schedule.alpha, t_min=schedule.t_min)
    order = np.arange(q.n, dtype=np.int64)
    log: list[Decision] | None = [] if record_decisions else None
    flips_hist: list[int] = []
    diag = q.diag
    t_start = time.perf_counter()
    deadline = None if max_seconds is None else t_start + max_seconds
    sweep = 0
    while True:
        if sweeps is not None and sweep >= sweeps:
            break
        if deadline is not None and time.perf_counter() >= deadline:
            break
        if target_cost is not None and best_cost <= target_cost:
            break
        temp = schedule.temperature(sweep)
        # Fisher-Yates on the visit order, one fresh permutation per sweep.
        for k in range(q.n - 1, 0, -1):
            j = rng.next_below(k + 1)
            order[k], order[j] = order[j], order[k]
        flips = 0
        for i in order.tolist():
            d = int(diag[i]) + 2 * int(z[i])
            dc = -d if x[i] else d
            u = rng.next_unit()
            ok = exact_accept(dc, temp, u)
            if log is not None:
                log.append(Decision(sweep, i, dc, temp, u, ok))
            if ok:
                _flip_inplace(q, x, z, i)
                cost += dc
                flips += 1
                if cost < best_cost:
                    best_cost = cost
                    best_x = x.copy()
        flips_hist.append(flips)
        sweep += 1
    return RunResult(
        best_cost=best_cost,
        best_assignment=best_x,
        steps=sweep,
        elapsed_s=time.perf_counter() - t_start,
        flips_per_step=np.asarray(flips_hist, dtype=np.int64),
        decision_log=log,
    )


def tabu_search(
    q: QuboMatrix,
    seed: int,
    *,
    sweeps: int | None = None,
    max_seconds: float | None = None,
    tenure: int | None = None,
    restart_after: int | None = 400,
    init="random",
    target_cost: int | None = None,
) -> RunResult:
    """Deterministic single-flip tabu search with stagnation restarts.

    Per sweep: evaluate the exact delta of every variable, flip the most
    negative among the allowed ones (lowest index on ties), uphill when
    nothing improves, then mark the flipped variable tabu for ``tenure``
    sweeps. A tabu move is allowed anyway when it would beat the global
    best (aspiration). After ``restart_after`` sweeps without a new global
    best the state is redrawn and the tabu list cleared; pass None to
    disable. Deterministic per (seed, config).
    """
    if q.n == 0:
        raise ValueError("cannot search zero variables")
    if sweeps is None and max_seconds is None:
        raise ValueError("need sweeps and/or max_seconds")
    if sweeps is not None and sweeps < 0:
        raise ValueError(f"sweeps must be non-negative, got {sweeps}")
    if tenure is None:
        tenure = max(7, q.n // 10)
    if tenure < 1:
        raise ValueError(f"tenure must be >= 1, got {tenure}")
    if restart_after is not None and restart_after < 1:
        raise ValueError(f"restart_after must be >= 1, got {restart_after}")
    x, z, cost = _initial_state(q, seed, init)
    best_cost = cost
    best_x = x.copy()
    tabu_until = np.full(q.n, -1, dtype=np.int64)
    big = np.iinfo(np.int64).max
    restart_rng = Rng24(stream_seed(seed, DECISION_STREAM))
    last_improve = 0
    t_start = time.perf_counter()
    deadline = None if max_seconds is None else t_start + max_seconds
    sweep = 0
    while True:
        if sweeps is not None and sweep >= sweeps:
            break
        if deadline is not None and time.perf_counter() >= deadline:
            break
        if target_cost is not None and best_cost <= target_cost:
            break
        if restart_after is not None and sweep - last_improve >= restart_after:
            for i in range(q.n):
                x[i] = restart_rng.next24() >> 23
            z = local_fields(q, x)
            cost = evaluate_cost(q, x)
            tabu_until[:] = -1
            last_improve = sweep
        d = q.diag + 2 * z
        dc = np.where(x == 1, -d, d)
        allowed = (sweep > tabu_until) | (cost + dc < best_cost)
        if not allowed.any():
            # Every variable tabu and none aspirating (possible only when
            # tenure >= n); fall back to the plain best move.
            allowed[:] = True
        masked = np.where(allowed, dc, big)
        i = int(np.argmin(masked))
        delta = int(dc[i])
        _flip_inplace(q, x, z, i)
        cost += delta
        tabu_until[i] = sweep + tenure
        if cost < best_cost:
            best_cost = cost
            best_x = x.copy()
            last_improve = sweep
        sweep += 1
    return RunResult(
        best_cost=best_cost,
        best_assignment=best_x,
        steps=sweep,
        elapsed_s=time.perf_counter() - t_start,
    )


__all__ = [
    "CoolingSchedule",
    "Decision",
    "sequential_sa",
    "tabu_search",
]
