"""Parallel annealing network of binary neurons with refractory periods.

Every neuron applies the integer Metropolis test to its own flip at every
step, simultaneously, using only its pre-step local field. Unconditional
parallel flips would let coupled neighbours oscillate; here the damping is
stochastic instead of structural: a neuron that flips draws a refractory
duration uniform on ``[r_min, r_max]`` from its private stream and sits out
that many subsequent steps, so tightly coupled neighbours quickly
desynchronise. No neuron ever waits on another inside a step, which is what
makes the update rule embarrassingly parallel.

Cost observation is pipelined two steps deep: the cost emitted at step ``t``
is the exact cost of the assignment held after step ``t - 2`` (each neuron
reports its local term ``x_i (z_i + q_ii)`` from its delayed state and the
integrator sums them). Annealing runs directly on the integer temperature
``t_hat``: a schedule updates it in integer arithmetic every
``refresh_every`` steps, geometrically (multiply by an exact ratio, floor)
or linearly (subtract a decrement), so no float rounding ever touches the
acceptance test.

Determinism: all randomness comes from per-neuron counter streams derived
from the run seed, advanced only by that neuron's own decisions, so a run
is a pure function of ``(problem, seed, config)`` regardless of how the
per-step work is chunked across worker threads.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .metropolis import (
    INIT_STREAM,
    advance24_array,
    clz24_array,
    rand24_stream,
    stream_seed,
    stream_seed_array,
)
from .qubo import QuboMatrix, apply_flips, as_assignment, local_fields
from .result import RunResult


@dataclass(frozen=True)
class RefractoryPolicy:
    """Uniform refractory duration range, in steps.

    A flipped neuron skips its next ``d`` steps, ``d`` drawn uniformly from
    ``[r_min, r_max]``. ``r_min = r_max`` gives a deterministic period;
    ``(0, 0)`` disables refractoriness entirely (plain parallel updates).
    """

    r_min: int = 1
    r_max: int = 8

    def __post_init__(self):
        if not 0 <= self.r_min <= self.r_max:
            raise ValueError(
                f"need 0 <= r_min <= r_max, got ({self.r_min}, {self.r_max})"
            )

    @property
    def span(self) -> int:
        return self.r_max - self.r_min + 1


def sample_refractory(policy: RefractoryPolicy, rng) -> int:
    """One refractory duration for a just-flipped neuron, from its own rng."""
    return policy.r_min + rng.next_below(policy.span)


@dataclass(frozen=True)
class GeometricSchedule:
    """Integer cooling ``t_hat <- max(t_min, floor(t_hat * alpha))`` per refresh.

    ``alpha`` is kept as an exact fraction so the floor is computed in pure
    integer arithmetic. ``t0 = None`` derives the start value from the
    network's initial state as ``max_i |q_ii + 2 z_i|``, the largest flip
    magnitude anywhere at step zero, which makes early acceptance broad.

    The default floor is 1, not 0: at ``t_hat = 1`` a unit-uphill move still
    passes whenever the 24-bit draw starts with enough leading zeros, so a
    long run keeps hopping between near-optimal states instead of freezing
    into the first maximal one it reaches. Set ``t_min = 0`` for a schedule
    that becomes strictly greedy once cooled.
    """

    t0: int | None = None
    alpha: Fraction = Fraction(19, 20)
    refresh_every: int = 10
    t_min: int = 1

    def __post_init__(self):
        alpha = Fraction(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if not 0 < alpha < 1:
            raise ValueError(f"alpha must be in (0, 1), got {alpha}")
        if self.refresh_every < 1:
            raise ValueError("refresh_every must be >= 1")
        if self.t_min < 0:
            raise ValueError("t_min must be >= 0")
        if self.t0 is not None and self.t0 < 0:
            raise ValueError("t0 must be >= 0")

    def next_t_hat(self, t_hat: int) -> int:
        scaled = (t_hat * self.alpha.numerator) // self.alpha.denominator
        return max(self.t_min, scaled)


@dataclass(frozen=True)
class LinearSchedule:
    """Integer cooling ``t_hat <- max(t_min, t_hat - delta)`` per refresh."""

    delta: int = 1
    t0: int | None = None
    refresh_every: int = 10
    t_min: int = 0

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("delta must be >= 1")
        if self.refresh_every < 1:
            raise ValueError("refresh_every must be >= 1")
        if self.t_min < 0:
            raise ValueError("t_min must be >= 0")
        if self.t0 is not None and self.t0 < 0:
            raise ValueError("t0 must be >= 0")

    def next_t_hat(self, t_hat: int) -> int:
        return max(self.t_min, t_hat - self.delta)


@dataclass(frozen=True)
class StepReport:
    """What one step produced: the flip set and the delayed cost probe."""

    step: int
    flipped: np.ndarray
    cost_emitted: int
    t_hat: int

    @property
    def flips(self) -> int:
        return int(self.flipped.size)


class Network:
    """Struct-of-arrays state of the parallel annealer.

    Built by :func:`network_from_qubo`; advanced by :meth:`step` or
    :func:`run`. The delay-line copies (``x_prev1/2``, ``z_prev1/2``) model
    the two-step observation pipeline and are primed with the initial state,
    so the first two emitted costs both report the initial assignment.
    ``cost_emitted`` always holds the latest pipeline output; ``best_*``
    track the minimum over every emission plus the initial cost.
    """

    def __init__(self, q, x, t_hat0, schedule, policy, rng_state, seed, workers):
        self.q = q
        self.x = x
        self.z = local_fields(q, x)
        self.x_prev1 = x.copy()
        self.x_prev2 = x.copy()
        self.z_prev1 = self.z.copy()
        self.z_prev2 = self.z.copy()
        self.refractory = np.zeros(q.n, dtype=np.int64)
        self.rng_state = rng_state
        self.schedule = schedule
        self.policy = policy
        self.seed = seed
        self.workers = workers
        self.step_count = 0
        self.t_hat = t_hat0
        self.cost_emitted = self._live_cost()
        self.best_cost = self.cost_emitted
        self.best_assignment = x.copy()
        self.best_step = 0
        self.flips_per_step: list[int] = []
        self._pool = None
        self._flip_mask = np.zeros(q.n, dtype=bool)

    def _live_cost(self) -> int:
        return int(np.sum(self.x * (self.z + self.q.diag)))

    def _decide_chunk(self, lo: int, hi: int, d: np.ndarray) -> None:
        # Decision phase for neurons [lo, hi): refractory neurons draw
        # nothing, everyone else burns exactly one rand.
        idx = np.nonzero(self.refractory[lo:hi] == 0)[0]
        if idx.size == 0:
            return
        idx += lo
        rands = advance24_array(self.rng_state, idx)
        dc = np.where(self.x[idx] == 1, -d[idx], d[idx])
        accept = (dc < 0) | (rands == 0) | (dc < self.t_hat * clz24_array(rands))
        self._flip_mask[idx] = accept

    def step(self) -> StepReport:
        """Advance every neuron one synchronous step; return the step report."""
        n = self.q.n
        # Shift the observation pipeline before mutating the live state.
        np.copyto(self.x_prev2, self.x_prev1)
        np.copyto(self.z_prev2, self.z_prev1)
        np.copyto(self.x_prev1, self.x)
        np.copyto(self.z_prev1, self.z)

        # Decision phase: one Metropolis test per non-refractory neuron, all
        # against the same pre-step fields, in any chunking whatsoever.
        self._flip_mask[:] = False
        d = self.q.diag + 2 * self.z
        if self.workers == 1 or n < 2 * self.workers:
            self._decide_chunk(0, n, d)
        else:
            if self._pool is None:
                self._pool = ThreadPoolExecutor(max_workers=self.workers)
            bounds = [n * k // self.workers for k in range(self.workers + 1)]
            futures = [
                self._pool.submit(self._decide_chunk, bounds[k], bounds[k + 1], d)
                for k in range(self.workers)
            ]
            for f in futures:
                f.result()
        flipped = np.nonzero(self._flip_mask)[0]

        # Commit phase: tick down running refractory counters, apply the
        # flips, then arm fresh counters for the neurons that just fired.
        np.subtract(
            self.refractory, 1, out=self.refractory, where=self.refractory > 0
        )
        if flipped.size:
            apply_flips(self.q, self.x, self.z, flipped)
            draws = advance24_array(self.rng_state, flipped)
            self.refractory[flipped] = self.policy.r_min + draws % self.policy.span

        # Observation: the integrator sums per-neuron local terms of the
        # assignment from two steps back.
        cost = int(np.sum(self.x_prev2 * (self.z_prev2 + self.q.diag)))
        self.cost_emitted = cost
        self.step_count += 1
        if cost < self.best_cost:
            self.best_cost = cost
            self.best_assignment = self.x_prev2.copy()
            self.best_step = max(0, self.step_count - 2)
        self.flips_per_step.append(int(flipped.size))

        if self.step_count % self.schedule.refresh_every == 0:
            self.t_hat = self.schedule.next_t_hat(self.t_hat)
        return StepReport(
            step=self.step_count,
            flipped=flipped,
            cost_emitted=cost,
            t_hat=self.t_hat,
        )

    def flush_observations(self) -> None:
        """Fold the two assignments still inside the pipeline into the best.

        Without this, a run stopping at step ``t`` would never observe its
        final two assignments.
        """
        for lag, (xs, zs) in enumerate(
            ((self.x_prev1, self.z_prev1), (self.x, self.z))
        ):
            c = int(np.sum(xs * (zs + self.q.diag)))
            if c < self.best_cost:
                self.best_cost = c
                self.best_assignment = xs.copy()
                self.best_step = self.step_count - 1 + lag
        self.best_step = max(0, self.best_step)

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self) -> "Network":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def network_from_qubo(
    q: QuboMatrix,
    seed: int,
    *,
    schedule=None,
    refractory: RefractoryPolicy | None = None,
    init="random",
    workers: int = 1,
) -> Network:
    """Wire a :class:`Network` for ``q`` with per-neuron streams from ``seed``.

    ``init`` is ``"random"`` (the default: one fair bit per neuron from a
    dedicated stream, so initialisation never perturbs decision streams),
    ``"zeros"``, or an explicit 0/1 vector. ``workers`` chunks the decision
    phase across threads without changing any result.
    """
    if q.n == 0:
        raise ValueError("cannot build a network with zero neurons")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
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
    if schedule is None:
        schedule = GeometricSchedule()
    policy = refractory if refractory is not None else RefractoryPolicy()
    if schedule.t0 is not None:
        t_hat0 = int(schedule.t0)
    else:
        z0 = local_fields(q, x)
        t_hat0 = int(np.max(np.abs(q.diag + 2 * z0)))
    rng_state = stream_seed_array(seed, np.arange(q.n, dtype=np.int64))
    return Network(q, x, t_hat0, schedule, policy, rng_state, seed, workers)


def run(
    net: Network,
    *,
    max_steps: int | None = None,
    max_seconds: float | None = None,
    target_cost: int | None = None,
    sample_every: int = 0,
    trace=None,
) -> RunResult:
    """Drive ``net`` until a budget or the target is hit; return the result.

    At least one of ``max_steps`` and ``max_seconds`` is required.
    ``target_cost`` stops as soon as the best observed cost reaches it (the
    two-step probe means detection can trail the actual hit by two steps).
    ``sample_every > 0`` records ``(step, cost_emitted)`` samples; ``trace``
    is an optional text sink receiving one
    ``"<step> <flips> <cost_emitted> <t_hat>"`` line per step.
    """
    if max_steps is None and max_seconds is None:
        raise ValueError("need max_steps and/or max_seconds")
    if max_steps is not None and max_steps < 0:
        raise ValueError(f"max_steps must be non-negative, got {max_steps}")
    start_steps = net.step_count
    trajectory: list[tuple[int, int]] | None = [] if sample_every > 0 else None
    t_start = time.perf_counter()
    deadline = None if max_seconds is None else t_start + max_seconds
    while True:
        done = net.step_count - start_steps
        if max_steps is not None and done >= max_steps:
            break
        if deadline is not None and time.perf_counter() >= deadline:
            break
        if target_cost is not None and net.best_cost <= target_cost:
            break
        rep = net.step()
        if sample_every > 0 and rep.step % sample_every == 0:
            trajectory.append((rep.step, rep.cost_emitted))
        if trace is not None:
            trace.write(f"{rep.step} {rep.flips} {rep.cost_emitted} {rep.t_hat}\n")
    net.flush_observations()
    elapsed = time.perf_counter() - t_start
    return RunResult(
        best_cost=net.best_cost,
        best_assignment=net.best_assignment.copy(),
        steps=net.step_count - start_steps,
        elapsed_s=elapsed,
        flips_per_step=np.asarray(
            net.flips_per_step[start_steps:], dtype=np.int64
        ),
        cost_trajectory=trajectory,
    )


def solve_qubo(
    q: QuboMatrix,
    seed: int,
    *,
    max_steps: int | None = None,
    max_seconds: float | None = None,
    target_cost: int | None = None,
    schedule=None,
    refractory: RefractoryPolicy | None = None,
    init="random",
    workers: int = 1,
    sample_every: int = 0,
    trace=None,
) -> RunResult:
    """One-call convenience: build the network, run it, release the pool."""
    net = network_from_qubo(
        q, seed, schedule=schedule, refractory=refractory, init=init, workers=workers
    )
    try:
        return run(
            net,
            max_steps=max_steps,
            max_seconds=max_seconds,
            target_cost=target_cost,
            sample_every=sample_every,
            trace=trace,
        )
    finally:
        net.close()


__all__ = [
    "GeometricSchedule",
    "LinearSchedule",
    "Network",
    "RefractoryPolicy",
    "StepReport",
    "network_from_qubo",
    "run",
    "sample_refractory",
    "solve_qubo",
]
