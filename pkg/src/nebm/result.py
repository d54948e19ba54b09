"""Common result record returned by every solver."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(eq=False)
class RunResult:
    """Outcome of one solver run.

    ``best_cost`` is the lowest exact cost observed and ``best_assignment``
    the bit vector that achieved it. ``steps`` counts solver steps (parallel
    network steps, or sweeps for the sequential baselines). Equality compares
    everything except ``elapsed_s``: two runs of a deterministic solver with
    the same seed are the same result even though wall time never repeats.
    """

    best_cost: int
    best_assignment: np.ndarray
    steps: int
    elapsed_s: float
    flips_per_step: np.ndarray | None = None
    cost_trajectory: list[tuple[int, int]] | None = None
    decision_log: list | None = field(default=None, repr=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RunResult):
            return NotImplemented
        return (
            self.best_cost == other.best_cost
            and np.array_equal(self.best_assignment, other.best_assignment)
            and self.steps == other.steps
            and _opt_array_equal(self.flips_per_step, other.flips_per_step)
            and self.cost_trajectory == other.cost_trajectory
            and self.decision_log == other.decision_log
        )


def _opt_array_equal(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)
