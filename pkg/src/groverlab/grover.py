"""Amplitude-amplification search driver.

Schedules the iteration count, runs the oracle/diffusion loop from the
uniform state, measures once, and reports the outcome with its ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoSolutionError
from .ledger import AMPLITUDE_PASSES_PER_STAGE, StepLedger
from .statevector import (
    QState,
    SearchProblem,
    grover_iteration,
    measure,
    success_probability,
    uniform_superposition,
)

AUTO = "auto"


@dataclass(frozen=True)
class GroverResult:
    sampled_index: int
    is_solution: bool
    success_probability: float
    iterations_used: int
    ledger: StepLedger

    def to_dict(self) -> dict:
        return {
            "sampled_index": self.sampled_index,
            "is_solution": self.is_solution,
            "success_probability": self.success_probability,
            "iterations_used": self.iterations_used,
            "ledger": self.ledger.to_dict(),
        }


def optimal_iterations(size: int, solution_count: int) -> int:
    """Iteration count floor((pi/4) sqrt(N/M)), with two edge rules.

    M = N needs no amplification (the uniform state already succeeds),
    so the count is 0. When the floor lands on 0 with M < N, one
    iteration still improves the success probability, so the minimum
    is 1 there.
    """
    n = size.bit_length() - 1
    if size < 2 or 2**n != size:
        raise ValueError(f"size must be a power of two >= 2, got {size}")
    if solution_count == 0:
        raise NoSolutionError("no solutions: the rotation angle is undefined")
    if not 0 < solution_count <= size:
        raise ValueError(f"solution_count={solution_count} outside [1, {size}]")
    if solution_count == size:
        return 0
    k = math.floor((math.pi / 4.0) * math.sqrt(size / solution_count))
    return max(k, 1)


def run_grover(
    problem: SearchProblem,
    iterations: int | str = AUTO,
    rng: np.random.Generator | None = None,
) -> GroverResult:
    """Prepare uniform, iterate, measure once.

    `iterations` is an explicit count or AUTO for the scheduled optimum.
    AUTO propagates the no-solution error when the problem is empty.
    """
    if iterations == AUTO:
        k = optimal_iterations(problem.size, problem.solution_count)
    else:
        k = int(iterations)
        if k < 0:
            raise ValueError(f"iteration count must be non-negative, got {k}")
    if rng is None:
        rng = np.random.default_rng()

    state: QState = uniform_superposition(problem.n)
    for _ in range(k):
        state = grover_iteration(state, problem)

    prob = success_probability(state, problem)
    index = measure(state, rng)
    ledger = StepLedger(
        paper_steps=0,
        predicate_evals=problem.size,
        amplitude_ops=AMPLITUDE_PASSES_PER_STAGE * problem.size * (k + 1),
        grover_iterations=k,
        grants_issued=0,
    )
    return GroverResult(
        sampled_index=index,
        is_solution=problem.predicate(index),
        success_probability=prob,
        iterations_used=k,
        ledger=ledger,
    )
