"""Dense state-vector core for amplitude-amplification search.

Amplitudes are complex128 over the 2**n computational basis states.
The diffusion step is the reflection about the uniform state, applied
in O(N) as a mean-subtraction rather than three explicit gate layers;
both forms are algebraically identical and the test suite checks the
fast path against dense operator matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

MAX_QUBITS = 24
NORM_TOL = 1e-12


def _check_qubit_count(n: int) -> None:
    if not isinstance(n, int) or n < 1 or n > MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n!r}")


@dataclass(frozen=True)
class QState:
    """Normalized amplitude vector over 2**n basis states."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        _check_qubit_count(self.n)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise ValueError(
                f"expected {1 << self.n} amplitudes for n={self.n}, got shape {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state norm**2 is {norm_sq}, more than {NORM_TOL} from 1")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def size(self) -> int:
        return 1 << self.n

    @classmethod
    def basis(cls, n: int, index: int) -> "QState":
        """Computational basis state |index> on n qubits."""
        _check_qubit_count(n)
        if not 0 <= index < (1 << n):
            raise ValueError(f"basis index {index} out of range for n={n}")
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class SearchProblem:
    """Search instance: membership predicate plus its explicit solution set.

    The two views are kept consistent by construction: build either from
    an explicit solution set (`from_solutions`) or from a predicate that
    is enumerated once over the full domain (`from_predicate`).
    """

    n: int
    predicate: Callable[[int], bool]
    solution_set: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_qubit_count(self.n)
        sols = tuple(self.solution_set)
        if any(not 0 <= x < self.size for x in sols):
            raise ValueError(f"solution indices must lie in [0, {self.size})")
        if sorted(set(sols)) != list(sols):
            raise ValueError("solution_set must be sorted and free of duplicates")
        object.__setattr__(self, "solution_set", sols)

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def solution_count(self) -> int:
        return len(self.solution_set)

    @classmethod
    def from_solutions(cls, n: int, solutions: Iterable[int]) -> "SearchProblem":
        sols = tuple(sorted(int(x) for x in solutions))
        if len(set(sols)) != len(sols):
            raise ValueError(f"duplicate solution indices in {sols}")
        members = frozenset(sols)
        return cls(n, lambda x: x in members, sols)

    @classmethod
    def from_predicate(cls, n: int, predicate: Callable[[int], bool]) -> "SearchProblem":
        _check_qubit_count(n)
        sols = tuple(x for x in range(1 << n) if predicate(x))
        return cls(n, predicate, sols)

    def solution_mask(self) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        if self.solution_set:
            mask[list(self.solution_set)] = True
        return mask


def _check_dims(state: QState, problem: SearchProblem) -> None:
    if state.n != problem.n:
        raise ValueError(f"state is on {state.n} qubits but problem is on {problem.n}")


def uniform_superposition(n: int) -> QState:
    """Equal superposition over all 2**n basis states."""
    _check_qubit_count(n)
    size = 1 << n
    amps = np.full(size, 1.0 / np.sqrt(size), dtype=np.complex128)
    return QState(n, amps)


def apply_oracle_phase(state: QState, problem: SearchProblem) -> QState:
    """Flip the sign of every solution amplitude; leave the rest untouched."""
    _check_dims(state, problem)
    amps = state.amplitudes.copy()
    if problem.solution_set:
        amps[list(problem.solution_set)] *= -1.0
    return QState(state.n, amps)


def apply_diffusion(state: QState) -> QState:
    """Reflect about the uniform state: a_x <- 2*mean(a) - a_x."""
    mean = state.amplitudes.mean()
    return QState(state.n, 2.0 * mean - state.amplitudes)


def grover_iteration(state: QState, problem: SearchProblem) -> QState:
    """One amplification round: oracle phase flip followed by diffusion."""
    return apply_diffusion(apply_oracle_phase(state, problem))


def success_probability(state: QState, problem: SearchProblem) -> float:
    """Total probability mass on the solution basis states."""
    _check_dims(state, problem)
    if not problem.solution_set:
        return 0.0
    probs = state.probabilities()
    return float(np.sum(probs[list(problem.solution_set)]))


def measure(state: QState, rng: np.random.Generator) -> int:
    """Sample one basis index from |amplitude|**2 (Born rule).

    The same generator state always yields the same index, which is what
    makes whole runs replayable from a recorded seed.
    """
    cdf = np.cumsum(state.probabilities())
    index = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(index, state.size - 1)
