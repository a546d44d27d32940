"""Search by marking register plus concurrent answer collection.

The search itself is a classical exhaustive pass: every domain point is
tested and the hits are flagged in a mark register. One writer is then
spawned per flagged index, and the writers compete for the shared
answer/count registers under the arbiter. The default engine is a
deterministic event-sequential simulation whose trace replays exactly
for a given seed; stress mode swaps in real threads behind the same
protocol.

Faults model a writer dying after its grant but before its write. Fault
outcomes are drawn from a stream keyed by (run seed, writer index,
attempt number), never from a shared generator, so a writer's fate does
not depend on grant order or thread scheduling. Failed writers are
respawned in rounds until none remain or the rerun budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .arbiter import (
    AnsMode,
    AnswerStore,
    CentralController,
    CountRegister,
    EventKind,
    SelectionPolicy,
    TraceEvent,
    TraceLog,
    WriteRequest,
    ccc_arbitrate,
    run_stress_round,
    write_and_increment,
)
from .errors import NoSolutionError, RerunLimitError
from .ledger import StepLedger
from .statevector import SearchProblem


@dataclass(eq=False)
class MarkRegister:
    """One boolean flag per domain point, all clear until the marking pass."""

    size: int
    marks: np.ndarray

    @classmethod
    def empty(cls, size: int) -> "MarkRegister":
        return cls(size=size, marks=np.zeros(size, dtype=bool))

    def marked_indices(self) -> list[int]:
        return [int(j) for j in np.nonzero(self.marks)[0]]


@dataclass(frozen=True)
class FaultConfig:
    """Per-attempt write-failure model.

    `probability` applies independently to each write attempt. A run
    makes at most 1 + max_reruns rounds. With first_attempt_only set,
    attempts after the first never fail; that is the only configuration
    where probability 1.0 terminates, so it is the only one where 1.0
    is accepted. full_restart respawns every writer after a failed
    round instead of only the failed ones.
    """

    probability: float = 0.0
    max_reruns: int = 0
    first_attempt_only: bool = False
    full_restart: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability {self.probability} outside [0, 1]")
        if self.probability == 1.0 and not self.first_attempt_only:
            raise ValueError(
                "probability 1.0 can never complete unless faults are "
                "limited to the first attempt"
            )
        if self.max_reruns < 0:
            raise ValueError(f"max_reruns must be non-negative, got {self.max_reruns}")

    def fires(self, seed: int, index: int, attempt: int) -> bool:
        """Fault outcome for one attempt; a pure function of its arguments."""
        if self.probability == 0.0:
            return False
        if self.first_attempt_only and attempt > 1:
            return False
        stream = np.random.default_rng([seed, index, attempt])
        return bool(stream.random() < self.probability)


NO_FAULTS = FaultConfig()


@dataclass(frozen=True)
class MarkedSearchResult:
    answers: tuple[int, ...]
    count: int
    trace: tuple[TraceEvent, ...]
    ledger: StepLedger
    attempts: int

    def to_dict(self) -> dict:
        return {
            "answers": list(self.answers),
            "count": self.count,
            "attempts": self.attempts,
            "ledger": self.ledger.to_dict(),
        }


@dataclass(frozen=True)
class EarlyStopResult:
    index: int
    trace: tuple[TraceEvent, ...]
    ledger: StepLedger

    def to_dict(self) -> dict:
        return {"index": self.index, "ledger": self.ledger.to_dict()}


def mark_solutions(
    problem: SearchProblem, ledger: StepLedger | None = None
) -> MarkRegister:
    """Exhaustive marking pass: test every point, flag the hits.

    Charges N predicate evaluations to the ledger and zero on-paper
    steps (see the ledger module for the pricing rationale).
    """
    register = MarkRegister.empty(problem.size)
    for x in range(problem.size):
        if problem.predicate(x):
            register.marks[x] = True
    if ledger is not None:
        ledger.predicate_evals += problem.size
    return register


def spawn_writers(marks: MarkRegister) -> list[WriteRequest]:
    """One writer per marked index, submission order ascending by index."""
    return [
        WriteRequest(index=j, submit_order=i)
        for i, j in enumerate(marks.marked_indices())
    ]


def _shuffle_submit_order(
    requests: Sequence[WriteRequest], seed: int
) -> list[WriteRequest]:
    perm = np.random.default_rng(seed).permutation(len(requests))
    return [replace(r, submit_order=int(p)) for r, p in zip(requests, perm)]


def _sequential_round(
    round_requests: Sequence[WriteRequest],
    policy: SelectionPolicy,
    trace: TraceLog,
    store: AnswerStore,
    count: CountRegister,
    answers: list[int],
    ledger: StepLedger,
    faults: FaultConfig,
    seed: int,
    on_write: Callable[[int, AnswerStore, CountRegister], None] | None,
) -> list[WriteRequest]:
    """One grant round in the deterministic engine; returns failed writers."""
    by_index = {r.index: r for r in round_requests}
    for request in sorted(round_requests, key=lambda r: r.submit_order):
        trace.add(EventKind.REQUEST, request.index)
    failed: list[WriteRequest] = []
    for index in ccc_arbitrate(round_requests, policy):
        request = by_index[index]
        trace.add(EventKind.GRANT, index)
        ledger.grants_issued += 1
        ledger.paper_steps += 1
        if faults.fires(seed, index, request.attempt):
            trace.add(EventKind.FAIL, index)
            failed.append(request)
            continue
        trace.add(EventKind.WRITE_START, index)
        write_and_increment(index, store, count)
        trace.add(EventKind.WRITE_END, index)
        answers.append(index)
        if on_write is not None:
            on_write(index, store, count)
        trace.add(EventKind.RELEASE, index)
    return failed


def run_marked_search(
    problem: SearchProblem,
    policy: SelectionPolicy,
    mode: AnsMode = AnsMode.ARRAY,
    faults: FaultConfig = NO_FAULTS,
    seed: int = 0,
    *,
    stress: bool = False,
    shuffle_submit_seed: int | None = None,
    on_write: Callable[[int, AnswerStore, CountRegister], None] | None = None,
) -> MarkedSearchResult:
    """Mark, spawn, arbitrate, and collect until every hit is written.

    Fault rounds respawn only the failed writers unless full_restart is
    set. Raises RerunLimitError when writers still fail after the
    allowed reruns. An empty solution set completes in one trivial
    round with no answers.
    """
    ledger = StepLedger(paper_steps=problem.n)
    marks = mark_solutions(problem, ledger)
    requests = spawn_writers(marks)
    if shuffle_submit_seed is not None:
        requests = _shuffle_submit_order(requests, shuffle_submit_seed)

    trace = TraceLog()
    controller = CentralController(policy) if stress else None
    store = AnswerStore(mode=mode, capacity=problem.size)
    count = CountRegister()
    answers: list[int] = []
    pending = list(requests)
    attempts = 0

    while True:
        attempts += 1
        if attempts > 1 + faults.max_reruns:
            raise RerunLimitError(
                f"writers {sorted(r.index for r in pending)} still failing "
                f"after {faults.max_reruns} reruns"
            )
        if faults.full_restart and attempts > 1:
            store = AnswerStore(mode=mode, capacity=problem.size)
            count = CountRegister()
            answers = []
            pending = [replace(r, attempt=attempts) for r in requests]
        if controller is not None:
            failed = run_stress_round(
                pending,
                controller,
                store,
                count,
                answers,
                lambda r: faults.fires(seed, r.index, r.attempt),
            )
        else:
            failed = _sequential_round(
                pending, policy, trace, store, count, answers,
                ledger, faults, seed, on_write,
            )
        if not failed:
            break
        if not faults.full_restart:
            pending = [replace(r, attempt=r.attempt + 1) for r in failed]

    if controller is not None:
        events = controller.trace
        grants = sum(1 for e in events if e.kind is EventKind.GRANT)
        ledger.grants_issued = grants
        ledger.paper_steps = problem.n + grants
    else:
        events = trace.events

    return MarkedSearchResult(
        answers=tuple(answers),
        count=count.value,
        trace=events,
        ledger=ledger,
        attempts=attempts,
    )


def early_stop_search(
    problem: SearchProblem, policy: SelectionPolicy, seed: int = 0
) -> EarlyStopResult:
    """Halt after the first granted write and report that one index.

    The writers that were still waiting when the run halts are resolved
    with Fail events so the trace stays complete. Raises NoSolutionError
    when there is nothing to find.
    """
    del seed  # accepted for interface symmetry; no randomness is consumed
    ledger = StepLedger(paper_steps=problem.n)
    marks = mark_solutions(problem, ledger)
    requests = spawn_writers(marks)
    if not requests:
        raise NoSolutionError("early stop needs at least one solution")

    trace = TraceLog()
    store = AnswerStore(mode=AnsMode.SINGLE, capacity=problem.size)
    count = CountRegister()
    for request in requests:
        trace.add(EventKind.REQUEST, request.index)
    order = ccc_arbitrate(requests, policy)
    winner = order[0]
    trace.add(EventKind.GRANT, winner)
    ledger.grants_issued += 1
    ledger.paper_steps += 1
    trace.add(EventKind.WRITE_START, winner)
    write_and_increment(winner, store, count)
    trace.add(EventKind.WRITE_END, winner)
    trace.add(EventKind.RELEASE, winner)
    for index in order[1:]:
        trace.add(EventKind.FAIL, index)
    return EarlyStopResult(index=winner, trace=trace.events, ledger=ledger)
