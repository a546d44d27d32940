"""Concurrency control for competing answer writers.

One shared resource exists: the answer/count register pair, treated as a
single atomic critical section. A grant covers both the write and the
increment. Two arbitration styles are provided: a central controller
(pure grant-ordering for the sequential simulator, plus a lock-based
variant for genuinely parallel stress runs) and a decentralized token
ring. Every run leaves a trace that `verify_trace` checks for mutual
exclusion, starvation, and deadlock freedom.

Trace wire format: one event per line, ``time kind index`` with the time
and index in decimal, e.g. ``12 Grant 5``.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DeadlockTimeoutError,
    ExclusionViolationError,
    ProtocolError,
    TraceError,
)


class EventKind(Enum):
    REQUEST = "Request"
    GRANT = "Grant"
    WRITE_START = "WriteStart"
    WRITE_END = "WriteEnd"
    RELEASE = "Release"
    FAIL = "Fail"


@dataclass(frozen=True)
class TraceEvent:
    kind: EventKind
    process_index: int
    logical_time: int


@dataclass(frozen=True)
class WriteRequest:
    """A spawned writer's intent to store its index in the answer register."""

    index: int
    submit_order: int
    attempt: int = 1


class SelectionPolicy:
    """Rule by which the arbiter orders grants among competing writers."""

    KINDS = ("ascending", "descending", "fifo", "random")

    def __init__(self, kind: str, seed: int | None = None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown policy kind {kind!r}, expected one of {self.KINDS}")
        if kind == "random" and seed is None:
            raise ValueError("random policy needs a seed")
        self.kind = kind
        self.seed = seed

    @classmethod
    def ascending_index(cls) -> "SelectionPolicy":
        return cls("ascending")

    @classmethod
    def descending_index(cls) -> "SelectionPolicy":
        return cls("descending")

    @classmethod
    def fifo(cls) -> "SelectionPolicy":
        return cls("fifo")

    @classmethod
    def random(cls, seed: int) -> "SelectionPolicy":
        return cls("random", seed=seed)

    def with_seed(self, seed: int) -> "SelectionPolicy":
        return SelectionPolicy(self.kind, seed=seed)

    def order(self, requests: Sequence[WriteRequest]) -> list[WriteRequest]:
        """Full grant order over a batch of requests."""
        if self.kind == "ascending":
            return sorted(requests, key=lambda r: r.index)
        if self.kind == "descending":
            return sorted(requests, key=lambda r: -r.index)
        if self.kind == "fifo":
            return sorted(requests, key=lambda r: r.submit_order)
        rng = np.random.default_rng(self.seed)
        ordered = sorted(requests, key=lambda r: r.index)
        return [ordered[i] for i in rng.permutation(len(ordered))]

    def __repr__(self) -> str:
        if self.seed is None:
            return f"SelectionPolicy({self.kind!r})"
        return f"SelectionPolicy({self.kind!r}, seed={self.seed})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SelectionPolicy)
            and self.kind == other.kind
            and self.seed == other.seed
        )


class AnsMode(Enum):
    SINGLE = "single"
    ARRAY = "array"


@dataclass
class AnswerStore:
    """Shared output register(s) for solution values.

    Array mode keeps one cell per possible writer, addressed by the count
    register, so cell i always holds the i-th granted value. Single mode
    keeps only the most recently granted value.
    """

    mode: AnsMode
    capacity: int
    single: int | None = None
    cells: list[int | None] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.mode is AnsMode.ARRAY and not self.cells:
            self.cells = [None] * self.capacity

    def written(self, count: int) -> list[int]:
        """Values stored so far (array mode)."""
        if self.mode is not AnsMode.ARRAY:
            raise ValueError("written() is only meaningful in array mode")
        return [x for x in self.cells[:count] if x is not None]


@dataclass
class CountRegister:
    """Tally of completed writes; increments by one per grant, never decrements."""

    value: int = 0

    def increment(self) -> None:
        self.value += 1


def write_and_increment(
    granted_index: int,
    store: AnswerStore,
    count: CountRegister,
    guard: "CentralController | None" = None,
) -> tuple[AnswerStore, CountRegister]:
    """Store the granted value and bump the count, as one critical section.

    When a `guard` controller is supplied (stress mode), the write is
    rejected unless that controller currently holds the grant for exactly
    this index.
    """
    if guard is not None and guard.current_holder != granted_index:
        raise ExclusionViolationError(
            f"writer {granted_index} touched the registers while the grant "
            f"holder was {guard.current_holder}"
        )
    if store.mode is AnsMode.ARRAY:
        if count.value >= store.capacity:
            raise ProtocolError("answer store is full")
        store.cells[count.value] = granted_index
    else:
        store.single = granted_index
    count.increment()
    return store, count


def ccc_arbitrate(
    requests: Sequence[WriteRequest], policy: SelectionPolicy
) -> list[int]:
    """Central controller's grant sequence: a policy-ordered permutation.

    Exactly one grant is outstanding at a time in the induced schedule;
    the caller executes the critical sections in the returned order.
    """
    indices = [r.index for r in requests]
    if len(set(indices)) != len(indices):
        raise ProtocolError(f"duplicate request indices in {sorted(indices)}")
    return [r.index for r in policy.order(requests)]


def token_ring_arbitrate(
    requests: Sequence[WriteRequest], start_position: int, ring_size: int
) -> list[int]:
    """Decentralized alternative: a token circulates the full ring.

    The token starts at `start_position` and visits every station in
    ascending cyclic order; a requesting station is granted when the
    token reaches it. The sweep always covers all `ring_size` positions
    because stations do not know how many writers exist, so the measured
    cost of this scheme is a full O(ring_size) pass.
    """
    if not 0 <= start_position < ring_size:
        raise ValueError(f"start_position {start_position} not in [0, {ring_size})")
    indices = [r.index for r in requests]
    if len(set(indices)) != len(indices):
        raise ProtocolError(f"duplicate request indices in {sorted(indices)}")
    if any(not 0 <= i < ring_size for i in indices):
        raise ValueError("request index outside the ring")
    return sorted(indices, key=lambda i: (i - start_position) % ring_size)


class TraceLog:
    """Append-only event log with a global logical clock."""

    def __init__(self) -> None:
        self._events: list[TraceEvent] = []
        self._clock = 0

    def add(self, kind: EventKind, process_index: int) -> TraceEvent:
        event = TraceEvent(kind, process_index, self._clock)
        self._clock += 1
        self._events.append(event)
        return event

    @property
    def events(self) -> tuple[TraceEvent, ...]:
        return tuple(self._events)


@dataclass(frozen=True)
class VerificationReport:
    """Checkable answers to the three safety/liveness questions."""

    mutual_exclusion_ok: bool
    starvation_ok: bool
    deadlock_ok: bool
    max_wait_position: int

    @property
    def all_ok(self) -> bool:
        return self.mutual_exclusion_ok and self.starvation_ok and self.deadlock_ok

    def to_dict(self) -> dict:
        return {
            "mutual_exclusion_ok": self.mutual_exclusion_ok,
            "starvation_ok": self.starvation_ok,
            "deadlock_ok": self.deadlock_ok,
            "max_wait_position": self.max_wait_position,
        }


_CYCLE_NEXT = {
    EventKind.REQUEST: (EventKind.GRANT, EventKind.FAIL),
    EventKind.GRANT: (EventKind.WRITE_START, EventKind.FAIL),
    EventKind.WRITE_START: (EventKind.WRITE_END,),
    EventKind.WRITE_END: (EventKind.RELEASE,),
}


def verify_trace(
    trace: Sequence[TraceEvent], expected_indices: Iterable[int], m: int
) -> VerificationReport:
    """Check a complete trace for exclusion, starvation, and deadlock.

    - mutual exclusion: no two WriteStart..WriteEnd intervals overlap;
    - starvation: every expected index is granted at least once, and no
      grant waits behind more than m-1 predecessors;
    - deadlock: every request cycle ends in Release or Fail.

    `max_wait_position` is the largest predecessor count observed: the
    number of other grants issued between a request and its grant.
    Raises TraceError if the per-process event ordering is malformed.
    """
    expected = set(expected_indices)
    last_time = -1
    open_cycle: dict[int, EventKind] = {}
    intervals: list[tuple[int, int]] = []
    open_write: dict[int, int] = {}
    pending_request_time: dict[int, int] = {}
    grant_times: list[int] = []
    grant_positions: list[int] = []
    granted_indices: set[int] = set()
    unresolved = 0

    for event in trace:
        if event.logical_time <= last_time:
            raise TraceError(
                f"logical time went from {last_time} to {event.logical_time}"
            )
        last_time = event.logical_time
        j = event.process_index
        kind = event.kind

        if kind is EventKind.REQUEST:
            if j in open_cycle:
                raise TraceError(f"process {j} re-requested before resolving")
            open_cycle[j] = kind
            pending_request_time[j] = event.logical_time
            continue

        if j not in open_cycle:
            raise TraceError(f"process {j} emitted {kind.value} without a request")
        allowed = _CYCLE_NEXT.get(open_cycle[j], ())
        if kind not in allowed:
            raise TraceError(
                f"process {j} emitted {kind.value} after {open_cycle[j].value}"
            )

        if kind is EventKind.GRANT:
            t_request = pending_request_time[j]
            predecessors = sum(1 for t in grant_times if t_request < t)
            grant_positions.append(predecessors)
            grant_times.append(event.logical_time)
            granted_indices.add(j)
            open_cycle[j] = kind
        elif kind is EventKind.WRITE_START:
            open_write[j] = event.logical_time
            open_cycle[j] = kind
        elif kind is EventKind.WRITE_END:
            intervals.append((open_write.pop(j), event.logical_time))
            open_cycle[j] = kind
        elif kind is EventKind.RELEASE:
            del open_cycle[j]
            del pending_request_time[j]
        elif kind is EventKind.FAIL:
            del open_cycle[j]
            del pending_request_time[j]

    unresolved = len(open_cycle)

    intervals.sort()
    mutual_exclusion_ok = all(
        intervals[i][1] < intervals[i + 1][0] for i in range(len(intervals) - 1)
    )
    max_wait = max(grant_positions, default=0)
    starvation_ok = expected.issubset(granted_indices) and (
        m == 0 or all(p <= m - 1 for p in grant_positions)
    )
    deadlock_ok = unresolved == 0
    return VerificationReport(mutual_exclusion_ok, starvation_ok, deadlock_ok, max_wait)


def format_trace(trace: Sequence[TraceEvent]) -> str:
    """Render events in the line-delimited wire format."""
    return "".join(
        f"{e.logical_time} {e.kind.value} {e.process_index}\n" for e in trace
    )


def parse_trace(text: str) -> list[TraceEvent]:
    """Parse the line-delimited wire format back into events."""
    kinds = {k.value: k for k in EventKind}
    events = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise TraceError(f"line {line_no}: expected 'time kind index', got {line!r}")
        time_str, kind_str, index_str = parts
        if kind_str not in kinds:
            raise TraceError(f"line {line_no}: unknown event kind {kind_str!r}")
        try:
            events.append(TraceEvent(kinds[kind_str], int(index_str), int(time_str)))
        except ValueError as exc:
            raise TraceError(f"line {line_no}: {exc}") from exc
    return events


class CentralController:
    """Lock-based arbiter for stress runs with genuinely parallel writers.

    Requests arrive whenever their threads get scheduled; among the
    writers currently waiting, the policy picks the next holder. Grants
    are strictly one at a time, and every event is clocked at admission
    so the resulting trace is well ordered by construction.
    """

    def __init__(self, policy: SelectionPolicy):
        self._policy = policy
        self._cond = threading.Condition()
        self._waiting: list[WriteRequest] = []
        self._next: WriteRequest | None = None
        self._holder: int | None = None
        self._clock = 0
        self._events: list[TraceEvent] = []
        self._rng = (
            np.random.default_rng(policy.seed) if policy.kind == "random" else None
        )

    @property
    def current_holder(self) -> int | None:
        return self._holder

    @property
    def trace(self) -> tuple[TraceEvent, ...]:
        with self._cond:
            return tuple(self._events)

    def _record(self, kind: EventKind, index: int) -> None:
        self._events.append(TraceEvent(kind, index, self._clock))
        self._clock += 1

    def _pick_next(self) -> None:
        if self._next is not None or self._holder is not None or not self._waiting:
            return
        if self._rng is not None:
            choice = int(self._rng.integers(len(self._waiting)))
            self._next = self._waiting[choice]
        else:
            self._next = self._policy.order(self._waiting)[0]

    def submit(self, request: WriteRequest) -> None:
        with self._cond:
            self._record(EventKind.REQUEST, request.index)
            self._waiting.append(request)
            self._pick_next()
            self._cond.notify_all()

    def acquire(self, request: WriteRequest) -> None:
        with self._cond:
            while self._next is not request:
                self._cond.wait()
            self._waiting.remove(request)
            self._next = None
            self._holder = request.index
            self._record(EventKind.GRANT, request.index)

    def start_write(self, request: WriteRequest) -> None:
        with self._cond:
            self._record(EventKind.WRITE_START, request.index)

    def end_write(self, request: WriteRequest) -> None:
        with self._cond:
            self._record(EventKind.WRITE_END, request.index)

    def release(self, request: WriteRequest) -> None:
        with self._cond:
            self._record(EventKind.RELEASE, request.index)
            self._holder = None
            self._pick_next()
            self._cond.notify_all()

    def fail(self, request: WriteRequest) -> None:
        with self._cond:
            self._record(EventKind.FAIL, request.index)
            self._holder = None
            self._pick_next()
            self._cond.notify_all()


def run_stress_round(
    requests: Sequence[WriteRequest],
    controller: CentralController,
    store: AnswerStore,
    count: CountRegister,
    answers: list[int],
    should_fail,
    timeout: float = 10.0,
) -> list[WriteRequest]:
    """Run one round of writers as real threads; return the failed requests.

    `should_fail(request)` decides the fault outcome for each attempt and
    must not depend on scheduling. Raises DeadlockTimeoutError if the
    round does not finish within `timeout` seconds.
    """
    failed: list[WriteRequest] = []
    failed_lock = threading.Lock()

    def body(request: WriteRequest) -> None:
        controller.submit(request)
        controller.acquire(request)
        if should_fail(request):
            with failed_lock:
                failed.append(request)
            controller.fail(request)
            return
        controller.start_write(request)
        write_and_increment(request.index, store, count, guard=controller)
        answers.append(request.index)
        controller.end_write(request)
        controller.release(request)

    threads = [
        threading.Thread(target=body, args=(r,), daemon=True) for r in requests
    ]
    start = time.monotonic()
    for t in threads:
        t.start()
    for t in threads:
        remaining = timeout - (time.monotonic() - start)
        t.join(max(0.0, remaining))
        if t.is_alive():
            raise DeadlockTimeoutError(
                f"stress round did not terminate within {timeout} seconds"
            )
    return sorted(failed, key=lambda r: r.submit_order)
