"""Search simulators with dual cost accounting.

A dense state-vector engine for amplitude-amplification search, a
marked-register search whose writers compete under an explicit
concurrency-control protocol, trace verification for the protocol's
safety and liveness claims, and a ledger that prices every run in
on-paper units next to the operations actually performed.
"""

from .arbiter import (
    AnsMode,
    AnswerStore,
    CentralController,
    CountRegister,
    EventKind,
    SelectionPolicy,
    TraceEvent,
    TraceLog,
    VerificationReport,
    WriteRequest,
    ccc_arbitrate,
    format_trace,
    parse_trace,
    token_ring_arbitrate,
    verify_trace,
    write_and_increment,
)
from .errors import (
    DeadlockTimeoutError,
    ExclusionViolationError,
    NoSolutionError,
    ProtocolError,
    RerunLimitError,
    TraceError,
)
from .grover import AUTO, GroverResult, optimal_iterations, run_grover
from .ledger import (
    AMPLITUDE_PASSES_PER_STAGE,
    ComparisonRow,
    StepLedger,
    actual_cost,
    compare_models,
    paper_step_count,
    render_comparison_csv,
)
from .marked_search import (
    NO_FAULTS,
    EarlyStopResult,
    FaultConfig,
    MarkRegister,
    MarkedSearchResult,
    early_stop_search,
    mark_solutions,
    run_marked_search,
    spawn_writers,
)
from .statevector import (
    MAX_QUBITS,
    QState,
    SearchProblem,
    apply_diffusion,
    apply_oracle_phase,
    grover_iteration,
    measure,
    success_probability,
    uniform_superposition,
)

__version__ = "0.1.0"

__all__ = [
    "AMPLITUDE_PASSES_PER_STAGE",
    "AUTO",
    "AnsMode",
    "AnswerStore",
    "CentralController",
    "ComparisonRow",
    "CountRegister",
    "DeadlockTimeoutError",
    "EarlyStopResult",
    "EventKind",
    "ExclusionViolationError",
    "FaultConfig",
    "GroverResult",
    "MAX_QUBITS",
    "MarkRegister",
    "MarkedSearchResult",
    "NO_FAULTS",
    "NoSolutionError",
    "ProtocolError",
    "QState",
    "RerunLimitError",
    "SearchProblem",
    "SelectionPolicy",
    "StepLedger",
    "TraceError",
    "TraceEvent",
    "TraceLog",
    "VerificationReport",
    "WriteRequest",
    "actual_cost",
    "apply_diffusion",
    "apply_oracle_phase",
    "ccc_arbitrate",
    "compare_models",
    "early_stop_search",
    "format_trace",
    "grover_iteration",
    "mark_solutions",
    "measure",
    "optimal_iterations",
    "paper_step_count",
    "parse_trace",
    "render_comparison_csv",
    "run_grover",
    "run_marked_search",
    "spawn_writers",
    "success_probability",
    "token_ring_arbitrate",
    "uniform_superposition",
    "verify_trace",
    "write_and_increment",
]
