"""Exception types shared across the package."""


class NoSolutionError(ValueError):
    """Raised when an operation needs at least one solution but M = 0."""


class ProtocolError(ValueError):
    """Raised when an arbitration request batch violates its preconditions."""


class TraceError(ValueError):
    """Raised when a trace breaks the per-process event ordering rules."""


class ExclusionViolationError(RuntimeError):
    """Raised when a writer touches the shared registers without the grant."""


class RerunLimitError(RuntimeError):
    """Raised when faulted writers remain after the rerun budget is spent."""


class DeadlockTimeoutError(RuntimeError):
    """Raised when stress-mode workers fail to terminate within the deadline."""
