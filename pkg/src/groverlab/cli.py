"""Command-line front end.

Five subcommands: `grover` runs the amplitude-amplification search,
`modified` runs the marked-register search (with optional early stop,
faults, paging, and stress threading), `compare` and `sweep` emit cost
comparison rows, and `verify` checks a trace file. Output formats are
table (human), csv, and json; comparison CSV columns are stable, the
table format is not. The default seed comes from GROVERLAB_SEED when
set, else 0, and is echoed in machine-readable output so any run can
be replayed byte for byte.

Exit codes: 0 success, 1 runtime failure or verification violation,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .arbiter import (
    AnsMode,
    AnswerStore,
    CountRegister,
    SelectionPolicy,
    format_trace,
    parse_trace,
    verify_trace,
)
from .errors import (
    DeadlockTimeoutError,
    ExclusionViolationError,
    NoSolutionError,
    ProtocolError,
    RerunLimitError,
    TraceError,
)
from .grover import AUTO, run_grover
from .ledger import (
    CSV_HEADER,
    MARKING_FOOTNOTE,
    ComparisonRow,
    compare_models,
)
from .marked_search import (
    NO_FAULTS,
    FaultConfig,
    early_stop_search,
    run_marked_search,
)
from .statevector import MAX_QUBITS, SearchProblem

SEED_ENV_VAR = "GROVERLAB_SEED"

_RUNTIME_ERRORS = (
    NoSolutionError,
    ProtocolError,
    TraceError,
    ExclusionViolationError,
    RerunLimitError,
    DeadlockTimeoutError,
    OSError,
)


@dataclass(frozen=True)
class RunConfig:
    """Parsed and validated flags for one invocation."""

    command: str
    n: int = 0
    solutions: tuple[int, ...] = ()
    policy: SelectionPolicy = SelectionPolicy.ascending_index()
    ans_mode: AnsMode = AnsMode.ARRAY
    faults: FaultConfig = NO_FAULTS
    early_stop: bool = False
    paged: bool = False
    stress: bool = False
    seed: int = 0
    output_format: str = "table"
    iterations: int | str = AUTO
    shuffle_submit: int | None = None
    trace_out: str | None = None
    m: int = 0
    n_min: int = 0
    n_max: int = 0
    m_list: tuple[int, ...] = ()
    trace_path: str = ""
    expected: tuple[int, ...] = ()


class Pager:
    """Blocks after each granted write until the input stream yields a line.

    A closed input stream downgrades the rest of the run to unpaged with
    a single warning; the values keep printing either way.
    """

    def __init__(self, stdin: IO[str], stdout: IO[str], stderr: IO[str]):
        self._in = stdin
        self._out = stdout
        self._err = stderr
        self._blocking = True

    def __call__(self, index: int, store: AnswerStore, count: CountRegister) -> None:
        self._out.write(f"ANS = {store.single}\n")
        self._out.flush()
        if not self._blocking:
            return
        if self._in.readline() == "":
            self._blocking = False
            self._err.write("warning: input closed, finishing unpaged\n")


def _render_kv(pairs: Sequence[tuple[str, str]]) -> str:
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in pairs)


def _json_dump(obj: object, out: IO[str]) -> None:
    out.write(json.dumps(obj, indent=2))
    out.write("\n")


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{flag} expects comma-separated integers")


def _resolve_solutions(
    parser: argparse.ArgumentParser, args: argparse.Namespace, seed: int
) -> tuple[int, ...]:
    size = 2**args.n
    if args.solutions is not None and args.random_solutions is not None:
        parser.error("--solutions and --random-solutions are mutually exclusive")
    if args.random_solutions is not None:
        k = args.random_solutions
        if not 0 <= k <= size:
            parser.error(f"--random-solutions {k} outside [0, {size}]")
        rng = np.random.default_rng(seed)
        return tuple(sorted(int(x) for x in rng.choice(size, size=k, replace=False)))
    if args.solutions is None:
        parser.error("one of --solutions or --random-solutions is required")
    values = _parse_int_list(args.solutions, "--solutions")
    if any(not 0 <= v < size for v in values):
        parser.error(f"--solutions values must lie in [0, {size})")
    if len(set(values)) != len(values):
        parser.error("--solutions values must be distinct")
    return tuple(sorted(values))


def _resolve_policy(name: str, seed: int) -> SelectionPolicy:
    if name == "random":
        return SelectionPolicy.random(seed)
    return SelectionPolicy(name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groverlab",
        description="search simulators with dual cost accounting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="64-bit run seed")
        p.add_argument(
            "--format",
            choices=("table", "csv", "json"),
            default=None,
            dest="output_format",
        )

    def add_problem(p: argparse.ArgumentParser) -> None:
        p.add_argument("--n", type=int, required=True, help="qubit count")
        p.add_argument("--solutions", help="comma-separated solution indices")
        p.add_argument(
            "--random-solutions",
            type=int,
            default=None,
            metavar="K",
            help="draw K distinct solutions using the run seed",
        )

    g = sub.add_parser("grover", help="amplitude-amplification search")
    add_problem(g)
    g.add_argument("--iterations", default="auto", help="iteration count or 'auto'")
    add_common(g)

    m = sub.add_parser("modified", help="marked-register search")
    add_problem(m)
    m.add_argument(
        "--policy",
        choices=SelectionPolicy.KINDS,
        default="ascending",
    )
    m.add_argument("--ans-mode", choices=("single", "array"), default="array")
    m.add_argument("--fault-prob", type=float, default=0.0)
    m.add_argument("--max-reruns", type=int, default=0)
    m.add_argument("--full-restart", action="store_true")
    m.add_argument("--early-stop", action="store_true")
    m.add_argument("--paged", action="store_true")
    m.add_argument("--stress", action="store_true", help="run writers as threads")
    m.add_argument(
        "--shuffle-submit",
        type=int,
        default=None,
        metavar="SEED",
        help="permute writer submission order",
    )
    m.add_argument("--trace-out", help="write the event trace to this file")
    add_common(m)

    c = sub.add_parser("compare", help="one cost-comparison row")
    c.add_argument("--n", type=int, required=True, help="qubit count")
    c.add_argument("--m", type=int, required=True, help="solution count")
    add_common(c)

    s = sub.add_parser("sweep", help="cost-comparison grid")
    s.add_argument("--n-min", type=int, default=3)
    s.add_argument("--n-max", type=int, default=16)
    s.add_argument("--m", default="0,1,2,4,8", help="comma-separated solution counts")
    add_common(s)

    v = sub.add_parser("verify", help="check a trace file")
    v.add_argument("trace", help="trace file, one 'time kind index' line per event")
    v.add_argument("--expected", default="", help="indices that must be granted")
    v.add_argument("--m", type=int, default=None, help="writer count bound")
    add_common(v)

    return parser


def _config_from_args(
    parser: argparse.ArgumentParser, args: argparse.Namespace
) -> RunConfig:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get(SEED_ENV_VAR, "0"))

    command = args.command
    default_format = "csv" if command in ("compare", "sweep") else "table"
    output_format = args.output_format or default_format

    if command in ("grover", "modified"):
        if not 1 <= args.n <= MAX_QUBITS:
            parser.error(f"--n must lie in [1, {MAX_QUBITS}]")
        solutions = _resolve_solutions(parser, args, seed)

    if command == "grover":
        iterations: int | str = AUTO
        if args.iterations != "auto":
            try:
                iterations = int(args.iterations)
            except ValueError:
                parser.error("--iterations expects an integer or 'auto'")
            if iterations < 0:
                parser.error("--iterations must be non-negative")
        if not solutions and iterations == AUTO:
            parser.error("an empty solution set has no automatic iteration count")
        return RunConfig(
            command=command,
            n=args.n,
            solutions=solutions,
            iterations=iterations,
            seed=seed,
            output_format=output_format,
        )

    if command == "modified":
        if not 0.0 <= args.fault_prob < 1.0:
            parser.error("--fault-prob must lie in [0, 1)")
        if args.max_reruns < 0:
            parser.error("--max-reruns must be non-negative")
        if args.early_stop and not solutions:
            parser.error("--early-stop needs a non-empty solution set")
        return RunConfig(
            command=command,
            n=args.n,
            solutions=solutions,
            policy=_resolve_policy(args.policy, seed),
            ans_mode=AnsMode(args.ans_mode),
            faults=FaultConfig(
                probability=args.fault_prob,
                max_reruns=args.max_reruns,
                full_restart=args.full_restart,
            ),
            early_stop=args.early_stop,
            paged=args.paged,
            stress=args.stress,
            shuffle_submit=args.shuffle_submit,
            trace_out=args.trace_out,
            seed=seed,
            output_format=output_format,
        )

    if command == "compare":
        if args.n < 1:
            parser.error("--n must be at least 1")
        if not 0 <= args.m <= 2**args.n:
            parser.error(f"--m must lie in [0, {2**args.n}]")
        return RunConfig(
            command=command,
            n=args.n,
            m=args.m,
            seed=seed,
            output_format=output_format,
        )

    if command == "sweep":
        m_list = tuple(_parse_int_list(args.m, "--m"))
        if args.n_min < 1 or args.n_max < args.n_min:
            parser.error("need 1 <= --n-min <= --n-max")
        if any(m < 0 for m in m_list):
            parser.error("--m values must be non-negative")
        return RunConfig(
            command=command,
            n_min=args.n_min,
            n_max=args.n_max,
            m_list=m_list,
            seed=seed,
            output_format=output_format,
        )

    expected = tuple(_parse_int_list(args.expected, "--expected"))
    m = args.m if args.m is not None else len(expected)
    return RunConfig(
        command=command,
        trace_path=args.trace,
        expected=expected,
        m=m,
        seed=seed,
        output_format=output_format,
    )


def _emit_grover(config: RunConfig, out: IO[str]) -> int:
    problem = SearchProblem.from_solutions(config.n, config.solutions)
    result = run_grover(
        problem, config.iterations, np.random.default_rng(config.seed)
    )
    if config.output_format == "json":
        _json_dump({"seed": config.seed, **result.to_dict()}, out)
        return 0
    lg = result.ledger
    if config.output_format == "csv":
        out.write(
            "sampled_index,is_solution,success_probability,"
            "iterations_used,amplitude_ops,predicate_evals,seed\n"
        )
        out.write(
            f"{result.sampled_index},{str(result.is_solution).lower()},"
            f"{result.success_probability!r},{result.iterations_used},"
            f"{lg.amplitude_ops},{lg.predicate_evals},{config.seed}\n"
        )
        return 0
    out.write(
        _render_kv(
            [
                ("sampled index", str(result.sampled_index)),
                ("is solution", str(result.is_solution).lower()),
                ("success probability", repr(result.success_probability)),
                ("iterations used", str(result.iterations_used)),
                ("amplitude ops", str(lg.amplitude_ops)),
                ("predicate evals", str(lg.predicate_evals)),
                ("seed", str(config.seed)),
            ]
        )
    )
    return 0


def _emit_modified(
    config: RunConfig, stdin: IO[str], out: IO[str], err: IO[str]
) -> int:
    problem = SearchProblem.from_solutions(config.n, config.solutions)

    if config.early_stop:
        result = early_stop_search(problem, config.policy, config.seed)
        if config.trace_out:
            with open(config.trace_out, "w", newline="\n") as fh:
                fh.write(format_trace(result.trace))
        if config.output_format == "json":
            _json_dump({"seed": config.seed, **result.to_dict()}, out)
        elif config.output_format == "csv":
            out.write("index,paper_steps,predicate_evals,seed\n")
            lg = result.ledger
            out.write(
                f"{result.index},{lg.paper_steps},{lg.predicate_evals},{config.seed}\n"
            )
            out.write(MARKING_FOOTNOTE + "\n")
        else:
            lg = result.ledger
            out.write(
                _render_kv(
                    [
                        ("index", str(result.index)),
                        ("paper steps", str(lg.paper_steps)),
                        ("predicate evals", str(lg.predicate_evals)),
                        ("seed", str(config.seed)),
                    ]
                )
            )
            out.write(MARKING_FOOTNOTE + "\n")
        return 0

    on_write = None
    if config.paged:
        if config.ans_mode is not AnsMode.SINGLE:
            err.write("warning: --paged needs --ans-mode single, ignoring\n")
        elif config.stress:
            err.write("warning: --paged is unavailable with --stress, ignoring\n")
        else:
            on_write = Pager(stdin, out, err)

    result = run_marked_search(
        problem,
        config.policy,
        config.ans_mode,
        config.faults,
        config.seed,
        stress=config.stress,
        shuffle_submit_seed=config.shuffle_submit,
        on_write=on_write,
    )
    if config.trace_out:
        with open(config.trace_out, "w", newline="\n") as fh:
            fh.write(format_trace(result.trace))

    lg = result.ledger
    if config.output_format == "json":
        _json_dump({"seed": config.seed, **result.to_dict()}, out)
        return 0
    if config.output_format == "csv":
        out.write("answers,count,attempts,paper_steps,predicate_evals,seed\n")
        answers = " ".join(str(a) for a in result.answers)
        out.write(
            f"{answers},{result.count},{result.attempts},"
            f"{lg.paper_steps},{lg.predicate_evals},{config.seed}\n"
        )
        out.write(MARKING_FOOTNOTE + "\n")
        return 0
    out.write(
        _render_kv(
            [
                ("answers", " ".join(str(a) for a in result.answers)),
                ("count", str(result.count)),
                ("attempts", str(result.attempts)),
                ("paper steps", str(lg.paper_steps)),
                ("predicate evals", str(lg.predicate_evals)),
                ("seed", str(config.seed)),
            ]
        )
    )
    out.write(MARKING_FOOTNOTE + "\n")
    return 0


def _emit_rows(rows: Sequence[ComparisonRow], config: RunConfig, out: IO[str]) -> int:
    if config.output_format == "json":
        _json_dump(
            {
                "rows": [row.to_dict() for row in rows],
                "note": MARKING_FOOTNOTE.lstrip("# "),
            },
            out,
        )
        return 0
    if config.output_format == "table":
        header = CSV_HEADER.split(",")
        table = [header] + [row.csv_line().split(",") for row in rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(header))]
        for r in table:
            out.write("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) + "\n")
        out.write(MARKING_FOOTNOTE + "\n")
        return 0
    out.write(CSV_HEADER + "\n")
    for row in rows:
        out.write(row.csv_line() + "\n")
    out.write(MARKING_FOOTNOTE + "\n")
    return 0


def _emit_verify(config: RunConfig, out: IO[str], err: IO[str]) -> int:
    with open(config.trace_path, "r") as fh:
        events = parse_trace(fh.read())
    report = verify_trace(events, config.expected, config.m)
    if config.output_format == "json":
        _json_dump(report.to_dict(), out)
    elif config.output_format == "csv":
        out.write("mutual_exclusion_ok,starvation_ok,deadlock_ok,max_wait_position\n")
        out.write(
            f"{str(report.mutual_exclusion_ok).lower()},"
            f"{str(report.starvation_ok).lower()},"
            f"{str(report.deadlock_ok).lower()},{report.max_wait_position}\n"
        )
    else:
        out.write(
            _render_kv(
                [
                    ("mutual exclusion ok", str(report.mutual_exclusion_ok).lower()),
                    ("starvation ok", str(report.starvation_ok).lower()),
                    ("deadlock ok", str(report.deadlock_ok).lower()),
                    ("max wait position", str(report.max_wait_position)),
                ]
            )
        )
    if not report.all_ok:
        failed = [
            name
            for name, ok in (
                ("mutual-exclusion", report.mutual_exclusion_ok),
                ("starvation", report.starvation_ok),
                ("deadlock", report.deadlock_ok),
            )
            if not ok
        ]
        err.write(f"verification failed: {', '.join(failed)}\n")
        return 1
    return 0


def run_command(
    config: RunConfig,
    stdin: IO[str],
    stdout: IO[str],
    stderr: IO[str],
) -> int:
    """Execute one parsed invocation; returns the exit status."""
    if config.command == "grover":
        return _emit_grover(config, stdout)
    if config.command == "modified":
        return _emit_modified(config, stdin, stdout, stderr)
    if config.command == "compare":
        return _emit_rows([compare_models(2**config.n, config.m)], config, stdout)
    if config.command == "sweep":
        rows = [
            compare_models(2**n, m)
            for n in range(config.n_min, config.n_max + 1)
            for m in config.m_list
            if m <= 2**n
        ]
        return _emit_rows(rows, config, stdout)
    return _emit_verify(config, stdout, stderr)


def main(
    argv: Sequence[str] | None = None,
    stdin: IO[str] | None = None,
    stdout: IO[str] | None = None,
    stderr: IO[str] | None = None,
) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run_command(config, stdin, stdout, stderr)
    except _RUNTIME_ERRORS as exc:
        stderr.write(f"error: {exc}\n")
        return 1


def console_main() -> None:
    sys.exit(main())
