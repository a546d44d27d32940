"""Command-line behavior: formats, exit codes, paging, and replay."""

from __future__ import annotations

import io
import json

import pytest

from groverlab.cli import main

COMPARE_GOLDEN = (
    "N,M,grover_iters,paper_steps_full,paper_steps_early,predicate_evals\n"
    "1024,1,25,11,11,1024\n"
    "# note: marking pass priced at 0 paper steps;"
    " predicate_evals counts the exhaustive evaluations actually performed\n"
)


def run_cli(argv, stdin_text=""):
    stdin = io.StringIO(stdin_text)
    stdout = io.StringIO()
    stderr = io.StringIO()
    code = main(argv, stdin, stdout, stderr)
    return code, stdout.getvalue(), stderr.getvalue()


class TestModifiedCommand:
    def test_worked_example_table(self):
        code, out, _ = run_cli(
            [
                "modified",
                "--n", "3",
                "--solutions", "3,5",
                "--policy", "ascending",
                "--ans-mode", "array",
            ]
        )
        assert code == 0
        assert "3 5" in out
        assert "count            2" in out
        assert "paper steps      5" in out

    def test_json_round_trip(self):
        code, out, _ = run_cli(
            ["modified", "--n", "3", "--solutions", "3,5", "--format", "json"]
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["answers"] == [3, 5]
        assert payload["count"] == 2
        assert payload["ledger"]["paper_steps"] == 5
        assert payload["ledger"]["predicate_evals"] == 8
        assert json.loads(json.dumps(payload)) == payload

    def test_seed_replay_byte_identical(self):
        argv = [
            "modified", "--n", "4", "--solutions", "1,9,12",
            "--policy", "random", "--seed", "42", "--format", "json",
        ]
        _, first, _ = run_cli(argv)
        _, second, _ = run_cli(argv)
        assert first == second

    def test_csv_has_footnote_and_lf(self):
        code, out, _ = run_cli(
            ["modified", "--n", "3", "--solutions", "3,5", "--format", "csv"]
        )
        assert code == 0
        assert "\r" not in out
        assert out.splitlines()[-1].startswith("# note: marking pass priced at 0")

    def test_early_stop(self):
        code, out, _ = run_cli(
            ["modified", "--n", "10", "--solutions", "7", "--early-stop"]
        )
        assert code == 0
        assert "index            7" in out
        assert "paper steps      11" in out

    def test_early_stop_with_empty_fixture_is_usage_error(self):
        code, _, _ = run_cli(
            ["modified", "--n", "4", "--solutions", "", "--early-stop"]
        )
        assert code == 2

    def test_fault_prob_domain(self):
        code, _, _ = run_cli(
            ["modified", "--n", "3", "--solutions", "1", "--fault-prob", "1.0"]
        )
        assert code == 2

    def test_rerun_budget_exhaustion_is_runtime_error(self):
        code, _, err = run_cli(
            [
                "modified", "--n", "3", "--solutions", "1,2,3",
                "--fault-prob", "0.99", "--max-reruns", "0", "--seed", "1",
            ]
        )
        assert code == 1
        assert "error:" in err

    def test_random_solutions_replay(self):
        argv = [
            "modified", "--n", "6", "--random-solutions", "5",
            "--seed", "9", "--format", "csv",
        ]
        _, first, _ = run_cli(argv)
        _, second, _ = run_cli(argv)
        assert first == second

    def test_solutions_and_random_solutions_conflict(self):
        code, _, _ = run_cli(
            ["modified", "--n", "3", "--solutions", "1", "--random-solutions", "2"]
        )
        assert code == 2

    def test_stress_flag(self):
        code, out, _ = run_cli(
            [
                "modified", "--n", "5", "--solutions", "3,9,17",
                "--stress", "--format", "json",
            ]
        )
        assert code == 0
        payload = json.loads(out)
        assert sorted(payload["answers"]) == [3, 9, 17]
        assert payload["ledger"]["paper_steps"] == 8

    def test_shuffle_submit_changes_fifo_order(self):
        base = ["modified", "--n", "4", "--solutions", "2,7,11,13",
                "--policy", "fifo", "--format", "json"]
        _, plain, _ = run_cli(base)
        _, shuffled, _ = run_cli(base + ["--shuffle-submit", "3"])
        a = json.loads(plain)["answers"]
        b = json.loads(shuffled)["answers"]
        assert sorted(a) == sorted(b)
        assert a != b


class TestPagedDisplay:
    def test_blocks_per_grant(self):
        code, out, err = run_cli(
            [
                "modified", "--n", "3", "--solutions", "3,5",
                "--ans-mode", "single", "--paged",
            ],
            stdin_text="\n\n",
        )
        assert code == 0
        assert out.count("ANS = ") == 2
        assert "warning" not in err

    def test_closed_input_finishes_unpaged(self):
        code, out, err = run_cli(
            [
                "modified", "--n", "3", "--solutions", "3,5,7",
                "--ans-mode", "single", "--paged",
            ],
            stdin_text="",
        )
        assert code == 0
        assert out.count("ANS = ") == 3
        assert "finishing unpaged" in err

    def test_array_mode_ignores_flag(self):
        code, out, err = run_cli(
            ["modified", "--n", "3", "--solutions", "3,5", "--paged"]
        )
        assert code == 0
        assert "ANS = " not in out
        assert "ignoring" in err

    def test_zero_answers_no_pause(self):
        code, out, _ = run_cli(
            ["modified", "--n", "3", "--solutions", "", "--ans-mode", "single",
             "--paged"],
            stdin_text="",
        )
        assert code == 0
        assert "ANS = " not in out

    def test_paging_never_changes_the_result(self):
        base = ["modified", "--n", "4", "--solutions", "1,6,11",
                "--ans-mode", "single"]
        _, unpaged, _ = run_cli(base)
        _, paged, _ = run_cli(base + ["--paged"], stdin_text="\n\n\n")
        stripped = "".join(
            line + "\n" for line in paged.splitlines() if not line.startswith("ANS = ")
        )
        assert stripped == unpaged


class TestGroverCommand:
    def test_worked_example(self):
        code, out, _ = run_cli(
            ["grover", "--n", "2", "--solutions", "2",
             "--iterations", "auto", "--seed", "1"]
        )
        assert code == 0
        assert "sampled index        2" in out
        assert "success probability  1.0" in out

    def test_json_fields(self):
        code, out, _ = run_cli(
            ["grover", "--n", "3", "--solutions", "5", "--format", "json",
             "--seed", "8"]
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["seed"] == 8
        assert payload["iterations_used"] == 2
        assert payload["ledger"]["amplitude_ops"] == 2 * 8 * 3

    def test_explicit_iterations(self):
        code, out, _ = run_cli(
            ["grover", "--n", "2", "--solutions", "1", "--iterations", "0",
             "--format", "json"]
        )
        assert code == 0
        assert json.loads(out)["success_probability"] == 0.25

    def test_bad_iterations_flag(self):
        code, _, _ = run_cli(
            ["grover", "--n", "2", "--solutions", "1", "--iterations", "soon"]
        )
        assert code == 2

    def test_auto_with_zero_random_solutions_is_usage_error(self):
        code, _, _ = run_cli(["grover", "--n", "2", "--random-solutions", "0"])
        assert code == 2


class TestCompareAndSweep:
    def test_compare_golden_bytes(self):
        code, out, _ = run_cli(["compare", "--n", "10", "--m", "1"])
        assert code == 0
        assert out == COMPARE_GOLDEN

    def test_compare_json_note(self):
        code, out, _ = run_cli(["compare", "--n", "10", "--m", "4", "--format", "json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["rows"][0]["grover_iters"] == 12
        assert "note" in payload

    def test_sweep_grid(self):
        code, out, _ = run_cli(["sweep", "--n-min", "3", "--n-max", "5", "--m", "0,1"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("N,M,")
        assert "8,0,na,3,3,8" in lines
        assert "32,1,4,6,6,32" in lines
        assert lines[-1].startswith("# note:")

    def test_sweep_skips_oversized_m(self):
        code, out, _ = run_cli(["sweep", "--n-min", "1", "--n-max", "2", "--m", "8"])
        assert code == 0
        assert out.splitlines()[1].startswith("#")

    def test_replay_byte_identical(self):
        argv = ["sweep", "--n-min", "3", "--n-max", "8"]
        _, first, _ = run_cli(argv)
        _, second, _ = run_cli(argv)
        assert first == second


class TestVerifyCommand:
    def test_round_trip_from_trace_out(self, tmp_path):
        trace_file = tmp_path / "run.trace"
        code, _, _ = run_cli(
            ["modified", "--n", "3", "--solutions", "3,5",
             "--trace-out", str(trace_file)]
        )
        assert code == 0
        code, out, err = run_cli(
            ["verify", str(trace_file), "--expected", "3,5", "--m", "2"]
        )
        assert code == 0
        assert "mutual exclusion ok  true" in out
        assert err == ""

    def test_violation_exits_one(self, tmp_path):
        trace_file = tmp_path / "bad.trace"
        trace_file.write_text(
            "0 Request 1\n1 Request 2\n2 Grant 1\n3 WriteStart 1\n"
            "4 Grant 2\n5 WriteStart 2\n6 WriteEnd 1\n7 Release 1\n"
            "8 WriteEnd 2\n9 Release 2\n"
        )
        code, out, err = run_cli(
            ["verify", str(trace_file), "--expected", "1,2", "--m", "2"]
        )
        assert code == 1
        assert "mutual exclusion ok  false" in out
        assert "mutual-exclusion" in err

    def test_missing_file_is_runtime_error(self):
        code, _, err = run_cli(["verify", "/nonexistent/trace.txt"])
        assert code == 1
        assert "error:" in err

    def test_malformed_trace_is_runtime_error(self, tmp_path):
        trace_file = tmp_path / "junk.trace"
        trace_file.write_text("0 Grant 1\n")
        code, _, err = run_cli(["verify", str(trace_file)])
        assert code == 1
        assert "error:" in err


class TestSeedSources:
    def test_env_var_default(self, monkeypatch):
        monkeypatch.setenv("GROVERLAB_SEED", "42")
        _, from_env, _ = run_cli(
            ["modified", "--n", "5", "--random-solutions", "3", "--format", "json"]
        )
        monkeypatch.delenv("GROVERLAB_SEED")
        _, explicit, _ = run_cli(
            ["modified", "--n", "5", "--random-solutions", "3", "--seed", "42",
             "--format", "json"]
        )
        assert from_env == explicit
        assert json.loads(from_env)["seed"] == 42

    def test_flag_overrides_env(self, monkeypatch):
        monkeypatch.setenv("GROVERLAB_SEED", "42")
        _, out, _ = run_cli(
            ["modified", "--n", "3", "--solutions", "1", "--seed", "7",
             "--format", "json"]
        )
        assert json.loads(out)["seed"] == 7


def test_unknown_command_is_usage_error(capsys):
    code, _, _ = run_cli(["explode"])
    assert code == 2
    capsys.readouterr()
