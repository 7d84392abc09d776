"""CLI behaviour: exit codes, JSON determinism, the golden flatten dump,
scripted simulation."""

from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from ttmc import models

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "ttmc.cli", *args],
        capture_output=True, text=True, env=env,
    )


class TestExitCodes:
    def test_holds_exits_zero(self):
        r = run_cli("check", models.path("train_abstract"), "--prop", "safety")
        assert r.returncode == 0, r.stderr
        assert "safety: holds" in r.stdout

    def test_violation_exits_one(self):
        r = run_cli("check", models.path("train_abstract_demonic"),
                    "--prop", "liveness")
        assert r.returncode == 1
        assert "liveness: FAILS" in r.stdout
        assert "cycle" in r.stdout

    def test_model_error_exits_two(self):
        r = run_cli("check", models.path("errors/cyclic_depends"), "--all")
        assert r.returncode == 2
        assert "CyclicModuleDependency" in r.stderr

    def test_missing_file_exits_two(self):
        r = run_cli("parse", "/nonexistent/model.ttm")
        assert r.returncode == 2

    def test_limit_exits_three(self):
        r = run_cli("explore", models.path("train_abstract"), "--limit", "10")
        assert r.returncode == 3
        assert "limit" in r.stderr.lower()

    def test_limit_env_override(self):
        r = run_cli("explore", models.path("train_abstract"),
                    env_extra={"TTMC_LIMIT_STATES": "10"})
        assert r.returncode == 3

    def test_diagnostics_never_raw_tracebacks(self):
        r = run_cli("check", models.path("errors/double_write"), "--all")
        assert r.returncode == 2
        assert "Traceback" not in r.stderr
        assert "DoubleAssignment" in r.stderr


class TestJsonDeterminism:
    def test_explore_stats_byte_identical(self):
        a = run_cli("explore", models.path("train_refined"), "--format", "json")
        b = run_cli("explore", models.path("train_refined"), "--format", "json")
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout
        payload = json.loads(a.stdout)
        assert set(payload) == {"states", "transitions"}

    def test_check_json_byte_identical(self):
        a = run_cli("check", models.path("philosophers"), "--all",
                    "--format", "json")
        b = run_cli("check", models.path("philosophers"), "--all",
                    "--format", "json")
        assert a.stdout == b.stdout
        payload = json.loads(a.stdout)
        assert [p["property"] for p in payload] == ["mutex", "progress"]
        assert [p["holds"] for p in payload] == [True, False]

    def test_flatten_dump_golden(self):
        r = run_cli("flatten", models.path("nop_sync"), "--dump")
        assert r.returncode == 0
        golden_path = os.path.join(GOLDEN, "nop_sync.flat.json")
        with open(golden_path) as fh:
            assert r.stdout == fh.read()


class TestConfigFile:
    def test_config_limit(self, tmp_path):
        cfg = tmp_path / "ttmc.toml"
        cfg.write_text("[check]\nlimit_states = 10\n")
        r = run_cli("--config", str(cfg), "explore",
                    models.path("train_abstract"))
        assert r.returncode == 3


class TestSimulateScript:
    def test_scripted_run_deterministic(self, tmp_path):
        script = tmp_path / "script.txt"
        script.write_text(
            "list\n"
            "fire arrive(T1)#\n"
            "fire arrive(T1)\n"
            "fire tick\n"
            "state\n"
            "undo 1\n"
            "state\n"
        )
        a = run_cli("simulate", models.path("train_abstract"),
                    "--script", str(script))
        b = run_cli("simulate", models.path("train_abstract"),
                    "--script", str(script))
        assert a.returncode == 0
        assert a.stdout == b.stdout
        assert "loc = ['Entr', 'Out']" in a.stdout

    def test_script_export_then_load(self, tmp_path):
        script1 = tmp_path / "one.txt"
        trace = tmp_path / "trace.jsonl"
        script1.write_text(
            "fire arrive(T2)#\nfire arrive(T2)\n"
            f"export {trace}\n"
        )
        r = run_cli("simulate", models.path("train_abstract"),
                    "--script", str(script1))
        assert r.returncode == 0 and trace.exists()
        script2 = tmp_path / "two.txt"
        script2.write_text(f"load {trace}\nstate\n")
        r2 = run_cli("simulate", models.path("train_abstract"),
                     "--script", str(script2))
        assert "loc = ['Out', 'Entr']" in r2.stdout


class TestTraceJsonExport:
    def test_failing_check_writes_lasso_trace(self, tmp_path):
        out = tmp_path / "lasso.jsonl"
        r = run_cli("check", models.path("train_abstract_demonic"),
                    "--prop", "liveness", "--trace-json", str(out))
        assert r.returncode == 1
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        assert lines[0]["kind"] == "header"
        assert any(l["kind"] == "cycle" for l in lines)


class TestExamples:
    def test_list_and_path(self):
        r = run_cli("examples")
        assert "train_abstract" in r.stdout and "nop_sync" in r.stdout
        r2 = run_cli("examples", "--path", "nop_refined")
        assert r2.returncode == 0
        assert r2.stdout.strip().endswith("nop_refined.ttm")

    def test_copy(self, tmp_path):
        r = run_cli("examples", "--copy", str(tmp_path / "out"))
        assert r.returncode == 0
        assert (tmp_path / "out" / "philosophers.ttm").exists()


class TestSidecarProperties:
    def test_props_file(self, tmp_path):
        props = tmp_path / "extra.ltl"
        props.write_text(
            "-- sidecar properties, one per line\n"
            "exit_unique : [](!(loc[T1] == Exit && loc[T2] == Exit))\n"
            "eventually_served : [](loc[t] == P1 => <>(loc[t] == Out))\n"
        )
        r = run_cli("check", models.path("train_abstract"),
                    "--props", str(props), "--all")
        assert r.returncode == 0, r.stderr + r.stdout
        assert "exit_unique: holds" in r.stdout
        assert "eventually_served: holds" in r.stdout
