"""Command-line runner: validation, outputs, determinism, exit codes.

Fast paths run in-process against the config dataclass; the end-to-end
contract (flags, env overrides, exit codes, report files) goes through
subprocesses on the shipped demo config.
"""

import copy
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from kfplab import cli
from kfplab.cli import ExperimentConfig, parse_seeds, validate

REPO = Path(__file__).resolve().parents[1]
EXAMPLE = REPO / "docs" / "example_config.json"


def example_dict():
    return json.loads(EXAMPLE.read_text())


def run_cli(args, env_extra=None, cwd=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "kfplab.cli", *args],
                          capture_output=True, text=True, env=env,
                          cwd=cwd or REPO)


# ---------------------------------------------------------------------------
# seed parsing


def test_parse_seeds_range():
    assert parse_seeds("3..6") == [3, 4, 5, 6]


def test_parse_seeds_list():
    assert parse_seeds("1, 5,9") == [1, 5, 9]


def test_parse_seeds_single():
    assert parse_seeds("7") == [7]


def test_parse_seeds_empty_range_rejected():
    with pytest.raises(ValueError):
        parse_seeds("7..3")


# ---------------------------------------------------------------------------
# validation


def test_example_config_validates_clean():
    config = ExperimentConfig.from_dict(example_dict())
    assert validate(config) == []


def test_empty_config_reports_every_required_field():
    config = ExperimentConfig.from_dict({"kind": "ensemble"})
    violations = validate(config)
    fields = {v["field"] for v in violations}
    required = {"grid.nt", "grid.nx", "grid.nv",
                "box.t0", "box.t1", "box.x0", "box.x1", "box.v0", "box.v1",
                "coefficients.lam", "coefficients.Lam",
                "coefficients.seeds", "checks"}
    assert required <= fields
    assert all(v["reason"] for v in violations)


def test_missing_kind_flagged():
    violations = validate(ExperimentConfig.from_dict({}))
    assert any(v["field"] == "kind" for v in violations)


def test_unknown_kind_flagged():
    violations = validate(ExperimentConfig.from_dict({"kind": "frobnicate"}))
    assert any(v["field"] == "kind" and "unknown" in v["reason"]
               for v in violations)


def test_cylinder_exceeding_box_names_the_cylinder():
    data = example_dict()
    data["checks"] = [{"name": "weak_poincare", "eps": 0.25}]
    violations = validate(ExperimentConfig.from_dict(data))
    assert violations
    assert all(v["field"] == "checks[0]" for v in violations)
    assert any("cylinder" in v["reason"] and "exceeds" in v["reason"]
               for v in violations)


def test_unknown_check_name_flagged():
    data = example_dict()
    data["checks"] = [{"name": "not_a_check"}]
    violations = validate(ExperimentConfig.from_dict(data))
    assert any(v["field"] == "checks[0].name" for v in violations)


def test_empty_seed_list_rejected_for_ensemble():
    data = example_dict()
    data["coefficients"]["seeds"] = []
    violations = validate(ExperimentConfig.from_dict(data))
    assert any(v["field"] == "coefficients.seeds" for v in violations)


def test_cfl_precheck_flags_coarse_time_grid():
    data = example_dict()
    data["grid"]["nt"] = 2
    violations = validate(ExperimentConfig.from_dict(data))
    assert any("CFL" in v["reason"] for v in violations)


def test_unknown_top_level_key_flagged():
    data = example_dict()
    data["grdi"] = {}
    violations = validate(ExperimentConfig.from_dict(data))
    assert any(v["field"] == "grdi" for v in violations)


def test_check_parameter_range_enforced():
    data = example_dict()
    data["checks"] = [{"name": "sobolev_gain", "sigma": 0.5}]
    violations = validate(ExperimentConfig.from_dict(data))
    assert any(v["field"] == "checks[0]" and "sigma" in v["reason"]
               for v in violations)


# ---------------------------------------------------------------------------
# strict aggregation policy (in-process, one seed sabotaged)


def _patched_member(config, seed, fail_seed=2):
    if seed == fail_seed:
        raise RuntimeError("synthetic solver failure")
    return cli.__dict__["_member_reports_orig"](config, seed)


def test_strict_flag_controls_seed_failure_policy(tmp_path, monkeypatch):
    data = example_dict()
    data["coefficients"]["seeds"] = [1, 2]
    data["threads"] = 1
    monkeypatch.setitem(cli.__dict__, "_member_reports_orig",
                        cli._member_reports)
    monkeypatch.setattr(cli, "_member_reports", _patched_member)

    config = ExperimentConfig.from_dict(data)
    assert cli.run(config, out_dir=tmp_path / "lax") == 0

    data_strict = copy.deepcopy(data)
    data_strict["strict"] = True
    config = ExperimentConfig.from_dict(data_strict)
    assert cli.run(config, out_dir=tmp_path / "strict") == 1

    # failed seeds still occupy their summary rows
    rows = (tmp_path / "strict" / "summary.csv").read_text().strip()
    lines = rows.split("\n")[1:]
    assert len(lines) == len(data["checks"]) * 2
    assert sum("error" in line for line in lines) == len(data["checks"])

    reports = json.loads((tmp_path / "strict" / "reports.json").read_text())
    by_seed = {m["seed"]: m["status"] for m in reports["members"]}
    assert by_seed == {1: "ok", 2: "error"}


# ---------------------------------------------------------------------------
# end-to-end subprocess runs


def test_ensemble_demo_end_to_end(tmp_path):
    out1 = tmp_path / "run1"
    proc = run_cli(["ensemble", "--config", str(EXAMPLE), "--out", str(out1)])
    assert proc.returncode == 0, proc.stderr

    rows = (out1 / "summary.csv").read_text().strip().split("\n")[1:]
    data = example_dict()
    assert len(rows) == len(data["checks"]) * len(
        data["coefficients"]["seeds"])

    assert (out1 / "constants_by_seed.csv").exists()
    meta = json.loads((out1 / "metadata.json").read_text())
    assert "created_at" in meta and "elapsed_seconds" in meta

    reports = json.loads((out1 / "reports.json").read_text())
    assert "created_at" not in json.dumps(reports)
    seeds = [m["seed"] for m in reports["members"]]
    assert seeds == sorted(seeds)

    # rerun is byte-identical (timestamps live in metadata.json only)
    out2 = tmp_path / "run2"
    proc = run_cli(["ensemble", "--config", str(EXAMPLE), "--out", str(out2)])
    assert proc.returncode == 0
    assert (out1 / "reports.json").read_bytes() == \
        (out2 / "reports.json").read_bytes()
    assert (out1 / "summary.csv").read_bytes() == \
        (out2 / "summary.csv").read_bytes()


def test_seeds_flag_overrides_config(tmp_path):
    out = tmp_path / "seeded"
    proc = run_cli(["ensemble", "--config", str(EXAMPLE),
                    "--out", str(out), "--seeds", "4..5"])
    assert proc.returncode == 0, proc.stderr
    reports = json.loads((out / "reports.json").read_text())
    assert [m["seed"] for m in reports["members"]] == [4, 5]


def test_env_overrides_out_and_threads(tmp_path):
    out = tmp_path / "envout"
    proc = run_cli(["ensemble", "--config", str(EXAMPLE)],
                   env_extra={"KFPLAB_OUT": str(out), "KFPLAB_THREADS": "3"})
    assert proc.returncode == 0, proc.stderr
    assert (out / "reports.json").exists()
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["threads"] == 3


def test_invalid_config_exits_2_with_machine_readable_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    proc = run_cli(["ensemble", "--config", str(bad)])
    assert proc.returncode == 2
    error = json.loads(proc.stdout)
    assert error["error"] == "validation"
    assert all({"field", "reason"} <= set(v) for v in error["violations"])


def test_kind_mismatch_exits_2(tmp_path):
    data = example_dict()
    data["kind"] = "solve"
    path = tmp_path / "mismatch.json"
    path.write_text(json.dumps(data))
    proc = run_cli(["ensemble", "--config", str(path)])
    assert proc.returncode == 2
    error = json.loads(proc.stdout)
    assert error["violations"][0]["field"] == "kind"


def test_unreadable_config_exits_2(tmp_path):
    proc = run_cli(["ensemble", "--config", str(tmp_path / "missing.json")])
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["error"] == "config"


def test_kernel_check_kind(tmp_path):
    out = tmp_path / "kernel"
    proc = run_cli(["kernel-check", "--out", str(out)])
    assert proc.returncode == 0, proc.stderr
    reports = json.loads((out / "reports.json").read_text())
    assert all(reports["checks"].values())
    assert max(float(e) for e in reports["mass_errors"].values()) <= 1e-6


def test_constants_kind_prints_tuple(tmp_path):
    out = tmp_path / "constants"
    proc = run_cli(["constants", "--out", str(out)])
    assert proc.returncode == 0, proc.stderr
    assert "(r0, eps, theta, nu, mu, alpha)" in proc.stdout
    reports = json.loads((out / "reports.json").read_text())
    assert reports["values"][0] == "0.05"


def test_convergence_kind_meets_order(tmp_path):
    out = tmp_path / "conv"
    proc = run_cli(["convergence", "--out", str(out)])
    assert proc.returncode == 0, proc.stderr
    reports = json.loads((out / "reports.json").read_text())
    assert reports["order"] >= reports["min_order"]
    plot = (out / "error_vs_h.csv").read_text().strip().split("\n")
    assert plot[0] == "h,error"
    assert len(plot) == 1 + len(reports["levels"])


def test_solve_kind_writes_container(tmp_path):
    data = example_dict()
    data["kind"] = "solve"
    path = tmp_path / "solve.json"
    path.write_text(json.dumps(data))
    out = tmp_path / "solve_out"
    proc = run_cli(["solve", "--config", str(path), "--out", str(out)])
    assert proc.returncode == 0, proc.stderr
    reports = json.loads((out / "reports.json").read_text())
    assert reports["finite"] is True
    container = out / reports["container"]
    assert container.exists()

    from kfplab.solver.grid import load_grid_function
    f = load_grid_function(container)
    # the initial slice is stored ahead of the nt marched slices
    assert f.values.shape == (data["grid"]["nt"] + 1, data["grid"]["nx"],
                              data["grid"]["nv"])


def test_verify_kind_passes_residuals(tmp_path):
    data = example_dict()
    data["kind"] = "verify"
    path = tmp_path / "verify.json"
    path.write_text(json.dumps(data))
    out = tmp_path / "verify_out"
    proc = run_cli(["verify", "--config", str(path), "--out", str(out)])
    assert proc.returncode == 0, proc.stderr
    reports = json.loads((out / "reports.json").read_text())
    for direction in ("sub", "super"):
        assert reports["residuals"][direction]["passed"] is True
