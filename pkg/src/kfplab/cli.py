"""Configuration-driven experiment runner.

One JSON config describes an experiment: grid, box, coefficient
ensemble, checks, and output directory.  `validate` reports every
violation before any compute; `run` executes the experiment and writes
a deterministic reports.json (byte-identical across reruns of the same
config), a CSV summary, per-check plot data, and a separate
metadata.json holding the timestamps.

Exit codes: 0 all enabled checks passed, 1 a check failed (or a seed
failed under --strict), 2 the config did not validate.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import experiments
from .calibration import grid_tolerance
from .estimates.checks import (
    ORIGIN,
    check_energy_estimate,
    check_gain_integrability,
    check_harnack,
    check_linfty_bound,
    check_oscillation_decay,
    check_sobolev_gain,
    check_weak_harnack,
    check_weak_poincare,
)
from .estimates.constants import explicit_constants
from .geometry import make_cylinder
from .solver.coefficients import make_rough_coefficients
from .solver.grid import Box
from .solver.march import solve
from .solver.weak import weak_residual

__all__ = ["ExperimentConfig", "validate", "run", "main", "parse_seeds"]

KINDS = ("kernel-check", "solve", "verify", "ensemble", "constants",
         "counterexample", "convergence")

# kinds that build a grid and therefore need grid/box/coefficients
_COMPUTE_KINDS = ("solve", "verify", "ensemble")

_CFL_LIMIT = 4.0

_TOP_LEVEL_KEYS = {
    "kind", "out", "grid", "box", "coefficients", "checks", "pads",
    "datum", "tolerances", "options", "strict", "threads",
}


@dataclasses.dataclass
class ExperimentConfig:
    kind: str = ""
    out: str | None = None
    grid: dict = dataclasses.field(default_factory=dict)
    box: dict = dataclasses.field(default_factory=dict)
    coefficients: dict = dataclasses.field(default_factory=dict)
    checks: list = dataclasses.field(default_factory=list)
    pads: dict = dataclasses.field(default_factory=dict)
    datum: dict = dataclasses.field(default_factory=dict)
    tolerances: dict = dataclasses.field(default_factory=dict)
    options: dict = dataclasses.field(default_factory=dict)
    strict: bool = False
    threads: int = 1
    unknown_keys: tuple = ()

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)} - {"unknown_keys"}
        kwargs = {k: v for k, v in data.items() if k in known}
        unknown = tuple(sorted(set(data) - _TOP_LEVEL_KEYS))
        return cls(unknown_keys=unknown, **kwargs)


def parse_seeds(text: str) -> list:
    """Seed list syntax: 'a..b' inclusive range or comma-separated ints."""
    text = text.strip()
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise ValueError(f"empty seed range {text!r}")
        return list(range(lo, hi + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


# ---------------------------------------------------------------------------
# check registry

def _pair_cylinders(params):
    r = float(params.get("r", 0.5))
    R = float(params.get("R", 1.0))
    return (make_cylinder("centered", ORIGIN, r),
            make_cylinder("centered", ORIGIN, R))


def _poincare_cylinders(params):
    return (make_cylinder("centered", ORIGIN, 1.0),
            make_cylinder("past", ORIGIN, 1.0),
            make_cylinder("centered", ORIGIN, 5.0))


def _harnack_cylinders(params):
    r0 = 1.0 / 20.0
    return (make_cylinder("tilde_past", ORIGIN, r0, {"divisor": 4}),
            make_cylinder("centered", ORIGIN, 0.25 * r0))


def _weak_harnack_cylinders(params):
    r0 = 1.0 / 20.0
    return (make_cylinder("tilde_past", ORIGIN, r0, {"divisor": 2}),
            make_cylinder("centered", ORIGIN, 0.5 * r0),
            make_cylinder("past", ORIGIN, r0))


def _oscillation_cylinders(params):
    centers = params.get("centers", [[0.0, 0.0, 0.0]])
    return tuple(make_cylinder("centered", tuple(c), 1.0) for c in centers)


def _check_energy(f, coef, params):
    qr, qR = _pair_cylinders(params)
    return check_energy_estimate(f, coef, qr, qR)


def _check_gain(f, coef, params):
    qr, qR = _pair_cylinders(params)
    return check_gain_integrability(f, coef, qr, qR, float(params["p"]))


def _check_sobolev(f, coef, params):
    qr, qR = _pair_cylinders(params)
    return check_sobolev_gain(f, coef, qr, qR, float(params["sigma"]))


def _check_linfty(f, coef, params):
    qr, qR = _pair_cylinders(params)
    return check_linfty_bound(f, coef, qr, qR, float(params["zeta"]))


def _check_poincare(f, coef, params):
    return check_weak_poincare(f, coef, float(params["eps"]),
                               float(params.get("sigma", 0.25)))


def _check_harnack(f, coef, params):
    return check_harnack(f, coef)


def _check_weak_harnack(f, coef, params):
    return check_weak_harnack(f, coef, float(params.get("zeta", 0.5)))


def _check_oscillation(f, coef, params):
    centers = [tuple(c) for c in params.get("centers", [(0.0, 0.0, 0.0)])]
    return check_oscillation_decay(f, coef, int(params.get("levels", 1)),
                                   centers=centers)


def _positive(name):
    def rule(params):
        if name not in params:
            return f"parameter {name!r} is required"
        if not float(params[name]) > 0:
            return f"parameter {name!r} must be positive"
        return None
    return rule


def _open_unit(name, hi=1.0):
    def rule(params):
        if name not in params:
            return f"parameter {name!r} is required"
        if not 0.0 < float(params[name]) < hi:
            return f"parameter {name!r} must lie in (0, {hi:g})"
        return None
    return rule


# name -> (builder, cylinder lister, parameter rules)
CHECK_SPECS = {
    "energy_estimate": (_check_energy, _pair_cylinders, ()),
    "gain_integrability": (_check_gain, _pair_cylinders,
                           (_positive("p"),)),
    "sobolev_gain": (_check_sobolev, _pair_cylinders,
                     (_open_unit("sigma", 1.0 / 3.0),)),
    "linfty_bound": (_check_linfty, _pair_cylinders,
                     (_positive("zeta"),)),
    "weak_poincare": (_check_poincare, _poincare_cylinders,
                      (_open_unit("eps"),)),
    "harnack": (_check_harnack, _harnack_cylinders, ()),
    "weak_harnack": (_check_weak_harnack, _weak_harnack_cylinders, ()),
    "oscillation_decay": (_check_oscillation, _oscillation_cylinders, ()),
}


# ---------------------------------------------------------------------------
# validation

def _violation(field, reason):
    return {"field": field, "reason": reason}


def _box_from_config(box: dict) -> Box:
    return Box(float(box["t0"]), float(box["t1"]),
               float(box["x0"]), float(box["x1"]),
               float(box["v0"]), float(box["v1"]))


def _safe_box(config: ExperimentConfig) -> Box:
    b = _box_from_config(config.box)
    pad_x = float(config.pads.get("x", 1.0))
    pad_v = float(config.pads.get("v", 2.0))
    return Box(b.t0, b.t1, b.x0 + pad_x, b.x1 - pad_x,
               b.v0 + pad_v, b.v1 - pad_v)


def _cylinder_fits(cyl, safe: Box, tol=1e-9) -> bool:
    (t_lo, t_hi), (x_lo, x_hi), (v_lo, v_hi) = cyl.bbox()
    return (t_lo >= safe.t0 - tol and t_hi <= safe.t1 + tol
            and x_lo >= safe.x0 - tol and x_hi <= safe.x1 + tol
            and v_lo >= safe.v0 - tol and v_hi <= safe.v1 + tol)


def _validate_compute(config: ExperimentConfig, out: list):
    grid = config.grid
    for key in ("nt", "nx", "nv"):
        if key not in grid:
            out.append(_violation(f"grid.{key}", "required"))
        elif int(grid[key]) != grid[key] or int(grid[key]) < 2:
            out.append(_violation(f"grid.{key}",
                                  "must be an integer of at least 2"))

    box = config.box
    box_ok = True
    for key in ("t0", "t1", "x0", "x1", "v0", "v1"):
        if key not in box:
            out.append(_violation(f"box.{key}", "required"))
            box_ok = False
    if box_ok:
        for lo, hi in (("t0", "t1"), ("x0", "x1"), ("v0", "v1")):
            if not float(box[lo]) < float(box[hi]):
                out.append(_violation(f"box.{lo}",
                                      f"must be below box.{hi}"))
                box_ok = False

    coef = config.coefficients
    if "lam" not in coef:
        out.append(_violation("coefficients.lam", "required"))
    elif not float(coef["lam"]) > 0:
        out.append(_violation("coefficients.lam", "must be positive"))
    if "Lam" not in coef:
        out.append(_violation("coefficients.Lam", "required"))
    elif "lam" in coef and not float(coef["Lam"]) >= float(coef["lam"]):
        out.append(_violation("coefficients.Lam",
                              "must be at least coefficients.lam"))
    if float(coef.get("s_amp", 0.0)) < 0:
        out.append(_violation("coefficients.s_amp", "must be nonnegative"))
    if not float(coef.get("cell_size", 0.1)) > 0:
        out.append(_violation("coefficients.cell_size", "must be positive"))

    seeds = coef.get("seeds", [])
    if config.kind == "ensemble" and not seeds:
        out.append(_violation("coefficients.seeds",
                              "nonempty seed list required for ensemble"))
    if seeds and not all(int(s) == s for s in seeds):
        out.append(_violation("coefficients.seeds", "seeds must be integers"))

    for key in ("x", "v"):
        if float(config.pads.get(key, 0.0)) < 0:
            out.append(_violation(f"pads.{key}", "must be nonnegative"))

    if config.kind == "ensemble" and not config.checks:
        out.append(_violation("checks",
                              "at least one check required for ensemble"))
    grid_ok = not any(v["field"].startswith("grid.") for v in out)
    pads_ok = not any(v["field"].startswith("pads.") for v in out)

    if box_ok and pads_ok:
        safe = _safe_box(config)
        if not (safe.x0 < safe.x1 and safe.v0 < safe.v1):
            out.append(_violation("pads",
                                  "padding swallows the whole box"))
        else:
            for i, entry in enumerate(config.checks):
                name = entry.get("name")
                if name not in CHECK_SPECS:
                    out.append(_violation(f"checks[{i}].name",
                                          f"unknown check {name!r}"))
                    continue
                _, lister, rules = CHECK_SPECS[name]
                bad_params = False
                for rule in rules:
                    reason = rule(entry)
                    if reason is not None:
                        out.append(_violation(f"checks[{i}]", reason))
                        bad_params = True
                if bad_params:
                    continue
                for cyl in lister(entry):
                    if not _cylinder_fits(cyl, safe):
                        desc = cyl.describe()
                        out.append(_violation(
                            f"checks[{i}]",
                            f"cylinder {desc['kind']} radius "
                            f"{desc['radius']:g} with bbox {cyl.bbox()} "
                            f"exceeds box minus padding"))

    if box_ok and grid_ok:
        b = _box_from_config(box)
        dt = (b.t1 - b.t0) / int(grid["nt"])
        dx = (b.x1 - b.x0) / int(grid["nx"])
        v_max = max(abs(b.v0), abs(b.v1))
        cfl = dt * v_max / dx
        if cfl > _CFL_LIMIT:
            out.append(_violation(
                "grid.nt",
                f"advective CFL {cfl:.2f} exceeds limit {_CFL_LIMIT:g}; "
                f"increase nt or decrease nx"))


def validate(config: ExperimentConfig) -> list:
    """All violations, each naming the offending field and the reason.

    Empty list iff the config is runnable.
    """
    out = []
    if not config.kind:
        out.append(_violation("kind", "required"))
    elif config.kind not in KINDS:
        out.append(_violation("kind",
                              f"unknown kind {config.kind!r}; "
                              f"expected one of {', '.join(KINDS)}"))
    for key in config.unknown_keys:
        out.append(_violation(key, "unknown configuration key"))
    if int(config.threads) < 1:
        out.append(_violation("threads", "must be at least 1"))
    if config.kind in _COMPUTE_KINDS:
        _validate_compute(config, out)
    return out


# ---------------------------------------------------------------------------
# shared run plumbing

def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _report_dict(report) -> dict:
    return report.to_json_dict()


def _passes(report) -> bool:
    # no calibrated bound means nothing to fail against
    return report.passed is not False


def _datum_fn(config: ExperimentConfig):
    floor = float(config.datum.get("floor", 0.15))
    amp = float(config.datum.get("amp", 1.0))
    width = float(config.datum.get("width", 0.25))

    def datum(x, v):
        return floor + amp * np.exp(-(x * x + v * v) / (2.0 * width ** 2))

    return datum


def _solve_member(config: ExperimentConfig, seed: int):
    coef = make_rough_coefficients(
        int(seed),
        lam=float(config.coefficients["lam"]),
        Lam=float(config.coefficients["Lam"]),
        cell_size=float(config.coefficients.get("cell_size", 0.1)),
        s_amp=float(config.coefficients.get("s_amp", 0.0)))
    box = _box_from_config(config.box)
    f = solve(_datum_fn(config), coef, box,
              nx=int(config.grid["nx"]), nv=int(config.grid["nv"]),
              nt=int(config.grid["nt"]),
              pad_x=float(config.pads.get("x", 1.0)),
              pad_v=float(config.pads.get("v", 2.0)))
    return f, coef


def _member_reports(config: ExperimentConfig, seed: int) -> list:
    f, coef = _solve_member(config, seed)
    reports = []
    for entry in config.checks:
        builder, _, _ = CHECK_SPECS[entry["name"]]
        report = builder(f, coef, entry)
        report.provenance["seed"] = int(seed)
        reports.append(report)
    return reports


def _seed_list(config: ExperimentConfig) -> list:
    return [int(s) for s in config.coefficients.get("seeds", [1])]


def _summary_rows(reports) -> list:
    rows = []
    for report in reports:
        row = report.summary_row()
        rows.append([row["statement_id"], row["seed"], row["lhs"],
                     row["rhs"], row["empirical_constant"],
                     row.get("passed", ""), row.get("hypotheses_met", "")])
    return rows


_SUMMARY_HEADER = ("statement_id", "seed", "lhs", "rhs",
                   "empirical_constant", "passed", "hypotheses_met")


def _osc_plot_rows(reports) -> list:
    rows = []
    for report in reports:
        if not report.statement_id.startswith("oscillation"):
            continue
        seed = report.provenance.get("seed", "")
        for entry in report.extras.get("per_center", []):
            t0 = entry["center"][0]
            for radius, osc in zip(entry["radii"], entry["oscillations"]):
                rows.append([seed, t0, radius, osc])
    return rows


# ---------------------------------------------------------------------------
# per-kind runners; each returns (exit_code, reports_payload, csv_rows,
# plot_files) where plot_files maps filename -> (header, rows)

def _run_kernel_check(config: ExperimentConfig):
    tol = config.tolerances
    mass_tol = float(tol.get("kernel_mass", 1e-6))
    ratio_lo = float(tol.get("residual_ratio_low", 3.2))
    ratio_hi = float(tol.get("residual_ratio_high", 4.8))
    control_min = float(tol.get("control_factor_min", 10.0))
    semigroup_tol = float(tol.get("semigroup_defect", 1e-8))

    suite = experiments.run_kernel_suite()
    rep_report = suite["representation"]["report"]
    checks = {
        "mass": max(suite["mass_errors"].values()) <= mass_tol,
        "residual_ratio": ratio_lo <= suite["residual_ratio"] <= ratio_hi,
        "negative_control": suite["control_factor"] >= control_min,
        "semigroup": suite["semigroup_defect"] <= semigroup_tol,
        "representation": _passes(rep_report),
    }
    payload = {
        "kind": "kernel-check",
        "mass_errors": {f"{t:g}": e for t, e in suite["mass_errors"].items()},
        "residual_coarse": suite["residual_coarse"],
        "residual_fine": suite["residual_fine"],
        "residual_ratio": suite["residual_ratio"],
        "control_factor": suite["control_factor"],
        "semigroup_defect": suite["semigroup_defect"],
        "split_l1": suite["split_l1"],
        "representation": _report_dict(rep_report),
        "checks": checks,
    }
    rows = [[name, "", "", "", "", ok, ""] for name, ok in checks.items()]
    code = 0 if all(checks.values()) else 1
    return code, payload, rows, {}


def _run_solve(config: ExperimentConfig, out_dir: Path):
    seed = _seed_list(config)[0]
    f, _ = _solve_member(config, seed)
    container = out_dir / f"solution_seed{seed}.kfp"
    f.to_binary(container)
    finite = bool(np.isfinite(f.values).all())
    payload = {
        "kind": "solve",
        "seed": seed,
        "container": container.name,
        "finite": finite,
        "min": float(f.values.min()),
        "max": float(f.values.max()),
        "final_mass": float(f.values[-1].sum() * f.dx * f.dv),
        "grid": {"nt": int(config.grid["nt"]), "nx": int(config.grid["nx"]),
                 "nv": int(config.grid["nv"])},
        "cfl": f.meta.get("cfl"),
    }
    rows = [["solve", seed, "", "", "", finite, ""]]
    return (0 if finite else 1), payload, rows, {}


def _run_verify(config: ExperimentConfig):
    seed = _seed_list(config)[0]
    f, coef = _solve_member(config, seed)
    residuals = {d: weak_residual(f, coef, direction=d)
                 for d in ("sub", "super")}
    payload = {
        "kind": "verify",
        "seed": seed,
        "grid_tolerance": grid_tolerance(f.dt, f.dx, f.dv),
        "residuals": {d: r.to_json_dict() for d, r in residuals.items()},
    }
    rows = [[f"residual_{d}", seed, r.max_residual, r.tolerance, "",
             r.passed, ""] for d, r in residuals.items()]
    ok = all(r.passed for r in residuals.values())
    return (0 if ok else 1), payload, rows, {}


def _run_ensemble(config: ExperimentConfig):
    seeds = _seed_list(config)
    results = {}

    def member(seed):
        try:
            return ("ok", _member_reports(config, seed))
        except Exception as exc:  # per-seed failure: record, keep going
            return ("error", f"{type(exc).__name__}: {exc}")

    with ThreadPoolExecutor(max_workers=int(config.threads)) as pool:
        futures = {seed: pool.submit(member, seed) for seed in seeds}
        for seed, fut in futures.items():
            results[seed] = fut.result()

    members = []
    rows = []
    const_rows = []
    all_pass = True
    any_error = False
    all_reports = []
    for seed in sorted(results):  # aggregation ordered by seed
        status, body = results[seed]
        if status == "error":
            any_error = True
            members.append({"seed": seed, "status": "error", "error": body})
            for entry in config.checks:
                rows.append([entry["name"], seed, "", "", "", "error", ""])
            continue
        reports = body
        all_reports.extend(reports)
        members.append({
            "seed": seed,
            "status": "ok",
            "reports": [_report_dict(r) for r in reports],
        })
        rows.extend(_summary_rows(reports))
        for r in reports:
            if not _passes(r):
                all_pass = False
            const_rows.append([r.statement_id, seed,
                               "" if r.empirical_constant is None
                               else r.empirical_constant])

    payload = {"kind": "ensemble", "seeds": seeds, "members": members}
    plots = {"constants_by_seed.csv":
             (("statement_id", "seed", "empirical_constant"), const_rows)}
    osc_rows = _osc_plot_rows(all_reports)
    if osc_rows:
        plots["osc_vs_radius.csv"] = (
            ("seed", "center_t", "radius", "oscillation"), osc_rows)
    code = 0 if all_pass else 1
    if config.strict and any_error:
        code = 1
    return code, payload, rows, plots


def _run_constants(config: ExperimentConfig):
    opts = config.options
    consts = explicit_constants(
        d=1,
        delta1=float(opts.get("delta1", 0.5)),
        delta2=float(opts.get("delta2", 0.5)),
        s_inf=float(opts.get("s_inf", 0.0)))
    digits = int(opts.get("digits", 12))
    tup = consts.as_tuple_str(digits)
    print("(r0, eps, theta, nu, mu, alpha) =", tup)
    payload = {
        "kind": "constants",
        "digits": digits,
        "inputs": {"delta1": float(opts.get("delta1", 0.5)),
                   "delta2": float(opts.get("delta2", 0.5)),
                   "s_inf": float(opts.get("s_inf", 0.0))},
        "tuple_order": ["r0", "eps", "theta", "nu", "mu", "alpha"],
        "values": list(tup),
    }
    rows = [["constants", "", "", "", "", True, ""]]
    return 0, payload, rows, {}


def _run_counterexample(config: ExperimentConfig):
    result = experiments.run_counterexample(
        verify=bool(config.options.get("verify", True)))
    gap_removed = result["gap_removed"]
    fraction = result["intermediate_fraction"]
    ok = fraction == 0.0 and gap_removed.hypotheses_met
    payload = {
        "kind": "counterexample",
        "intermediate_fraction": fraction,
        "nu": result["nu"],
        "gap_removed": _report_dict(gap_removed),
        "with_gap": _report_dict(result["with_gap"]),
    }
    if "residual_sub" in result:
        payload["residual_sub"] = result["residual_sub"].to_json_dict()
        payload["residual_super"] = result["residual_super"].to_json_dict()
    rows = [["counterexample_gap_removed", "", fraction, result["nu"], "",
             ok, gap_removed.hypotheses_met]]
    return (0 if ok else 1), payload, rows, {}


def _run_convergence(config: ExperimentConfig):
    opts = config.options
    levels = tuple(int(k) for k in opts.get("levels", (1, 2, 4)))
    min_order = float(opts.get("min_order", 1.8))
    ladder = experiments.run_transport_convergence(levels)
    ok = ladder["order"] >= min_order
    payload = {
        "kind": "convergence",
        "levels": list(levels),
        "hs": ladder["hs"],
        "errors": ladder["errors"],
        "order": ladder["order"],
        "min_order": min_order,
    }
    rows = [["transport_order", "", ladder["order"], min_order, "", ok, ""]]
    plots = {"error_vs_h.csv": (("h", "error"),
                                list(zip(ladder["hs"], ladder["errors"])))}
    return (0 if ok else 1), payload, rows, plots


def run(config: ExperimentConfig, out_dir=None) -> int:
    """Validate and execute one experiment; write reports to out_dir."""
    violations = validate(config)
    if violations:
        print(json.dumps({"error": "validation", "violations": violations},
                         indent=2, sort_keys=True))
        return 2

    out = Path(out_dir if out_dir is not None
               else (config.out or "kfplab-out"))
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.time()
    if config.kind == "kernel-check":
        code, payload, rows, plots = _run_kernel_check(config)
    elif config.kind == "solve":
        code, payload, rows, plots = _run_solve(config, out)
    elif config.kind == "verify":
        code, payload, rows, plots = _run_verify(config)
    elif config.kind == "ensemble":
        code, payload, rows, plots = _run_ensemble(config)
    elif config.kind == "constants":
        code, payload, rows, plots = _run_constants(config)
    elif config.kind == "counterexample":
        code, payload, rows, plots = _run_counterexample(config)
    else:
        code, payload, rows, plots = _run_convergence(config)

    _write_json(out / "reports.json", payload)
    _write_csv(out / "summary.csv", _SUMMARY_HEADER, rows)
    for name, (header, plot_rows) in plots.items():
        _write_csv(out / name, header, plot_rows)
    _write_json(out / "metadata.json", {
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "elapsed_seconds": time.time() - t0,
        "threads": int(config.threads),
        "exit_code": code,
    })
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kfplab",
        description="Experiment runner for the kinetic Fokker-Planck lab")
    parser.add_argument("kind", choices=KINDS, help="experiment kind")
    parser.add_argument("--config", help="path to the JSON config")
    parser.add_argument("--out", help="output directory "
                        "(overrides config and KFPLAB_OUT)")
    parser.add_argument("--seeds", help="seed list: 'a..b' or 'a,b,c' "
                        "(overrides the config seed list)")
    parser.add_argument("--strict", action="store_true",
                        help="per-seed solver failures fail the run")
    parser.add_argument("--threads", type=int,
                        help="worker pool size (overrides KFPLAB_THREADS)")
    args = parser.parse_args(argv)

    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(json.dumps({"error": "config",
                              "reason": f"{type(exc).__name__}: {exc}"},
                             indent=2, sort_keys=True))
            return 2
        if not isinstance(data, dict):
            print(json.dumps({"error": "config",
                              "reason": "top level must be an object"},
                             indent=2, sort_keys=True))
            return 2

    if data.get("kind", args.kind) != args.kind:
        print(json.dumps({
            "error": "validation",
            "violations": [_violation(
                "kind", f"config kind {data['kind']!r} does not match "
                f"subcommand {args.kind!r}")]}, indent=2, sort_keys=True))
        return 2
    data["kind"] = args.kind

    if args.seeds:
        try:
            seeds = parse_seeds(args.seeds)
        except ValueError as exc:
            print(json.dumps({"error": "validation",
                              "violations": [_violation("seeds", str(exc))]},
                             indent=2, sort_keys=True))
            return 2
        data.setdefault("coefficients", {})["seeds"] = seeds
    if args.strict:
        data["strict"] = True

    threads = args.threads
    if threads is None and os.environ.get("KFPLAB_THREADS"):
        threads = int(os.environ["KFPLAB_THREADS"])
    if threads is not None:
        data["threads"] = threads

    out = args.out or os.environ.get("KFPLAB_OUT") or None

    config = ExperimentConfig.from_dict(data)
    return run(config, out_dir=out)


if __name__ == "__main__":
    raise SystemExit(main())
