"""Pinned calibration data: pass bounds and grid-tolerance constant.

The packaged data/calibration.json is produced by
scripts/make_calibration.py from a fixed ensemble of rough-coefficient
runs; checkers compare empirical constants against these bounds (which
were set at twice the worst calibrated value).  Loading falls back to
conservative defaults when a key is absent.
"""

from __future__ import annotations

import importlib.resources
import json
from functools import lru_cache

__all__ = ["load_calibration", "grid_tolerance", "pass_bound"]

_DEFAULTS = {
    "c_tol": 1.0,
    "pass_bounds": {},
}


@lru_cache(maxsize=1)
def load_calibration() -> dict:
    try:
        path = importlib.resources.files("kfplab").joinpath(
            "data/calibration.json")
        data = json.loads(path.read_text())
    except (FileNotFoundError, ModuleNotFoundError):
        data = {}
    merged = dict(_DEFAULTS)
    merged.update(data)
    return merged


def grid_tolerance(dt, dx, dv, c_tol=None) -> float:
    """Discretization tolerance C_tol * (dt + dx^2 + dv^2).

    First order in time (backward Euler splitting), second order in the
    x and v cell sizes.
    """
    if c_tol is None:
        c_tol = load_calibration()["c_tol"]
    return float(c_tol) * (float(dt) + float(dx) ** 2 + float(dv) ** 2)


def pass_bound(statement_id, default=None):
    """Calibrated empirical-constant bound for one estimate id."""
    return load_calibration()["pass_bounds"].get(statement_id, default)
