"""Norms, level-set measures, and seminorms over kinetic cylinders.

All quantities integrate with the midpoint rule: a grid cell belongs to
a cylinder iff its center does, and contributes its full cell measure.
This gives one-cell-level accuracy, which is what the calibrated
tolerances assume.
"""

from __future__ import annotations

import numpy as np

from ..geometry import Cylinder
from ..solver.grid import GridFunction

__all__ = [
    "InsufficientResolutionError",
    "lp_norm",
    "grid_lp_norm",
    "level_set_fraction",
    "band_fraction",
    "cylinder_average",
    "sup_on",
    "inf_on",
    "velocity_gradient",
    "grad_v_l1",
    "gagliardo_x_seminorm",
    "holder_seminorm",
    "source_sup",
    "source_l2",
]

_RELATIONS = {
    "le": np.less_equal,
    "lt": np.less,
    "ge": np.greater_equal,
    "gt": np.greater,
}


class InsufficientResolutionError(ValueError):
    """The cylinder captures too few grid cells for the quantity."""


def _masked_values(f: GridFunction, cyl: Cylinder, minimum=1):
    f.require_cylinder(cyl)
    mask = f.mask(cyl)
    count = int(mask.sum())
    if count < minimum:
        raise InsufficientResolutionError(
            f"cylinder holds {count} cells, need at least {minimum}")
    return f.values[mask], mask


def lp_norm(f: GridFunction, cyl: Cylinder, p) -> float:
    """L^p norm over the cylinder; quasi-norm for p < 1, sup for p = inf."""
    p = float(p)
    if not p > 0:
        raise ValueError("p must be positive")
    vals, _ = _masked_values(f, cyl)
    if np.isinf(p):
        return float(np.max(np.abs(vals)))
    return float((np.abs(vals) ** p).sum() * f.cell_measure) ** (1.0 / p)


def grid_lp_norm(f: GridFunction, p) -> float:
    """L^p norm over the whole stored box (no cylinder restriction)."""
    p = float(p)
    if not p > 0:
        raise ValueError("p must be positive")
    if np.isinf(p):
        return float(np.max(np.abs(f.values)))
    return float((np.abs(f.values) ** p).sum() * f.cell_measure) ** (1.0 / p)


def level_set_fraction(f: GridFunction, cyl: Cylinder, relation: str,
                       threshold: float) -> float:
    """Fraction of cylinder cells whose value satisfies the relation."""
    if relation not in _RELATIONS:
        raise ValueError(f"relation must be one of {sorted(_RELATIONS)}")
    vals, _ = _masked_values(f, cyl)
    return float(np.mean(_RELATIONS[relation](vals, threshold)))


def band_fraction(f: GridFunction, cyl: Cylinder, lo: float,
                  hi: float) -> float:
    """Fraction of cylinder cells with lo < value < hi (both strict)."""
    vals, _ = _masked_values(f, cyl)
    return float(np.mean((vals > lo) & (vals < hi)))


def cylinder_average(f: GridFunction, cyl: Cylinder) -> float:
    """Normalized cell average over the cylinder."""
    vals, _ = _masked_values(f, cyl)
    return float(np.mean(vals))


def sup_on(f: GridFunction, cyl: Cylinder) -> float:
    vals, _ = _masked_values(f, cyl)
    return float(np.max(vals))


def inf_on(f: GridFunction, cyl: Cylinder) -> float:
    vals, _ = _masked_values(f, cyl)
    return float(np.min(vals))


def velocity_gradient(values: np.ndarray, dv: float) -> np.ndarray:
    """d/dv along the last axis: centered inside, one-sided at walls."""
    g = np.empty_like(values)
    g[..., 1:-1] = (values[..., 2:] - values[..., :-2]) / (2.0 * dv)
    g[..., 0] = (values[..., 1] - values[..., 0]) / dv
    g[..., -1] = (values[..., -1] - values[..., -2]) / dv
    return g


def grad_v_l1(f: GridFunction, cyl: Cylinder) -> float:
    """L^1 norm of the velocity gradient over the cylinder."""
    f.require_cylinder(cyl)
    mask = f.mask(cyl)
    if not mask.any():
        raise InsufficientResolutionError("cylinder holds no cells")
    g = velocity_gradient(f.values, f.dv)
    return float(np.abs(g[mask]).sum() * f.cell_measure)


def gagliardo_x_seminorm(f: GridFunction, cyl: Cylinder,
                         sigma: float) -> float:
    """Fractional seminorm in x, integrated in (t, v) over the cylinder.

    Discrete double sum over distinct x-cell pairs inside the cylinder:

        sum_{t,v} sum_{x != x'} |f(t,x,v) - f(t,x',v)| / |x - x'|^(1+sigma)
            * dx^2 * dv * dt

    The x-window of a kinetic cylinder depends on t only, so each time
    slice contributes a dense pair block.
    """
    if not 0.0 < sigma < 1.0 / 3.0:
        raise ValueError("sigma must lie in (0, 1/3)")
    f.require_cylinder(cyl)
    mask = f.mask(cyl)
    if not mask.any():
        raise InsufficientResolutionError("cylinder holds no cells")
    v_ok = mask.any(axis=(0, 1))
    total = 0.0
    for it in range(mask.shape[0]):
        x_ok = mask[it].any(axis=1)
        m = int(x_ok.sum())
        if m == 0:
            continue
        if m < 4:
            raise InsufficientResolutionError(
                f"only {m} x-cells in a cylinder slice, need at least 4")
        xs = f.xs[x_ok]
        gaps = np.abs(xs[:, None] - xs[None, :])
        np.fill_diagonal(gaps, 1.0)
        weights = gaps ** (-(1.0 + sigma))
        np.fill_diagonal(weights, 0.0)
        vals = f.values[it][np.ix_(x_ok, v_ok)]
        diffs = np.abs(vals[:, None, :] - vals[None, :, :])
        total += float(np.einsum("ijk,ij->", diffs, weights))
    return total * f.dx * f.dx * f.dv * f.dt


def holder_seminorm(f: GridFunction, cyl: Cylinder, alpha: float,
                    min_sep: float, max_points: int = 4000) -> float:
    """Max of |f(z1) - f(z2)| / |z1 - z2|^alpha over separated pairs.

    Distance is Euclidean on (t, x, v).  Pairs are drawn from a
    stride-decimated sublattice of the cylinder's cells capped at
    max_points points, and only pairs at distance >= min_sep count.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    coarse = 2.0 * max(f.dt, f.dx, f.dv)
    if min_sep < coarse:
        raise ValueError(
            f"min_sep {min_sep:g} below twice the grid spacing {coarse:g}")
    f.require_cylinder(cyl)
    mask = f.mask(cyl)
    its, ixs, ivs = np.nonzero(mask)
    if its.size == 0:
        raise InsufficientResolutionError("cylinder holds no cells")

    strides = [1, 1, 1]
    axes = [np.unique(its), np.unique(ixs), np.unique(ivs)]

    def selected():
        sel = [ax[::st] for ax, st in zip(axes, strides)]
        sub = mask[np.ix_(sel[0], sel[1], sel[2])]
        jt, jx, jv = np.nonzero(sub)
        return sel[0][jt], sel[1][jx], sel[2][jv]

    st_t, st_x, st_v = selected()
    while st_t.size > max_points:
        sizes = [len(ax[::st]) for ax, st in zip(axes, strides)]
        strides[int(np.argmax(sizes))] *= 2
        st_t, st_x, st_v = selected()

    pts = np.stack([f.times[st_t], f.xs[st_x], f.vs[st_v]], axis=1)
    vals = f.values[st_t, st_x, st_v]
    n = pts.shape[0]
    best = 0.0
    admissible = 0
    for i0 in range(0, n, 256):
        block = slice(i0, min(i0 + 256, n))
        diff = pts[block, None, :] - pts[None, :, :]
        sep = np.sqrt((diff * diff).sum(axis=-1))
        ok = sep >= min_sep
        admissible += int(ok.sum())
        if not ok.any():
            continue
        ratio = np.abs(vals[block, None] - vals[None, :])[ok] / sep[ok] ** alpha
        best = max(best, float(ratio.max()))
    if admissible == 0:
        raise InsufficientResolutionError(
            "no cell pairs at the requested separation")
    return best


def source_sup(coef, cyl: Cylinder, n: int = 12) -> float:
    """Sup of |S| over an interior lattice of the cylinder.

    Lattice sampling underestimates the true sup of a rough field, which
    only makes the estimates it enters harder to pass.
    """
    t, x, v = cyl.sample_lattice(n)
    return float(np.max(np.abs(coef.source(t, x, v))))


def source_l2(coef, f: GridFunction, cyl: Cylinder) -> float:
    """L^2 norm of the source sampled on f's cells inside the cylinder."""
    f.require_cylinder(cyl)
    mask = f.mask(cyl)
    if not mask.any():
        raise InsufficientResolutionError("cylinder holds no cells")
    T, X, V = np.meshgrid(f.times, f.xs, f.vs, indexing="ij", copy=False)
    svals = np.asarray(coef.source(T[mask], X[mask], V[mask]), float)
    return float(np.sqrt((svals ** 2).sum() * f.cell_measure))
