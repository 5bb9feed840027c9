"""Gridded phase-space functions and their container format.

A GridFunction stores values on a tensor grid: x and v axes are cell
centers of uniform cells, and each stored time slice represents the
half-open time cell (t - dt_store, t] ending at the slice time.  That
convention matches the half-open time windows of the measurement
cylinders, so an aligned cylinder is tiled exactly by grid cells.
"""

from __future__ import annotations

import dataclasses
import io
import json
import struct

import numpy as np

from ..geometry import Cylinder

__all__ = ["Box", "GridFunction", "SafeRegionError", "sample_function",
           "load_grid_function"]

_MAGIC = b"KFPG"
_VERSION = 1


class SafeRegionError(ValueError):
    """A measurement region leaves the boundary-clean part of the grid."""


@dataclasses.dataclass(frozen=True)
class Box:
    """Axis-aligned phase-space box [t0,t1] x [x0,x1] x [v0,v1]."""

    t0: float
    t1: float
    x0: float
    x1: float
    v0: float
    v1: float

    def __post_init__(self):
        if not (self.t0 <= self.t1 and self.x0 <= self.x1
                and self.v0 <= self.v1):
            raise ValueError("box bounds are not ordered")

    def shrink(self, pad_x, pad_v) -> "Box":
        return Box(self.t0, self.t1, self.x0 + pad_x, self.x1 - pad_x,
                   self.v0 + pad_v, self.v1 - pad_v)

    def intersect(self, other: "Box") -> "Box":
        return Box(max(self.t0, other.t0), min(self.t1, other.t1),
                   max(self.x0, other.x0), min(self.x1, other.x1),
                   max(self.v0, other.v0), min(self.v1, other.v1))

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclasses.dataclass
class GridFunction:
    """Values on a uniform (t, x, v) grid plus measurement metadata.

    pad_x / pad_v declare how many coordinate units near the x and v
    boundaries are considered contaminated (by the periodic wrap and
    the artificial zero-flux wall); solve_box records the domain the
    dynamics actually ran on when the stored values were cropped.
    """

    times: np.ndarray
    xs: np.ndarray
    vs: np.ndarray
    values: np.ndarray
    pad_x: float = 0.0
    pad_v: float = 0.0
    solve_box: Box = None
    meta: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.xs = np.asarray(self.xs, dtype=float)
        self.vs = np.asarray(self.vs, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.times.size, self.xs.size, self.vs.size)
        if self.values.shape != expected:
            raise ValueError(
                f"values shape {self.values.shape} != axes {expected}")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    @property
    def dx(self) -> float:
        return float(self.xs[1] - self.xs[0]) if self.xs.size > 1 else 0.0

    @property
    def dv(self) -> float:
        return float(self.vs[1] - self.vs[0]) if self.vs.size > 1 else 0.0

    @property
    def box(self) -> Box:
        """Extent of the stored cells (time cells end at slice times)."""
        dt, dx, dv = self.dt, self.dx, self.dv
        return Box(float(self.times[0]) - dt, float(self.times[-1]),
                   float(self.xs[0]) - dx / 2, float(self.xs[-1]) + dx / 2,
                   float(self.vs[0]) - dv / 2, float(self.vs[-1]) + dv / 2)

    @property
    def safe_box(self) -> Box:
        """Stored region minus the declared boundary padding."""
        base = self.solve_box if self.solve_box is not None else self.box
        return base.shrink(self.pad_x, self.pad_v).intersect(self.box)

    @property
    def cell_measure(self) -> float:
        if self.times.size < 2:
            raise SafeRegionError(
                "cell measure undefined on a single-slice grid function")
        return self.dt * self.dx * self.dv

    def require_cylinder(self, cyl: Cylinder, tol=1e-9):
        """Raise SafeRegionError unless the cylinder sits in the safe box."""
        (t_lo, t_hi), (x_lo, x_hi), (v_lo, v_hi) = cyl.bbox()
        safe = self.safe_box
        ok = (t_lo >= safe.t0 - tol and t_hi <= safe.t1 + tol
              and x_lo >= safe.x0 - tol and x_hi <= safe.x1 + tol
              and v_lo >= safe.v0 - tol and v_hi <= safe.v1 + tol)
        if not ok:
            raise SafeRegionError(
                f"cylinder {cyl.describe()['kind']} with bbox "
                f"{cyl.bbox()} leaves safe box {safe}")

    def mask(self, cyl: Cylinder) -> np.ndarray:
        """Boolean membership of every grid cell center in the cylinder.

        Evaluated one time slice at a time so the temporaries stay at
        nx * nv no matter how many slices are stored.
        """
        out = np.empty((self.times.size, self.xs.size, self.vs.size),
                       dtype=bool)
        X, V = np.meshgrid(self.xs, self.vs, indexing="ij", copy=False)
        for it in range(self.times.size):
            out[it] = cyl.contains(float(self.times[it]), X, V)
        return out

    def crop_x(self, x_lo, x_hi) -> "GridFunction":
        keep = (self.xs >= x_lo) & (self.xs <= x_hi)
        if not np.any(keep):
            raise ValueError("x crop removes every column")
        return GridFunction(self.times, self.xs[keep], self.vs,
                            self.values[:, keep, :], pad_x=self.pad_x,
                            pad_v=self.pad_v, solve_box=self.solve_box,
                            meta=dict(self.meta))

    def to_binary(self, path):
        meta = dict(self.meta)
        meta["pad_x"] = self.pad_x
        meta["pad_v"] = self.pad_v
        meta["solve_box"] = (self.solve_box.as_dict()
                             if self.solve_box is not None else None)
        blob = json.dumps(meta, sort_keys=True).encode()
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<II", _VERSION, 1))
            for axis in (self.times, self.xs, self.vs):
                fh.write(struct.pack("<Q", axis.size))
            fh.write(struct.pack("<Q", len(blob)))
            fh.write(blob)
            fh.write(self.times.astype("<f8").tobytes())
            fh.write(self.xs.astype("<f8").tobytes())
            fh.write(self.vs.astype("<f8").tobytes())
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    def to_csv(self, path, t_stride=1, x_stride=1, v_stride=1):
        """Plain long-format CSV export (t, x, v, value), strided."""
        with open(path, "w") as fh:
            fh.write("t,x,v,value\n")
            for it in range(0, self.times.size, t_stride):
                for ix in range(0, self.xs.size, x_stride):
                    for iv in range(0, self.vs.size, v_stride):
                        fh.write(f"{float(self.times[it])!r},"
                                 f"{float(self.xs[ix])!r},"
                                 f"{float(self.vs[iv])!r},"
                                 f"{float(self.values[it, ix, iv])!r}\n")


def load_grid_function(path) -> GridFunction:
    with open(path, "rb") as fh:
        data = fh.read()
    buf = io.BytesIO(data)
    if buf.read(4) != _MAGIC:
        raise ValueError("not a grid function container")
    version, d = struct.unpack("<II", buf.read(8))
    if version != _VERSION:
        raise ValueError(f"unsupported container version {version}")
    if d != 1:
        raise ValueError(f"unsupported dimension {d}")
    nt, nx, nv = (struct.unpack("<Q", buf.read(8))[0] for _ in range(3))
    blob_len = struct.unpack("<Q", buf.read(8))[0]
    meta = json.loads(buf.read(blob_len).decode())
    times = np.frombuffer(buf.read(8 * nt), dtype="<f8").copy()
    xs = np.frombuffer(buf.read(8 * nx), dtype="<f8").copy()
    vs = np.frombuffer(buf.read(8 * nv), dtype="<f8").copy()
    values = np.frombuffer(buf.read(8 * nt * nx * nv), dtype="<f8")
    values = values.reshape(nt, nx, nv).copy()
    pad_x = meta.pop("pad_x", 0.0)
    pad_v = meta.pop("pad_v", 0.0)
    sb = meta.pop("solve_box", None)
    solve_box = Box(**sb) if sb else None
    return GridFunction(times, xs, vs, values, pad_x=pad_x, pad_v=pad_v,
                        solve_box=solve_box, meta=meta)


def centered_axis(lo, hi, n):
    """n uniform cell centers filling [lo, hi]."""
    step = (hi - lo) / n
    return lo + (np.arange(n) + 0.5) * step


def sample_function(fn, times, xs, vs, pad_x=0.0, pad_v=0.0,
                    meta=None) -> GridFunction:
    """Sample fn(t, x, v) (numpy-broadcastable) onto a tensor grid."""
    times = np.asarray(times, dtype=float)
    xs = np.asarray(xs, dtype=float)
    vs = np.asarray(vs, dtype=float)
    T = times[:, None, None]
    X = xs[None, :, None]
    V = vs[None, None, :]
    values = np.broadcast_to(np.asarray(fn(T, X, V), dtype=float),
                             (times.size, xs.size, vs.size)).copy()
    return GridFunction(times, xs, vs, values, pad_x=pad_x, pad_v=pad_v,
                        meta=dict(meta or {"scheme": "sampled"}))
