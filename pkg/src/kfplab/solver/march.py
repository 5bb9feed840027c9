"""Time marching for the kinetic equation with rough coefficients.

    df/dt + v df/dx = d/dv (A df/dv) + B df/dv + S

One step is a Strang split T(dt/2) D(dt) T(dt/2):

* T: semi-Lagrangian transport in x, per velocity row, with exact
  integer shifting plus cubic Lagrange interpolation of the fractional
  remainder; periodic in x; unconditionally stable.
* D: backward Euler in v with the diffusion in flux form (harmonic
  face averages of A, zero-flux walls) and the drift upwinded, so the
  implicit matrix is an M-matrix and the step is monotone; the source
  enters this stage as + dt S.

Coefficients are sampled at the step midpoint time.  Constants are
invariant up to roundoff, and without drift and diffusion of structure
the scheme reduces to exact advection of whole-cell shifts.
"""

from __future__ import annotations

import numpy as np

from .coefficients import CoefficientField
from .grid import Box, GridFunction, centered_axis

__all__ = ["CFLViolationError", "SolverDivergenceError", "solve",
           "transport_weights", "fit_order"]


class CFLViolationError(ValueError):
    """Requested step exceeds the configured advective CFL allowance."""

    def __init__(self, dt, dx, v_max, cfl_limit):
        self.payload = {
            "error": "cfl_violation",
            "dt": dt, "dx": dx, "v_max": v_max,
            "cfl": dt * v_max / dx, "cfl_limit": cfl_limit,
        }
        super().__init__(
            f"dt {dt:.3e} gives CFL {dt * v_max / dx:.2f} > limit "
            f"{cfl_limit:.2f} (dx {dx:.3e}, v_max {v_max:.3f})")


class SolverDivergenceError(RuntimeError):
    """Non-finite values appeared during the march."""

    def __init__(self, step, time):
        self.step = step
        self.time = time
        super().__init__(f"solver diverged at step {step} (t = {time:.6g})")


def transport_weights(vs, shift_time, dx, nx):
    """Gather indices and cubic weights for one transport substep.

    Departure points x - v * shift_time are split into an exact integer
    cell shift and a fractional part interpolated with the 4-point
    Lagrange cubic.  The center weight is defined as one minus the other
    three, so the weights sum to 1 up to a single rounding and constants
    drift only at roundoff level per step.
    """
    s = np.asarray(vs, float) * shift_time / dx
    k = np.floor(s).astype(np.int64)
    theta = s - k
    xi = -theta
    w_m2 = (xi - xi**3) / 6.0
    w_m1 = (xi + 2.0) * xi * (xi - 1.0) / 2.0
    w_p1 = (xi + 2.0) * (xi + 1.0) * xi / 6.0
    w_0 = 1.0 - (w_m2 + w_m1 + w_p1)
    cols = np.arange(nx)[:, None]
    idx = [(cols - k[None, :] + m) % nx for m in (-2, -1, 0, 1)]
    weights = [w_m2, w_m1, w_0, w_p1]
    return idx, weights


def _apply_transport(f, idx, weights, cols):
    out = weights[0][None, :] * f[idx[0], cols]
    for m in range(1, 4):
        out += weights[m][None, :] * f[idx[m], cols]
    return out


def _thomas(lower, diag, upper, rhs):
    """Solve tridiagonal systems along the last axis, vectorized over x.

    All arguments have shape (nx, nv); lower[:, 0] and upper[:, -1] are
    ignored.
    """
    nv = diag.shape[1]
    cp = np.empty_like(diag)
    dp = np.empty_like(rhs)
    cp[:, 0] = upper[:, 0] / diag[:, 0]
    dp[:, 0] = rhs[:, 0] / diag[:, 0]
    for j in range(1, nv):
        denom = diag[:, j] - lower[:, j] * cp[:, j - 1]
        cp[:, j] = upper[:, j] / denom
        dp[:, j] = (rhs[:, j] - lower[:, j] * dp[:, j - 1]) / denom
    out = np.empty_like(rhs)
    out[:, -1] = dp[:, -1]
    for j in range(nv - 2, -1, -1):
        out[:, j] = dp[:, j] - cp[:, j] * out[:, j + 1]
    return out


def _diffusion_step(f, coef: CoefficientField, t_mid, xs, vs, dv, dt):
    nx, nv = f.shape
    X = xs[:, None]
    # harmonic mean of the cell diffusivities on interior v-faces
    a_cell = np.asarray(coef.diffusion(t_mid, X, vs[None, :]), float)
    a_face = np.zeros((nx, nv + 1))
    al = a_cell[:, :-1]
    ar = a_cell[:, 1:]
    a_face[:, 1:-1] = 2.0 * al * ar / (al + ar)
    b = np.asarray(coef.drift(t_mid, X, vs[None, :]), float)
    s = np.asarray(coef.source(t_mid, X, vs[None, :]), float)

    pos_b = np.maximum(b, 0.0)
    neg_b = np.maximum(-b, 0.0)
    # the upwind side is outside the grid at the walls: drop that part
    pos_b[:, -1] = 0.0
    neg_b[:, 0] = 0.0

    r = dt / dv**2
    q = dt / dv
    lower = -(r * a_face[:, :-1] + q * neg_b)
    upper = -(r * a_face[:, 1:] + q * pos_b)
    diag = 1.0 + r * (a_face[:, :-1] + a_face[:, 1:]) + q * (pos_b + neg_b)
    return _thomas(lower, diag, upper, f + dt * s)


def solve(f0, coef: CoefficientField, box: Box, nx, nv, nt, *, pad_x=1.0,
          pad_v=2.0, store_every=1, store_x=None, cfl_limit=4.0,
          check_every=25) -> GridFunction:
    """March the kinetic equation on the box and return stored slices.

    f0 is an (nx, nv) array or a callable f0(x, v); store_every thins
    the stored time slices (nt must be divisible by it); store_x, when
    given as (lo, hi), crops the stored x-range while the dynamics keep
    the full box.  The padding declares the boundary-contaminated strip
    recorded on the result.  Steps whose advective CFL number exceeds
    cfl_limit are refused; the interpolation itself is stable at any
    CFL, the limit only guards accuracy.
    """
    xs = centered_axis(box.x0, box.x1, nx)
    vs = centered_axis(box.v0, box.v1, nv)
    dx = float(xs[1] - xs[0])
    dv = float(vs[1] - vs[0])
    dt = (box.t1 - box.t0) / nt
    v_max = max(abs(box.v0), abs(box.v1))
    if dt * v_max / dx > cfl_limit:
        raise CFLViolationError(dt, dx, v_max, cfl_limit)
    if nt % store_every != 0:
        raise ValueError("store_every must divide nt")

    if callable(f0):
        f = np.asarray(f0(xs[:, None], vs[None, :]), dtype=float)
        f = np.broadcast_to(f, (nx, nv)).copy()
    else:
        f = np.array(f0, dtype=float)
        if f.shape != (nx, nv):
            raise ValueError(f"f0 shape {f.shape} != ({nx}, {nv})")

    if store_x is not None:
        keep = (xs >= store_x[0]) & (xs <= store_x[1])
        if not np.any(keep):
            raise ValueError("store_x keeps no columns")
    else:
        keep = slice(None)

    idx, weights = transport_weights(vs, 0.5 * dt, dx, nx)
    cols = np.arange(nv)[None, :]

    stored = [f[keep, :].copy()]
    times = [box.t0]
    for n in range(nt):
        t_mid = box.t0 + (n + 0.5) * dt
        f = _apply_transport(f, idx, weights, cols)
        f = _diffusion_step(f, coef, t_mid, xs, vs, dv, dt)
        f = _apply_transport(f, idx, weights, cols)
        if (n + 1) % check_every == 0 or n + 1 == nt:
            if not np.all(np.isfinite(f)):
                raise SolverDivergenceError(n + 1, box.t0 + (n + 1) * dt)
        if (n + 1) % store_every == 0:
            stored.append(f[keep, :].copy())
            times.append(box.t0 + (n + 1) * dt)

    meta = {
        "scheme": "strang_semilag_backward_euler",
        "coefficients": coef.describe(),
        "nx": nx, "nv": nv, "nt": nt,
        "dt": dt, "dx": dx, "dv": dv,
        "cfl": dt * v_max / dx,
        "store_every": store_every,
    }
    return GridFunction(np.asarray(times), xs[keep], vs,
                        np.stack(stored, axis=0), pad_x=pad_x, pad_v=pad_v,
                        solve_box=box, meta=meta)


def fit_order(hs, errors):
    """Least-squares slope of log error against log resolution."""
    hs = np.asarray(hs, float)
    errors = np.asarray(errors, float)
    if np.any(errors <= 0.0) or np.any(hs <= 0.0):
        raise ValueError("fit_order needs positive step sizes and errors")
    slope, _ = np.polyfit(np.log(hs), np.log(errors), 1)
    return float(slope)
