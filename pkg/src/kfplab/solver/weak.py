"""Weak sub/super-solution verification on gridded functions.

A function f is tested against the distributional inequality

    T beta(f) <= div_v (A grad_v beta(f)) + B . grad_v beta(f) + S beta'(f)

for nondecreasing convex hinge profiles beta, by integrating against a
basis of smooth compactly supported test functions phi >= 0:

    R(beta, phi) = - int beta(f) (T phi)
                   + int A grad_v beta(f) . grad_v phi
                   - int (B . grad_v beta(f) + S beta'(f)) phi

with T phi = d phi/dt + v d phi/dx computed analytically.  R <= 0 for
smooth sub-solutions; the discrete residual is compared against a
grid-scaled tolerance.  Super-solutions are verified through the
mirror identity: f is a super-solution iff -f is a sub-solution for
the source -S.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from ..geometry import PhasePoint, as_point
from ..kernel import translated_kernel_values
from .coefficients import CoefficientField
from .grid import GridFunction, sample_function

__all__ = ["TestBump", "HingeProfile", "default_test_basis",
           "default_hinges", "weak_residual", "WeakResidualReport",
           "indicator_subsolution", "translated_kernel_solution"]


def _profile(s):
    """C-infinity bump exp(1 - 1/(1 - s^2)) on (-1, 1), peak 1."""
    s = np.asarray(s, float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
    return out


def _profile_deriv(s):
    s = np.asarray(s, float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = (np.exp(1.0 - 1.0 / (1.0 - si * si))
                   * (-2.0 * si) / (1.0 - si * si) ** 2)
    return out


@dataclasses.dataclass(frozen=True)
class TestBump:
    """Tensor product C-infinity test function with box support."""

    __test__ = False  # not a pytest collection target

    center: tuple
    widths: tuple

    def _s(self, T, X, V):
        (tc, xc, vc) = self.center
        (wt, wx, wv) = self.widths
        return (T - tc) / wt, (X - xc) / wx, (V - vc) / wv

    def value(self, T, X, V):
        st, sx, sv = self._s(T, X, V)
        return _profile(st) * _profile(sx) * _profile(sv)

    def transport(self, T, X, V):
        """T phi = d/dt phi + v d/dx phi, analytic."""
        st, sx, sv = self._s(T, X, V)
        pt, px, pv = _profile(st), _profile(sx), _profile(sv)
        dt = _profile_deriv(st) / self.widths[0]
        dx = _profile_deriv(sx) / self.widths[1]
        return dt * px * pv + V * pt * dx * pv

    def grad_v(self, T, X, V):
        st, sx, sv = self._s(T, X, V)
        return _profile(st) * _profile(sx) * _profile_deriv(sv) / self.widths[2]

    def support(self):
        (tc, xc, vc) = self.center
        (wt, wx, wv) = self.widths
        return ((tc - wt, tc + wt), (xc - wx, xc + wx), (vc - wv, vc + wv))

    def describe(self):
        return {"center": list(self.center), "widths": list(self.widths)}


@dataclasses.dataclass(frozen=True)
class HingeProfile:
    """Softplus hinge beta(s) = eta log(1 + exp((s - c) / eta)).

    Nondecreasing and convex for every width eta > 0; converges to the
    ramp (s - c)_+ as eta -> 0.
    """

    threshold: float
    width: float

    def value(self, s):
        z = (np.asarray(s, float) - self.threshold) / self.width
        return self.width * np.logaddexp(0.0, z)

    def deriv(self, s):
        z = (np.asarray(s, float) - self.threshold) / self.width
        out = np.empty_like(z)
        np.exp(-np.logaddexp(0.0, -z), out=out)
        return out

    def describe(self):
        return {"threshold": self.threshold, "width": self.width}


def default_test_basis(region, n=(2, 3, 3)):
    """Bumps tiling a box region ((t0,t1),(x0,x1),(v0,v1)).

    Centers sit on an n-point lattice per axis and widths equal the
    center spacing, so every support stays strictly inside the region
    while neighbouring supports overlap.
    """
    (t0, t1), (x0, x1), (v0, v1) = region
    nt, nx, nv = n
    bumps = []

    def centers(lo, hi, m):
        w = (hi - lo) / (m + 1)
        return [lo + w * (i + 1) for i in range(m)], w

    tcs, wt = centers(t0, t1, nt)
    xcs, wx = centers(x0, x1, nx)
    vcs, wv = centers(v0, v1, nv)
    for tc in tcs:
        for xc in xcs:
            for vc in vcs:
                bumps.append(TestBump((tc, xc, vc), (wt, wx, wv)))
    return bumps


def default_hinges(f_min, f_max, n_thresholds=5, rel_widths=(0.03, 0.1, 0.3)):
    """Hinges whose thresholds span the observed range of f."""
    span = max(f_max - f_min, 1e-12)
    thresholds = f_min + span * (np.arange(n_thresholds) + 0.5) / n_thresholds
    return [HingeProfile(float(c), float(w * span))
            for c in thresholds for w in rel_widths]


@dataclasses.dataclass
class WeakResidualReport:
    max_residual: float
    tolerance: float
    passed: bool
    direction: str
    worst_pair: dict
    n_pairs: int
    residuals: list

    def to_json_dict(self):
        return dataclasses.asdict(self)


def _grad_v(values, dv):
    """Centered differences inside, one-sided at the v walls."""
    g = np.empty_like(values)
    g[..., 1:-1] = (values[..., 2:] - values[..., :-2]) / (2.0 * dv)
    g[..., 0] = (values[..., 1] - values[..., 0]) / dv
    g[..., -1] = (values[..., -1] - values[..., -2]) / dv
    return g


def weak_residual(f: GridFunction, coef: CoefficientField, *, betas=None,
                  phis=None, tolerance=None, direction="sub",
                  region=None) -> WeakResidualReport:
    """Max weak residual of f over a (beta, phi) basis.

    direction "sub" tests the sub-solution inequality, "super" the
    mirrored one.  Test supports must stay inside the safe box (or the
    explicitly passed region); bumps violating that are rejected.
    Positive residuals beyond the tolerance mean the inequality fails.
    """
    if direction not in ("sub", "super"):
        raise ValueError("direction must be 'sub' or 'super'")
    sgn = 1.0 if direction == "sub" else -1.0

    safe = f.safe_box
    if region is None:
        region = ((float(f.times[0]), float(f.times[-1])),
                  (safe.x0, safe.x1), (safe.v0, safe.v1))
    if phis is None:
        phis = default_test_basis(region)
    if betas is None:
        vals = sgn * f.values
        betas = default_hinges(float(vals.min()), float(vals.max()))
    if tolerance is None:
        from ..calibration import grid_tolerance
        tolerance = grid_tolerance(f.dt, f.dx, f.dv)

    for phi in phis:
        (ta, tb), (xa, xb), (va, vb) = phi.support()
        ok = (ta >= f.times[0] - 1e-9 and tb <= f.times[-1] + 1e-9
              and xa >= safe.x0 - 1e-9 and xb <= safe.x1 + 1e-9
              and va >= safe.v0 - 1e-9 and vb <= safe.v1 + 1e-9)
        if not ok:
            raise ValueError(
                f"test bump support {phi.support()} leaves the safe box")

    measure = f.cell_measure
    fv = sgn * f.values

    # evaluate each bump only on the index sub-box covering its support
    def axis_slice(axis, lo, hi):
        i0 = int(np.searchsorted(axis, lo, side="left"))
        i1 = int(np.searchsorted(axis, hi, side="right"))
        return slice(max(i0, 0), min(i1, axis.size))

    phi_data = []
    for phi in phis:
        (ta, tb), (xa, xb), (va, vb) = phi.support()
        sl = (axis_slice(f.times, ta, tb), axis_slice(f.xs, xa, xb),
              axis_slice(f.vs, va, vb))
        T, X, V = np.meshgrid(f.times[sl[0]], f.xs[sl[1]], f.vs[sl[2]],
                              indexing="ij", copy=False)
        A = np.asarray(coef.diffusion(T, X, V), float)
        B = np.asarray(coef.drift(T, X, V), float)
        S = sgn * np.asarray(coef.source(T, X, V), float)
        phi_data.append((sl, phi.transport(T, X, V), phi.value(T, X, V),
                         phi.grad_v(T, X, V), A, B, S))

    rows = []
    worst = None
    for beta in betas:
        bf = beta.value(fv)
        bprime = beta.deriv(fv)
        gbf = _grad_v(bf, f.dv)
        for k, (sl, tphi, pval, gphi, A, B, S) in enumerate(phi_data):
            bfs = bf[sl]
            r = measure * float(np.sum(-bfs * tphi + A * gbf[sl] * gphi
                                       - (B * gbf[sl] + S * bprime[sl])
                                       * pval))
            rows.append({"beta": beta.describe(), "phi_index": k,
                         "residual": r})
            if worst is None or r > worst["residual"]:
                worst = rows[-1]
    max_res = worst["residual"] if rows else 0.0
    return WeakResidualReport(
        max_residual=float(max_res),
        tolerance=float(tolerance),
        passed=bool(max_res <= tolerance),
        direction=direction,
        worst_pair=dict(worst) if worst else {},
        n_pairs=len(rows),
        residuals=rows,
    )


def indicator_subsolution(c, a, times, xs, vs, pad_x=0.0,
                          pad_v=0.0) -> GridFunction:
    """Sampled traveling half-space indicator 1_{x + c t < a}.

    A weak sub-solution of the source-free equation whenever |c| is at
    least the sup of |v| over the region where it is tested, since its
    only distributional contribution is -(c + v) times a surface
    measure on the discontinuity line.
    """
    gf = sample_function(
        lambda T, X, V: (X + c * T < a).astype(float) + 0.0 * V,
        times, xs, vs, pad_x=pad_x, pad_v=pad_v,
        meta={"scheme": "indicator", "speed": c, "offset": a})
    return gf


def translated_kernel_solution(z0, times, xs, vs, pad_x=0.0,
                               pad_v=0.0) -> GridFunction:
    """Exact positive solution: the kernel translated to emanate from z0."""
    z0 = as_point(z0)
    gf = sample_function(
        lambda T, X, V: translated_kernel_values(z0, T, X, V),
        times, xs, vs, pad_x=pad_x, pad_v=pad_v,
        meta={"scheme": "translated_kernel",
              "pole": [z0.t, z0.x.tolist(), z0.v.tolist()]})
    return gf
