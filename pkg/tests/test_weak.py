"""Weak sub/super-solution residual machinery."""

import json

import numpy as np
import pytest

from kfplab.geometry import PhasePoint
from kfplab.solver import (
    Box,
    HingeProfile,
    TestBump,
    constant_coefficients,
    default_hinges,
    default_test_basis,
    indicator_subsolution,
    make_rough_coefficients,
    solve,
    translated_kernel_solution,
    weak_residual,
)
from kfplab.solver.grid import centered_axis


def _axes(t0, t1, nt, x0, x1, nx, v0, v1, nv):
    dt = (t1 - t0) / nt
    times = t0 + dt * (np.arange(nt) + 1.0)
    return times, centered_axis(x0, x1, nx), centered_axis(v0, v1, nv)


# ---------------------------------------------------------------- hinges


def test_hinge_monotone_and_convex():
    beta = HingeProfile(0.3, 0.05)
    s = np.linspace(-2.0, 2.0, 4001)
    vals = beta.value(s)
    der = beta.deriv(s)
    assert np.all(np.diff(vals) >= 0.0)
    assert np.all(der >= 0.0) and np.all(der <= 1.0)
    # convexity: derivative nondecreasing
    assert np.all(np.diff(der) >= 0.0)


def test_hinge_derivative_consistent():
    beta = HingeProfile(-0.2, 0.11)
    s = np.linspace(-1.5, 1.5, 301)
    h = 1e-6
    fd = (beta.value(s + h) - beta.value(s - h)) / (2.0 * h)
    assert np.max(np.abs(fd - beta.deriv(s))) < 1e-8


@pytest.mark.parametrize("width", [0.1, 0.01, 0.001])
def test_hinge_ramp_limit(width):
    beta = HingeProfile(0.4, width)
    s = np.linspace(-2.0, 2.0, 2001)
    ramp = np.maximum(s - 0.4, 0.0)
    gap = np.abs(beta.value(s) - ramp)
    # softplus exceeds the ramp by at most width * log 2, at the kink
    assert np.max(gap) <= width * np.log(2.0) + 1e-12
    assert abs(beta.value(0.4) - width * np.log(2.0)) < 1e-12


def test_hinge_extreme_arguments_stable():
    beta = HingeProfile(0.0, 0.01)
    big = np.array([-1e5, -1e2, 1e2, 1e5])
    vals = beta.value(big)
    der = beta.deriv(big)
    assert np.all(np.isfinite(vals)) and np.all(np.isfinite(der))
    assert vals[0] == 0.0 and der[0] == 0.0
    assert der[-1] == 1.0
    assert abs(vals[-1] - 1e5) < 1e-9


# ------------------------------------------------------------ test bumps


def test_bump_support_and_peak():
    phi = TestBump((0.0, 0.5, -1.0), (0.2, 0.3, 0.4))
    assert phi.value(0.0, 0.5, -1.0) == pytest.approx(1.0)
    # dies outside the support box, including exactly on the edge
    assert phi.value(0.2, 0.5, -1.0) == 0.0
    assert phi.value(0.0, 0.81, -1.0) == 0.0
    assert phi.value(0.0, 0.5, -1.41) == 0.0
    # strictly positive strictly inside
    assert phi.value(0.1, 0.4, -0.8) > 0.0
    # flat approach to the edge
    assert phi.value(0.199, 0.5, -1.0) < 1e-30


def test_bump_transport_matches_finite_differences():
    phi = TestBump((0.1, -0.2, 0.3), (0.5, 0.7, 0.9))
    rng = np.random.default_rng(7)
    T = 0.1 + 0.35 * (2.0 * rng.random(40) - 1.0)
    X = -0.2 + 0.5 * (2.0 * rng.random(40) - 1.0)
    V = 0.3 + 0.6 * (2.0 * rng.random(40) - 1.0)
    h = 1e-5
    fd_t = (phi.value(T + h, X, V) - phi.value(T - h, X, V)) / (2.0 * h)
    fd_x = (phi.value(T, X + h, V) - phi.value(T, X - h, V)) / (2.0 * h)
    fd_v = (phi.value(T, X, V + h) - phi.value(T, X, V - h)) / (2.0 * h)
    assert np.max(np.abs(fd_t + V * fd_x - phi.transport(T, X, V))) < 1e-6
    assert np.max(np.abs(fd_v - phi.grad_v(T, X, V))) < 1e-6


def test_default_basis_tiles_strictly_inside():
    region = ((-1.0, 0.0), (-2.0, 2.0), (-3.0, 3.0))
    bumps = default_test_basis(region, n=(2, 3, 3))
    assert len(bumps) == 18
    for phi in bumps:
        (ta, tb), (xa, xb), (va, vb) = phi.support()
        assert ta >= -1.0 and tb <= 0.0
        assert xa >= -2.0 and xb <= 2.0
        assert va >= -3.0 and vb <= 3.0


def test_default_hinges_span_range():
    betas = default_hinges(-1.0, 3.0)
    assert len(betas) == 15
    cs = sorted({b.threshold for b in betas})
    assert cs[0] > -1.0 and cs[-1] < 3.0
    assert all(b.width > 0 for b in betas)


# ------------------------------------------------------- residual checks


def test_kernel_solution_weak_both_directions():
    # exact solution of the unit-diffusion equation: both inequalities hold
    times, xs, vs = _axes(-0.4, 0.0, 40, -1.2, 1.2, 96, -2.0, 2.0, 96)
    f = translated_kernel_solution(PhasePoint(-1.0, 0.0, 0.0),
                                   times, xs, vs)
    coef = constant_coefficients(1.0, 0.0, 0.0)
    for direction in ("sub", "super"):
        rep = weak_residual(f, coef, direction=direction)
        assert rep.passed, (direction, rep.max_residual, rep.tolerance)
        assert rep.max_residual <= rep.tolerance


def test_solver_output_weak_both_directions():
    # numerical solution with rough coefficients passes both directions
    coef = make_rough_coefficients(3, lam=0.25, Lam=1.0, cell_size=0.08)
    box = Box(0.0, 0.3, -1.0, 1.0, -1.5, 1.5)
    f0 = lambda x, v: np.exp(-4.0 * x**2 - 2.0 * v**2)
    f = solve(f0, coef, box, nx=160, nv=96, nt=60, pad_x=0.4, pad_v=0.5)
    for direction in ("sub", "super"):
        rep = weak_residual(f, coef, direction=direction)
        assert rep.passed, (direction, rep.max_residual, rep.tolerance)


def test_indicator_is_subsolution_but_not_super():
    # fast-moving half-space indicator: genuine sub-solution, and the
    # mirrored test must fail with a wide margin (negative control)
    times, xs, vs = _axes(-0.5, 0.0, 80, -1.0, 1.0, 160, -1.0, 1.0, 80)
    f = indicator_subsolution(1.2, 0.1, times, xs, vs)
    coef = constant_coefficients(0.5, 0.0, 0.0)
    sub = weak_residual(f, coef, direction="sub")
    assert sub.passed
    sup = weak_residual(f, coef, direction="super")
    assert not sup.passed
    assert sup.max_residual >= 10.0 * sup.tolerance


def test_slow_indicator_fails_subsolution():
    # |c| below the sampled velocities: the surface term changes sign
    # on part of the line and the sub-solution inequality breaks
    times, xs, vs = _axes(-0.5, 0.0, 80, -1.0, 1.0, 160, -1.0, 1.0, 80)
    f = indicator_subsolution(0.3, 0.05, times, xs, vs)
    coef = constant_coefficients(0.5, 0.0, 0.0)
    rep = weak_residual(f, coef, direction="sub")
    assert not rep.passed
    assert rep.max_residual >= 2.0 * rep.tolerance


def test_weak_residual_rejects_bump_outside_safe_box():
    times, xs, vs = _axes(-0.4, 0.0, 20, -1.0, 1.0, 48, -1.0, 1.0, 48)
    f = translated_kernel_solution(PhasePoint(-1.0, 0.0, 0.0),
                                   times, xs, vs, pad_x=0.3, pad_v=0.3)
    coef = constant_coefficients(1.0, 0.0, 0.0)
    bad = TestBump((-0.2, 0.85, 0.0), (0.1, 0.1, 0.2))
    with pytest.raises(ValueError, match="safe box"):
        weak_residual(f, coef, phis=[bad])


def test_weak_residual_direction_validated():
    times, xs, vs = _axes(-0.2, 0.0, 10, -1.0, 1.0, 24, -1.0, 1.0, 24)
    f = indicator_subsolution(1.2, 0.0, times, xs, vs)
    with pytest.raises(ValueError, match="direction"):
        weak_residual(f, constant_coefficients(1.0, 0.0, 0.0),
                      direction="sideways")


def test_custom_basis_and_report_roundtrip():
    times, xs, vs = _axes(-0.4, 0.0, 20, -1.0, 1.0, 48, -1.0, 1.0, 48)
    f = indicator_subsolution(1.2, 0.1, times, xs, vs)
    coef = constant_coefficients(0.5, 0.0, 0.0)
    beta = HingeProfile(0.5, 0.05)
    phi = TestBump((-0.2, 0.0, 0.0), (0.15, 0.5, 0.5))
    rep = weak_residual(f, coef, betas=[beta], phis=[phi], tolerance=1e-2)
    assert rep.n_pairs == 1
    assert rep.tolerance == 1e-2
    blob = json.dumps(rep.to_json_dict())
    back = json.loads(blob)
    assert back["direction"] == "sub"
    assert back["worst_pair"]["beta"]["threshold"] == 0.5
    assert len(back["residuals"]) == 1
