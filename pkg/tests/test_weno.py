import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multideriv.models import Advection, BuckleyLeverett, Euler, ShallowWater
from multideriv.weno import (
    GHOST,
    FdGrid,
    WenoOperator,
    WenoParams,
    _interface_fluxes,
    central_difference,
    compute_qt,
    fill_ghosts,
    smoothness_indicators,
    weno5_minus,
    weno5_plus,
    weno_md_stage,
    weno_weights,
)

MODES = ("z", "js", "linear")


def test_z_weights_hand_computed():
    # beta = (1, 2, 4): tau = 3, alpha_k = d_k (1 + (3 / beta_k)^2)
    w = weno_weights(np.array([1.0, 2.0, 4.0]), WenoParams("z", eps=1e-300))
    raw = np.array([0.1 * 10.0, 0.6 * 3.25, 0.3 * 1.5625])
    np.testing.assert_allclose(w, raw / raw.sum(), rtol=1e-15)


def test_js_weights_hand_computed():
    w = weno_weights(np.array([1.0, 2.0, 4.0]), WenoParams("js", eps=1e-300))
    raw = np.array([0.1, 0.6 / 4, 0.3 / 16])
    np.testing.assert_allclose(w, raw / raw.sum(), rtol=1e-15)


@pytest.mark.parametrize("mode", MODES)
def test_weights_normalised(mode):
    beta = np.random.default_rng(3).exponential(size=(3, 10_000)) ** 3
    w = weno_weights(beta, WenoParams(mode))
    assert np.all(w >= 0)
    np.testing.assert_allclose(w.sum(axis=0), 1.0, rtol=1e-14)


@pytest.mark.parametrize("mode", ["z", "js"])
def test_step_switches_off_crossing_stencils(mode):
    # jump between h2 and h3: only the left stencil is smooth
    h = [1.0, 1.0, 1.0, 0.0, 0.0]
    w = weno_weights(smoothness_indicators(h), WenoParams(mode))
    assert w[0] > 1 - 1e-6
    assert weno5_plus(h, WenoParams(mode)) == pytest.approx(1.0, abs=1e-6)


def test_smoothness_indicators_vanish_on_constants():
    assert np.all(smoothness_indicators([2.0] * 5) == 0)


def _quartic_averages(c, dx):
    P = np.polynomial.Polynomial(c).integ()
    return [(P((k + 1) * dx) - P(k * dx)) / dx for k in range(-2, 3)]


def test_quartic_cell_averages_reconstructed_exactly():
    # exact antiderivative as oracle; the interface sits at x = dx
    c = [0.3, -1.2, 0.5, 0.7, -0.25]
    got = weno5_plus(_quartic_averages(c, 1.0), WenoParams("linear"))
    assert got == pytest.approx(np.polynomial.Polynomial(c)(1.0), abs=1e-12)


@pytest.mark.parametrize("mode", ["z", "js"])
def test_nonlinear_weights_close_on_resolved_data(mode):
    c = [0.3, -1.2, 0.5, 0.7, -0.25]
    dx = 1e-2
    got = weno5_plus(_quartic_averages(c, dx), WenoParams(mode))
    assert got == pytest.approx(np.polynomial.Polynomial(c)(dx), abs=1e-7)


def test_minus_is_mirror_image():
    h = [0.2, 0.9, -0.3, 1.4, 0.1]
    assert weno5_minus(h) == weno5_plus(h[::-1])


def _oracle_fluxes(qg, model, params, lo, hi, alpha):
    """Interface fluxes with numpy reconstruction, one interface at a time."""
    fg = model.flux(qg)
    out = []
    for i in range(lo, hi):
        es = model.eigensystem(0.5 * (qg[i] + qg[i - 1]))
        Rinv = es.Rinv if model.m > 1 else np.ones((1, 1))
        R = es.R if model.m > 1 else np.ones((1, 1))
        w = qg[i - 3:i + 3] @ Rinv.T
        g = fg[i - 3:i + 3] @ Rinv.T
        gp, gm = 0.5 * (g + alpha * w), 0.5 * (g - alpha * w)
        out.append(R @ (weno5_plus(gp[0:5], params) + weno5_minus(gm[1:6], params)))
    return np.array(out)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(MODES),
       st.sampled_from(["advection", "bl", "swe", "euler"]))
def test_kernel_matches_numpy_oracle(seed, mode, which):
    rng = np.random.default_rng(seed)
    n = 20
    if which == "swe":
        model = ShallowWater()
        h = rng.uniform(0.5, 2, n)
        qg = np.stack([h, h * rng.uniform(-1, 1, n)], -1)
    elif which == "euler":
        model = Euler()
        qg = model.conserved(np.stack([rng.uniform(0.2, 2, n), rng.uniform(-1, 1, n),
                                       rng.uniform(0.2, 2, n)], -1))
    else:
        model = Advection() if which == "advection" else BuckleyLeverett()
        qg = rng.uniform(0, 1, (n, 1))
    params = WenoParams(mode)
    fhat, alpha = _interface_fluxes(qg, model, params, 3, n - 2, None)
    np.testing.assert_allclose(fhat, _oracle_fluxes(qg, model, params, 3, n - 2, alpha),
                               rtol=1e-12, atol=1e-12)


def _qt_error(mx, mode):
    grid = FdGrid(0.0, 1.0, mx)
    q = np.sin(2 * np.pi * grid.x)[:, None]
    qt, _ = compute_qt(fill_ghosts(q, GHOST, "periodic"), grid.dx, Advection(), WenoParams(mode))
    return np.max(np.abs(qt[2:-2, 0] + 2 * np.pi * np.cos(2 * np.pi * grid.x)))


@pytest.mark.parametrize("mode", ["linear", "z"])
def test_fifth_order_spatial_derivative(mode):
    e1, e2 = _qt_error(40, mode), _qt_error(80, mode)
    assert math.log2(e1 / e2) >= 4.9


def test_central_difference_fourth_order():
    errs = []
    for n in (32, 64):
        x = np.arange(-2, n + 2) / n
        errs.append(np.max(np.abs(central_difference(np.sin(x), 1 / n) - np.cos(x[2:-2]))))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(4.0, abs=0.1)


def _random_state(model, mx, rng):
    if model.m == 1:
        return rng.uniform(0, 1, (mx, 1))
    if model.m == 2:
        h = rng.uniform(0.5, 2.0, mx)
        return np.stack([h, h * rng.uniform(-0.5, 0.5, mx)], -1)
    return model.conserved(np.stack([rng.uniform(0.5, 2, mx), rng.uniform(-0.5, 0.5, mx),
                                     rng.uniform(0.5, 2, mx)], -1))


@pytest.mark.parametrize("model", [Advection(), BuckleyLeverett(), ShallowWater(), Euler()],
                         ids=lambda m: m.name)
def test_stage_conserves_totals(model):
    rng = np.random.default_rng(11)
    op = WenoOperator(model, FdGrid(0.0, 1.0, 64), "periodic")
    qn = _random_state(model, 64, rng)
    stages = [op.derivatives(_random_state(model, 64, rng)) for _ in range(2)]
    for _ in range(20):
        a, b = rng.normal(size=2), rng.normal(size=2)
        q = op.md_stage(qn, [(a[0], b[0], stages[0]), (a[1], b[1], stages[1])], 1e-3)
        np.testing.assert_allclose(q.sum(0), qn.sum(0), rtol=1e-12)


@pytest.mark.parametrize("model", [Advection(), BuckleyLeverett(), ShallowWater(), Euler()],
                         ids=lambda m: m.name)
def test_constant_state_is_fixed_point(model):
    const = {1: [0.4], 2: [1.2, 0.3], 3: list(Euler().conserved(np.array([1.0, 0.5, 1.0])))}
    q = np.tile(const[model.m], (40, 1))
    op = WenoOperator(model, FdGrid(0.0, 1.0, 40), "periodic")
    s = op.derivatives(q)
    out = op.md_stage(q, [(0.7, 0.2, s)], 0.01)
    np.testing.assert_allclose(out, q, rtol=1e-14, atol=1e-14)


def test_fill_ghosts():
    q = np.arange(12.0)[:, None]
    per = fill_ghosts(q, 5, "periodic")
    assert per[:5, 0].tolist() == [7, 8, 9, 10, 11] and per[-5:, 0].tolist() == [0, 1, 2, 3, 4]
    out = fill_ghosts(q, 5, "outflow")
    assert out[:5, 0].tolist() == [0] * 5 and out[-5:, 0].tolist() == [11] * 5
    with pytest.raises(ValueError):
        fill_ghosts(q, 5, "reflective")


def test_md_stage_zero_dt_is_identity():
    op = WenoOperator(Advection(), FdGrid(0.0, 1.0, 20), "periodic")
    q = np.random.default_rng(0).uniform(size=(20, 1))
    assert np.array_equal(op.md_stage(q, [(1.0, 0.5, op.derivatives(q))], 0.0), q)


def test_md_stage_shape_mismatch():
    with pytest.raises(ValueError):
        weno_md_stage(np.zeros((10, 1)), [(1.0, 0.0, np.zeros((12, 1)), None)], 0.1)


def test_grid_and_params_validate():
    with pytest.raises(ValueError):
        FdGrid(0.0, 1.0, 5)
    with pytest.raises(ValueError):
        WenoParams(mode="eno")
