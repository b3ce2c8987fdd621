import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multideriv.models import (
    Advection,
    BuckleyLeverett,
    Euler,
    ShallowWater,
    StateError,
    make_model,
)


def _fd_jacobian(model, q, h=1e-6):
    m = model.m
    J = np.empty((m, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        J[:, j] = (model.flux(q + e) - model.flux(q - e)) / (2 * h)
    return J


swe_states = st.tuples(st.floats(0.1, 5.0), st.floats(-3.0, 3.0)).map(
    lambda t: np.array([t[0], t[0] * t[1]]))
euler_states = st.tuples(st.floats(0.1, 5.0), st.floats(-3.0, 3.0), st.floats(0.1, 5.0)).map(
    lambda t: Euler().conserved(np.array(t)))
bl_states = st.floats(0.0, 1.0).map(lambda q: np.array([q]))


@settings(max_examples=60, deadline=None)
@given(st.one_of(swe_states.map(lambda q: (ShallowWater(), q)),
                 euler_states.map(lambda q: (Euler(), q)),
                 bl_states.map(lambda q: (BuckleyLeverett(), q))))
def test_jacobian_matches_finite_differences(case):
    model, q = case
    scale = max(1.0, float(np.abs(model.jacobian(q)).max()))
    np.testing.assert_allclose(model.jacobian(q), _fd_jacobian(model, q), atol=1e-6 * scale)


@settings(max_examples=60, deadline=None)
@given(st.one_of(swe_states.map(lambda q: (ShallowWater(), q)),
                 euler_states.map(lambda q: (Euler(), q))))
def test_eigensystem_diagonalises_jacobian(case):
    model, q = case
    es = model.eigensystem(q)
    np.testing.assert_allclose(es.R @ es.Rinv, np.eye(model.m), atol=1e-10)
    D = es.Rinv @ model.jacobian(q) @ es.R
    scale = max(1.0, float(np.abs(es.lam).max()))
    np.testing.assert_allclose(D, np.diag(es.lam), atol=1e-10 * scale)
    assert np.all(np.diff(es.lam) > 0)


def test_eigensystem_broadcasts():
    q = Euler().conserved(np.array([[1.0, 0.5, 1.0], [0.2, -1.0, 0.3]]))
    es = Euler().eigensystem(q)
    assert es.R.shape == (2, 3, 3) and es.lam.shape == (2, 3)


def test_buckley_leverett_speed_bound():
    assert BuckleyLeverett().speed_bound == pytest.approx(2.205737062, abs=1e-8)
    grid = np.linspace(0, 1, 200001)
    assert BuckleyLeverett().dflux(grid).max() <= BuckleyLeverett().speed_bound + 1e-12


def test_buckley_leverett_flux_values():
    bl = BuckleyLeverett()
    assert bl.flux(np.array([0.5]))[0] == pytest.approx(0.75)
    assert bl.dflux(np.array([0.0, 1.0])).tolist() == [0.0, 0.0]


def test_shallow_water_dam_break_speed():
    # |u| + sqrt(g h) at rest with h = 3
    assert ShallowWater().max_abs_speed(np.array([3.0, 0.0])) == pytest.approx(np.sqrt(3.0))


def test_euler_primitive_round_trip():
    prim = np.array([[1.0, 0.75, 1.0], [0.125, -0.3, 0.1]])
    np.testing.assert_allclose(Euler().primitive(Euler().conserved(prim)), prim)


def test_negative_depth_rejected():
    with pytest.raises(StateError) as info:
        ShallowWater().flux(np.array([[1.0, 0.0], [-0.5, 0.0]]))
    assert info.value.component == "h" and info.value.index == (1,)


def test_negative_pressure_rejected():
    q = np.array([1.0, 2.0, 1.0])  # E < rho u^2 / 2
    with pytest.raises(StateError) as info:
        Euler().eigensystem(q)
    assert info.value.component == "p"


def test_advection():
    q = np.array([[0.2], [1.5]])
    np.testing.assert_array_equal(Advection().flux(q), q)
    assert Advection().max_abs_speed(q).tolist() == [1.0, 1.0]


def test_make_model():
    assert isinstance(make_model("euler", gamma=5 / 3), Euler)
    with pytest.raises(ValueError, match="unknown model"):
        make_model("mhd")


def _random_states(model, n, rng):
    if isinstance(model, ShallowWater):
        h = rng.uniform(0.1, 5.0, n)
        return np.stack([h, h * rng.uniform(-3, 3, n)], axis=-1)
    if isinstance(model, Euler):
        prim = np.stack([rng.uniform(0.1, 5, n), rng.uniform(-3, 3, n), rng.uniform(0.1, 5, n)], -1)
        return model.conserved(prim)
    return rng.uniform(0.0, 1.0, (n, 1))


@pytest.mark.parametrize("model", [Advection(), BuckleyLeverett(), ShallowWater(), Euler()],
                         ids=lambda m: m.name)
def test_thousand_random_states(model):
    rng = np.random.default_rng(7)
    q = _random_states(model, 1000, rng)
    h = 1e-6
    J = model.jacobian(q)
    for j in range(model.m):
        e = np.zeros(model.m)
        e[j] = h
        col = (model.flux(q + e) - model.flux(q - e)) / (2 * h)
        scale = np.maximum(1.0, np.abs(J).max(axis=(-1, -2)))[:, None]
        assert np.all(np.abs(col - J[..., j]) <= 1e-6 * scale)
    es = model.eigensystem(q)
    eye = np.broadcast_to(np.eye(model.m), es.R.shape)
    np.testing.assert_allclose(es.R @ es.Rinv, eye, atol=1e-10)
    np.testing.assert_allclose(es.Rinv @ es.R, eye, atol=1e-10)
    # stencil values survive the characteristic round trip
    w = rng.normal(size=q.shape)
    back = np.einsum("nij,njk,nk->ni", es.R, es.Rinv, w)
    np.testing.assert_allclose(back, w, rtol=1e-12, atol=1e-12)


def test_buckley_leverett_flux_monotone():
    q = np.linspace(0.0, 1.0, 10_000)
    assert np.all(BuckleyLeverett().dflux(q) >= 0)
    assert np.all(np.diff(BuckleyLeverett().flux(q)) >= 0)
