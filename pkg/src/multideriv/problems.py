"""Benchmark problems, exact solutions and error norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .dg import DgGrid, evaluate, gauss_rule
from .models import (
    Advection,
    BuckleyLeverett,
    Euler,
    FluxModel,
    ShallowWater,
)

__all__ = [
    "PROBLEMS",
    "ProblemSpec",
    "bell_ic",
    "bl_shock_states",
    "dam_break_middle_state",
    "dg_l1_error",
    "dg_relative_l2",
    "error_norm",
    "exact_advection",
    "exact_buckley_leverett",
    "exact_dam_break",
    "fd_l1_error",
    "fd_relative_l2",
    "make_problem",
]

# DG CFL pairs (nu, nu_max) per integrator
DG_CFL = {
    "ssprk3": (0.125, 0.130),
    "rk4": (0.125, 0.130),
    "tdrk4": (0.08, 0.085),
}
DG_CFL_DEFAULT = (0.08, 0.085)
FD_CFL_MAX = 1.0


@dataclass
class ProblemSpec:
    name: str
    model: FluxModel
    domain: tuple[float, float]
    bc: str
    t_final: float
    ic: Callable[[np.ndarray], np.ndarray]
    exact: Callable[[float, np.ndarray], np.ndarray] | None = None
    fd_cfl: float = 0.4
    #: fixed global splitting speed for WENO, if the problem prescribes one
    fd_alpha: float | None = None
    riemann: str = "llf"
    limiter: bool = True
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.t_final > 0:
            raise ValueError("t_final must be positive")

    def cfl(self, space: str, integrator: str) -> tuple[float, float]:
        if space == "weno":
            return self.fd_cfl, FD_CFL_MAX
        return DG_CFL.get(integrator, DG_CFL_DEFAULT)


def _column(v):
    return np.asarray(v, dtype=float)[:, None]


# ---------------------------------------------------------------------------
# linear advection


def _sine(x):
    return np.sin(np.pi * np.asarray(x, dtype=float))


BELL = dict(a=0.5, z=-0.7, delta=0.005, alpha=10.0)
BELL["beta"] = math.log10(2.0) / (36.0 * BELL["delta"] ** 2)


def bell_ic(x):
    """Four shapes of decreasing smoothness on [-1, 1]."""
    x = np.asarray(x, dtype=float)
    a, z, d, al, be = BELL["a"], BELL["z"], BELL["delta"], BELL["alpha"], BELL["beta"]

    def G(x, z):
        return np.exp(-be * (x - z) ** 2)

    def F(x, a):
        return np.sqrt(np.maximum(1.0 - al * al * (x - a) ** 2, 0.0))

    out = np.zeros_like(x)
    m = (x >= -0.8) & (x <= -0.6)
    out[m] = (G(x[m], z - d) + G(x[m], z + d) + 4.0 * G(x[m], z)) / 6.0
    m = (x >= -0.4) & (x <= -0.2)
    out[m] = 1.0
    m = (x >= 0.0) & (x <= 0.2)
    out[m] = 1.0 - np.abs(10.0 * (x[m] - 0.1))
    m = (x >= 0.4) & (x <= 0.6)
    out[m] = (F(x[m], a - d) + F(x[m], a + d) + 4.0 * F(x[m], a)) / 6.0
    return out


def exact_advection(t, x, q0=_sine):
    """Unit-speed transport of ``q0`` on the periodic interval [-1, 1]."""
    xs = np.mod(np.asarray(x, dtype=float) - t + 1.0, 2.0) - 1.0
    return q0(xs)


# ---------------------------------------------------------------------------
# Buckley-Leverett


def bl_shock_states(M: float = 1.0 / 3.0, tol: float = 1e-12) -> tuple[float, float]:
    """Post-shock states for the (0 | 1) and (1 | 0) Riemann problems.

    Each solves f'(q*) (q* - q_c) = f(q*) - f(q_c), with q_c = 1 and 0.
    """
    model = BuckleyLeverett(M)
    f, df = model.flux, model.dflux
    q_infl = _bl_inflection(model)

    def tangency(qc):
        return lambda q: float(df(q) * (q - qc) - (f(q) - f(qc)))

    # the touching point lies on the convex side for q_c = 1, concave side for q_c = 0
    left = _bisect(tangency(1.0), 1e-9, q_infl, tol)
    right = _bisect(tangency(0.0), q_infl, 1.0 - 1e-9, tol)
    return left, right


def _bl_inflection(model: BuckleyLeverett) -> float:
    from scipy.optimize import minimize_scalar

    res = minimize_scalar(lambda q: -float(model.dflux(q)), bounds=(0.0, 1.0),
                          method="bounded", options={"xatol": 1e-14})
    return float(res.x)


def _bisect(fun, lo, hi, tol):
    flo, fhi = fun(lo), fun(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise RuntimeError(f"bisection bracket [{lo}, {hi}] does not change sign")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if fm == 0:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _invert_monotone(df, speeds, lo, hi, increasing):
    """Vectorised bisection for df(q) = speed on [lo, hi]."""
    a = np.full_like(speeds, lo)
    b = np.full_like(speeds, hi)
    for _ in range(100):
        mid = 0.5 * (a + b)
        above = df(mid) > speeds
        if increasing:
            b = np.where(above, mid, b)
            a = np.where(above, a, mid)
        else:
            a = np.where(above, mid, a)
            b = np.where(above, b, mid)
    return 0.5 * (a + b)


def exact_buckley_leverett(t, x, M: float = 1.0 / 3.0):
    """Double compound wave from the indicator of [-1/2, 0], before interaction."""
    x = np.asarray(x, dtype=float)
    model = BuckleyLeverett(M)
    f, df = model.flux, model.dflux
    q1, q2 = bl_shock_states(M)
    out = np.zeros_like(x)
    if t == 0:
        out[(x >= -0.5) & (x <= 0.0)] = 1.0
        return out
    # wave from x = -1/2: fan 0 -> q1 then shock q1 -> 1
    xi = (x + 0.5) / t
    s1 = (f(1.0) - f(q1)) / (1.0 - q1)
    fan = (xi > 0) & (xi < s1)
    out[fan] = _invert_monotone(df, xi[fan], 0.0, q1, increasing=True)
    out[(xi >= s1) & (x < 0.0)] = 1.0
    # wave from x = 0: fan 1 -> q2 then shock q2 -> 0
    xi = x / t
    s2 = f(q2) / q2
    fan = (xi >= 0) & (xi < s2)
    out[fan] = _invert_monotone(df, xi[fan], q2, 1.0, increasing=False)
    return out


# ---------------------------------------------------------------------------
# shallow water dam break


def dam_break_middle_state(hl: float, hr: float, g: float = 1.0) -> tuple[float, float]:
    """(h_m, u_m) joining a left rarefaction to a right shock, both states at rest."""
    if hl == hr:
        return hl, 0.0

    def mismatch(h):
        u_rare = 2.0 * (math.sqrt(g * hl) - math.sqrt(g * h))
        u_shock = (h - hr) * math.sqrt(0.5 * g * (1.0 / h + 1.0 / hr))
        return u_rare - u_shock

    hm = brentq(mismatch, hr, hl, xtol=1e-15, rtol=1e-15, maxiter=200)
    return hm, 2.0 * (math.sqrt(g * hl) - math.sqrt(g * hm))


def exact_dam_break(t, x, hl=3.0, hr=1.0, g=1.0, x0=0.5):
    """Depth and velocity (h, u) of the dam-break Riemann problem."""
    if not hl >= hr > 0:
        raise ValueError("expected hl >= hr > 0")
    x = np.asarray(x, dtype=float)
    h = np.where(x <= x0, hl, hr).astype(float)
    u = np.zeros_like(x)
    if t == 0 or hl == hr:
        return h, u
    hm, um = dam_break_middle_state(hl, hr, g)
    cl, cm = math.sqrt(g * hl), math.sqrt(g * hm)
    s = hm * um / (hm - hr)
    xi = (x - x0) / t
    fan = (xi > -cl) & (xi < um - cm)
    c = (2.0 * cl - xi[fan]) / 3.0
    h[fan] = c * c / g
    u[fan] = xi[fan] + c
    mid = (xi >= um - cm) & (xi < s)
    h[mid] = hm
    u[mid] = um
    return h, u


# ---------------------------------------------------------------------------
# problem registry


def _advection_smooth():
    return ProblemSpec(
        "advection-smooth", Advection(), (-1.0, 1.0), "periodic", 2.0,
        ic=lambda x: _column(_sine(x)),
        exact=lambda t, x: _column(exact_advection(t, x)),
        fd_cfl=0.9, limiter=False,
    )


def _advection_bells():
    return ProblemSpec(
        "advection-bells", Advection(), (-1.0, 1.0), "periodic", 8.0,
        ic=lambda x: _column(bell_ic(x)),
        exact=lambda t, x: _column(exact_advection(t, x, bell_ic)),
    )


def _buckley_leverett():
    model = BuckleyLeverett(1.0 / 3.0)
    return ProblemSpec(
        "buckley-leverett", model, (-1.0, 1.0), "outflow", 0.4,
        ic=lambda x: _column((np.asarray(x) >= -0.5) & (np.asarray(x) <= 0.0)),
        exact=lambda t, x: _column(exact_buckley_leverett(t, x, model.M)),
        fd_alpha=model.speed_bound, riemann="hlle",
    )


def _dam_break():
    model = ShallowWater(g=1.0)

    def ic(x):
        x = np.asarray(x, dtype=float)
        return np.stack([np.where(x <= 0.5, 3.0, 1.0), np.zeros_like(x)], axis=-1)

    def exact(t, x):
        h, u = exact_dam_break(t, x, 3.0, 1.0, model.g, 0.5)
        return np.stack([h, h * u], axis=-1)

    return ProblemSpec("dam-break", model, (0.0, 1.0), "outflow", 0.2, ic=ic, exact=exact)


def _lax_shock_tube():
    model = Euler(1.4)
    left = np.array([0.445, 0.3111, 8.928])
    right = np.array([0.5, 0.0, 1.4275])

    def ic(x):
        x = np.asarray(x, dtype=float)
        return np.where((x <= 0.5)[:, None], left[None, :], right[None, :])

    return ProblemSpec("lax-shock-tube", model, (0.0, 1.0), "outflow", 0.16, ic=ic,
                       notes={"left": left, "right": right})


def _shock_entropy():
    model = Euler(1.4)
    eps = 0.2
    left = model.conserved(np.array([3.857143, 2.629369, 10.3333]))

    def ic(x):
        x = np.asarray(x, dtype=float)
        prim = np.stack([1.0 + eps * np.sin(5.0 * x), np.zeros_like(x), np.ones_like(x)], -1)
        right = model.conserved(prim)
        return np.where((x < -4.0)[:, None], left[None, :], right)

    return ProblemSpec("shock-entropy", model, (-5.0, 5.0), "outflow", 1.8, ic=ic,
                       notes={"epsilon": eps})


PROBLEMS = {
    "advection-smooth": _advection_smooth,
    "advection-bells": _advection_bells,
    "buckley-leverett": _buckley_leverett,
    "dam-break": _dam_break,
    "lax-shock-tube": _lax_shock_tube,
    "shock-entropy": _shock_entropy,
}


def make_problem(name: str) -> ProblemSpec:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise ValueError(
            f"unknown problem {name!r}; expected one of {', '.join(PROBLEMS)}"
        ) from None


# ---------------------------------------------------------------------------
# norms


def fd_relative_l2(q: np.ndarray, exact: np.ndarray) -> float:
    """sqrt(dx sum (q - q_ex)^2) / sqrt(dx sum q_ex^2); dx cancels."""
    num = np.sqrt(np.sum((np.asarray(q) - exact) ** 2))
    den = np.sqrt(np.sum(np.asarray(exact) ** 2))
    return float(num / den)


def fd_l1_error(q: np.ndarray, exact: np.ndarray, dx: float) -> float:
    return float(dx * np.sum(np.abs(np.asarray(q) - exact)))


def _dg_quadrature(grid: DgGrid, Q, exact_t, npts):
    nodes, w = gauss_rule(npts)
    x = grid.points(nodes)
    qh = evaluate(Q, nodes)
    qe = np.asarray(exact_t(x.ravel()), dtype=float).reshape(qh.shape)
    return qh, qe, w


def dg_relative_l2(grid: DgGrid, Q: np.ndarray, exact_t, npts: int = 10) -> float:
    """Relative L2 error by per-cell Gauss quadrature against exact_t(x)."""
    qh, qe, w = _dg_quadrature(grid, Q, exact_t, npts)
    num = np.einsum("n,cnm->", w, (qh - qe) ** 2)
    den = np.einsum("n,cnm->", w, qe**2)
    return float(np.sqrt(num / den))


def dg_l1_error(grid: DgGrid, Q: np.ndarray, exact_t, npts: int = 10) -> float:
    qh, qe, w = _dg_quadrature(grid, Q, exact_t, npts)
    return float(0.5 * grid.dx * np.einsum("n,cnm->", w, np.abs(qh - qe)))


def error_norm(state, exact: Callable[[float, np.ndarray], np.ndarray]) -> float:
    """Relative L2 error of an FdState or DgState against ``exact(t, x)``."""
    from .weno import FdState

    if isinstance(state, FdState):
        x = state.grid.x
        return fd_relative_l2(state.q, exact(state.t, x))
    return dg_relative_l2(state.grid, state.Q, lambda x: exact(state.t, x))
