"""Fifth-order finite-difference WENO and its two-derivative stage.

Point values live on ``x_i = a + (i - 1/2) dx``. Interface fluxes come from
a global Lax-Friedrichs splitting reconstructed on characteristic variables;
the second time derivative uses a centred fourth-order difference of
``f'(q) q_t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numba
import numpy as np

from .models import FluxModel

__all__ = [
    "GHOST",
    "LINEAR_WEIGHTS",
    "FdGrid",
    "FdStage",
    "FdState",
    "WenoOperator",
    "WenoParams",
    "central_difference",
    "compute_qt",
    "fill_ghosts",
    "second_derivative_term",
    "smoothness_indicators",
    "weno5_minus",
    "weno5_plus",
    "weno_md_stage",
    "weno_weights",
]

GHOST = 5
LINEAR_WEIGHTS = (0.1, 0.6, 0.3)
WENO_MODES = ("z", "js", "linear")


@dataclass(frozen=True)
class WenoParams:
    mode: str = "z"
    power: float = 2.0
    eps: float = 1e-12
    inflation: float = 1.1

    def __post_init__(self):
        if self.mode not in WENO_MODES:
            raise ValueError(f"weno mode must be one of {WENO_MODES}, got {self.mode!r}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.power >= 1:
            raise ValueError("power must be >= 1")
        if not self.inflation >= 1:
            raise ValueError("inflation must be >= 1")


@dataclass(frozen=True)
class FdGrid:
    a: float
    b: float
    mx: int
    ghost: int = GHOST

    def __post_init__(self):
        if self.mx < 10:
            raise ValueError(f"WENO grid needs mx >= 10, got {self.mx}")
        if self.ghost < GHOST:
            raise ValueError(f"ghost width must be >= {GHOST}")
        if not self.b > self.a:
            raise ValueError("domain must satisfy a < b")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.mx

    @property
    def x(self) -> np.ndarray:
        return self.a + (np.arange(1, self.mx + 1) - 0.5) * self.dx


@dataclass
class FdState:
    grid: FdGrid
    q: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        if self.q.ndim == 1:
            self.q = self.q[:, None]
        if self.q.shape[0] != self.grid.mx:
            raise ValueError(f"state has {self.q.shape[0]} points, grid has {self.grid.mx}")


# ---------------------------------------------------------------------------
# scalar reconstruction; stencil index runs along axis 0


def smoothness_indicators(h):
    """Jiang-Shu indicators for the stencil (h_{i-2}, ..., h_{i+2})."""
    h0, h1, h2, h3, h4 = (np.asarray(v, dtype=float) for v in h)
    b0 = 13.0 / 12.0 * (h0 - 2.0 * h1 + h2) ** 2 + 0.25 * (h0 - 4.0 * h1 + 3.0 * h2) ** 2
    b1 = 13.0 / 12.0 * (h1 - 2.0 * h2 + h3) ** 2 + 0.25 * (h1 - h3) ** 2
    b2 = 13.0 / 12.0 * (h2 - 2.0 * h3 + h4) ** 2 + 0.25 * (3.0 * h2 - 4.0 * h3 + h4) ** 2
    return np.stack([b0, b1, b2])


def weno_weights(beta, params: WenoParams = WenoParams()):
    beta = np.asarray(beta, dtype=float)
    g = np.array(LINEAR_WEIGHTS).reshape((3,) + (1,) * (beta.ndim - 1))
    if params.mode == "linear":
        return np.broadcast_to(g, beta.shape).copy()
    if params.mode == "z":
        tau = np.abs(beta[2] - beta[0])
        ratio = tau / (beta + params.eps)
        w = g * (1.0 + (ratio * ratio if params.power == 2 else ratio**params.power))
    else:
        d = beta + params.eps
        w = g / (d * d)
    return w / (w[0] + w[1] + w[2])


def _candidates(h0, h1, h2, h3, h4):
    return (
        (1.0 / 3.0) * h0 - (7.0 / 6.0) * h1 + (11.0 / 6.0) * h2,
        -(1.0 / 6.0) * h1 + (5.0 / 6.0) * h2 + (1.0 / 3.0) * h3,
        (1.0 / 3.0) * h2 + (5.0 / 6.0) * h3 - (1.0 / 6.0) * h4,
    )


def weno5_plus(h, params: WenoParams = WenoParams()):
    """Value at x_{i+1/2} from cell averages (h_{i-2}, ..., h_{i+2})."""
    h = [np.asarray(v, dtype=float) for v in h]
    if params.mode == "linear":
        w0, w1, w2 = LINEAR_WEIGHTS
    else:
        w0, w1, w2 = weno_weights(smoothness_indicators(h), params)
    p0, p1, p2 = _candidates(*h)
    return w0 * p0 + w1 * p1 + w2 * p2


def weno5_minus(h, params: WenoParams = WenoParams()):
    """Value at x_{i+1/2} from (h_{i-1}, ..., h_{i+3}), biased to the right."""
    return weno5_plus(list(h)[::-1], params)


# ---------------------------------------------------------------------------
# grid operators


def fill_ghosts(q: np.ndarray, ghost: int, bc: str) -> np.ndarray:
    """Pad ``q`` (leading axis = points) with ``ghost`` layers per side."""
    if bc == "periodic":
        if q.shape[0] < ghost:
            raise ValueError("periodic padding needs at least `ghost` points")
        return np.concatenate([q[-ghost:], q, q[:ghost]], axis=0)
    if bc == "outflow":
        left = np.repeat(q[:1], ghost, axis=0)
        right = np.repeat(q[-1:], ghost, axis=0)
        return np.concatenate([left, q, right], axis=0)
    raise ValueError(f"unknown boundary condition {bc!r}")


_MODE_CODE = {"z": 0, "js": 1, "linear": 2}


@numba.njit(cache=True)
def _weno5_kernel(h0, h1, h2, h3, h4, mode, power, eps):
    p0 = (1.0 / 3.0) * h0 - (7.0 / 6.0) * h1 + (11.0 / 6.0) * h2
    p1 = -(1.0 / 6.0) * h1 + (5.0 / 6.0) * h2 + (1.0 / 3.0) * h3
    p2 = (1.0 / 3.0) * h2 + (5.0 / 6.0) * h3 - (1.0 / 6.0) * h4
    if mode == 2:
        return 0.1 * p0 + 0.6 * p1 + 0.3 * p2
    b0 = 13.0 / 12.0 * (h0 - 2.0 * h1 + h2) ** 2 + 0.25 * (h0 - 4.0 * h1 + 3.0 * h2) ** 2
    b1 = 13.0 / 12.0 * (h1 - 2.0 * h2 + h3) ** 2 + 0.25 * (h1 - h3) ** 2
    b2 = 13.0 / 12.0 * (h2 - 2.0 * h3 + h4) ** 2 + 0.25 * (3.0 * h2 - 4.0 * h3 + h4) ** 2
    if mode == 0:
        tau = abs(b2 - b0)
        r0 = tau / (b0 + eps)
        r1 = tau / (b1 + eps)
        r2 = tau / (b2 + eps)
        if power == 2.0:
            w0 = 0.1 * (1.0 + r0 * r0)
            w1 = 0.6 * (1.0 + r1 * r1)
            w2 = 0.3 * (1.0 + r2 * r2)
        else:
            w0 = 0.1 * (1.0 + r0**power)
            w1 = 0.6 * (1.0 + r1**power)
            w2 = 0.3 * (1.0 + r2**power)
    else:
        w0 = 0.1 / ((b0 + eps) * (b0 + eps))
        w1 = 0.6 / ((b1 + eps) * (b1 + eps))
        w2 = 0.3 / ((b2 + eps) * (b2 + eps))
    s = w0 + w1 + w2
    return (w0 / s) * p0 + (w1 / s) * p1 + (w2 / s) * p2


@numba.njit(cache=True)
def _split_reconstruct(qg, fg, R, Rinv, lo, alpha, mode, power, eps):
    n = R.shape[0]
    m = qg.shape[1]
    fhat = np.empty((n, m))
    w = np.empty(6)
    g = np.empty(6)
    ghat = np.empty(m)
    for k in range(n):
        i = lo + k
        for p in range(m):
            for s in range(6):
                ws = 0.0
                gs = 0.0
                for j in range(m):
                    ws += Rinv[k, p, j] * qg[i + s - 3, j]
                    gs += Rinv[k, p, j] * fg[i + s - 3, j]
                w[s] = ws
                g[s] = gs
            gp0 = 0.5 * (g[0] + alpha * w[0])
            gp1 = 0.5 * (g[1] + alpha * w[1])
            gp2 = 0.5 * (g[2] + alpha * w[2])
            gp3 = 0.5 * (g[3] + alpha * w[3])
            gp4 = 0.5 * (g[4] + alpha * w[4])
            gm1 = 0.5 * (g[1] - alpha * w[1])
            gm2 = 0.5 * (g[2] - alpha * w[2])
            gm3 = 0.5 * (g[3] - alpha * w[3])
            gm4 = 0.5 * (g[4] - alpha * w[4])
            gm5 = 0.5 * (g[5] - alpha * w[5])
            ghat[p] = (_weno5_kernel(gp0, gp1, gp2, gp3, gp4, mode, power, eps)
                       + _weno5_kernel(gm5, gm4, gm3, gm2, gm1, mode, power, eps))
        for p in range(m):
            acc = 0.0
            for j in range(m):
                acc += R[k, p, j] * ghat[j]
            fhat[k, p] = acc
    return fhat


def _interface_fluxes(qg, model: FluxModel, params: WenoParams, lo: int, hi: int,
                      alpha: float | None):
    """Numerical fluxes at padded interfaces i-1/2 for i in [lo, hi)."""
    qg = np.ascontiguousarray(qg, dtype=float)
    fg = np.ascontiguousarray(model.flux(qg))
    qstar = 0.5 * (qg[lo:hi] + qg[lo - 1:hi - 1])
    if alpha is None:
        alpha = params.inflation * float(np.max(model.max_abs_speed(qstar)))
    if model.m == 1:
        R = Rinv = np.ones((hi - lo, 1, 1))
    else:
        es = model.eigensystem(qstar)
        R, Rinv = np.ascontiguousarray(es.R), np.ascontiguousarray(es.Rinv)
    fhat = _split_reconstruct(qg, fg, R, Rinv, lo, float(alpha), _MODE_CODE[params.mode],
                              float(params.power), float(params.eps))
    return fhat, alpha


def compute_qt(qg: np.ndarray, dx: float, model: FluxModel, params: WenoParams = WenoParams(),
               alpha: float | None = None, ghost: int = GHOST):
    """q_t = -(f_{i+1/2} - f_{i-1/2}) / dx on the interior plus two points per side.

    ``qg`` is the ghost-padded state. The result has ``mx + 4`` rows; row 2
    is the first interior point. Returns ``(qt, alpha)`` where ``alpha`` is
    the splitting speed that was used.
    """
    n = qg.shape[0]
    mx = n - 2 * ghost
    fhat, alpha = _interface_fluxes(qg, model, params, ghost - 2, ghost + mx + 3, alpha)
    return -(fhat[1:] - fhat[:-1]) / dx, alpha


def central_difference(G: np.ndarray, dx: float) -> np.ndarray:
    """(G_{i-2} - 8 G_{i-1} + 8 G_{i+1} - G_{i+2}) / (12 dx) on rows 2..-2."""
    return (G[:-4] - 8.0 * G[1:-3] + 8.0 * G[3:-1] - G[4:]) / (12.0 * dx)


def second_derivative_term(q_margin: np.ndarray, qt: np.ndarray, dx: float,
                           model: FluxModel) -> np.ndarray:
    """D_x (f'(q) q_t) on the interior.

    ``q_margin`` and ``qt`` both cover the interior plus two points per side.
    """
    if model.m == 1:
        G = model.jacobian(q_margin)[..., 0] * qt
    else:
        G = np.einsum("nij,nj->ni", model.jacobian(q_margin), qt)
    return central_difference(G, dx)


def weno_md_stage(qn: np.ndarray, contributions: Sequence, dt: float) -> np.ndarray:
    """q = q^n + sum_k (alpha_k dt q_t,k - beta_k dt^2 D_x G_k).

    ``contributions`` holds ``(alpha, beta, qt, dxg)`` tuples with interior
    arrays; ``dxg`` may be None when ``beta`` is zero.
    """
    q = np.array(qn, dtype=float, copy=True)
    for alpha, beta, qt, dxg in contributions:
        if alpha:
            if qt.shape != q.shape:
                raise ValueError(f"q_t shape {qt.shape} does not match state {q.shape}")
            q += (alpha * dt) * qt
        if beta:
            if dxg is None or dxg.shape != q.shape:
                raise ValueError("second-derivative term missing or misshapen")
            q -= (beta * dt * dt) * dxg
    return q


class FdStage(NamedTuple):
    qt: np.ndarray
    dxg: np.ndarray | None


@dataclass
class WenoOperator:
    """Binds a model, grid and boundary condition into stage-level calls."""

    model: FluxModel
    grid: FdGrid
    bc: str = "periodic"
    params: WenoParams = field(default_factory=WenoParams)
    #: fixed splitting speed; None recomputes it from every stage state
    alpha: float | None = None

    def pad(self, q):
        return fill_ghosts(q, self.grid.ghost, self.bc)

    def derivatives(self, q: np.ndarray, second: bool = True) -> FdStage:
        g = self.grid.ghost
        qg = self.pad(q)
        qt, _ = compute_qt(qg, self.grid.dx, self.model, self.params, self.alpha, g)
        dxg = None
        if second:
            dxg = second_derivative_term(qg[g - 2: g + self.grid.mx + 2], qt, self.grid.dx,
                                         self.model)
        return FdStage(qt[2:-2], dxg)

    def md_stage(self, qn, contributions, dt):
        return weno_md_stage(qn, [(a, b, s.qt, s.dxg) for a, b, s in contributions], dt)

    def limit(self, q):
        return q

    def totals(self, q) -> np.ndarray:
        return np.sum(q, axis=0)

    def max_speed(self, q) -> float:
        if getattr(self.model, "speed_bound", None) is not None:
            return float(self.model.speed_bound)
        return float(np.max(self.model.max_abs_speed(q)))

    def check(self, q):
        self.model.check(q)
