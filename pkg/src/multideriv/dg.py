"""Modal discontinuous Galerkin on a uniform 1D mesh.

The basis is the Legendre family normalised so that
``1/2 int_{-1}^{1} phi_k phi_l dxi = delta_kl``; coefficient arrays have
shape ``(cells, M, m)``. The stage update integrates a time-expanded
("modified") flux in weak form, so one stage call covers both Runge-Kutta
and Lax-Wendroff type updates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .models import FluxModel

__all__ = [
    "DgGrid",
    "DgOperator",
    "DgStage",
    "DgState",
    "dg_md_stage",
    "edge_values",
    "gauss_rule",
    "hlle_flux",
    "hlle_speeds",
    "l2_project",
    "legendre",
    "legendre_dxi",
    "llf_flux",
    "minmod",
    "modified_flux",
    "moment_limiter",
    "pad_cells",
    "plot_points",
    "flux_coefficients",
    "project_initial",
]

MAX_ORDER = 4
RIEMANN_SOLVERS = ("llf", "hlle")


def _check_k(k: int):
    if not 1 <= k <= MAX_ORDER:
        raise ValueError(f"basis index must be in 1..{MAX_ORDER}, got {k}")


def legendre(k: int, xi):
    """Orthonormal Legendre function phi^(k), k = 1..4."""
    _check_k(k)
    xi = np.asarray(xi, dtype=float)
    if k == 1:
        return np.ones_like(xi)
    if k == 2:
        return np.sqrt(3.0) * xi
    if k == 3:
        return 0.5 * np.sqrt(5.0) * (3.0 * xi * xi - 1.0)
    return 0.5 * np.sqrt(7.0) * (5.0 * xi**3 - 3.0 * xi)


def legendre_dxi(k: int, xi):
    _check_k(k)
    xi = np.asarray(xi, dtype=float)
    if k == 1:
        return np.zeros_like(xi)
    if k == 2:
        return np.full_like(xi, np.sqrt(3.0))
    if k == 3:
        return 3.0 * np.sqrt(5.0) * xi
    return 0.5 * np.sqrt(7.0) * (15.0 * xi * xi - 3.0)


@lru_cache(maxsize=None)
def gauss_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=None)
def _basis_tables(M: int, npts: int):
    """phi and phi_xi at the npts Gauss nodes, each (npts, M), plus weights."""
    nodes, weights = gauss_rule(npts)
    phi = np.stack([legendre(k, nodes) for k in range(1, M + 1)], axis=1)
    dphi = np.stack([legendre_dxi(k, nodes) for k in range(1, M + 1)], axis=1)
    for arr in (phi, dphi):
        arr.setflags(write=False)
    return phi, dphi, weights


@lru_cache(maxsize=None)
def _stiffness(M: int):
    """S[k, l] = int phi_xi^(k) phi^(l) dxi, exact with M Gauss points."""
    phi, dphi, w = _basis_tables(M, M)
    S = np.einsum("n,nk,nl->kl", w, dphi, phi)
    S.setflags(write=False)
    return S


def _edge_signs(M: int):
    k = np.arange(1, M + 1)
    plus = np.sqrt(2.0 * k - 1.0)
    minus = (-1.0) ** (k - 1) * plus
    return plus, minus


def l2_project(f: Callable, M: int = MAX_ORDER, npts: int | None = None) -> np.ndarray:
    """Coefficients <f, phi^(k)> on the reference cell.

    ``f`` maps an array of xi values to values of shape ``(len(xi),)`` or
    ``(len(xi), m)``; the result has shape ``(M,)`` or ``(M, m)``.
    """
    phi, _, w = _basis_tables(M, npts or M)
    nodes, _ = gauss_rule(npts or M)
    vals = np.asarray(f(nodes), dtype=float)
    return 0.5 * np.einsum("n,nk,n...->k...", w, phi, vals)


@dataclass(frozen=True)
class DgGrid:
    a: float
    b: float
    mx: int

    def __post_init__(self):
        if self.mx < 3:
            raise ValueError(f"DG grid needs mx >= 3, got {self.mx}")
        if not self.b > self.a:
            raise ValueError("domain must satisfy a < b")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.mx

    @property
    def centers(self) -> np.ndarray:
        return self.a + (np.arange(1, self.mx + 1) - 0.5) * self.dx

    def points(self, xi) -> np.ndarray:
        """Physical coordinates of reference points ``xi`` in every cell, (mx, len(xi))."""
        return self.centers[:, None] + 0.5 * self.dx * np.asarray(xi)[None, :]


@dataclass
class DgState:
    grid: DgGrid
    Q: np.ndarray
    t: float = 0.0

    @property
    def M(self) -> int:
        return self.Q.shape[1]

    @property
    def m(self) -> int:
        return self.Q.shape[2]


def project_initial(ic: Callable, grid: DgGrid, M: int = MAX_ORDER,
                    npts: int | None = None) -> np.ndarray:
    """L2-project ``ic(x) -> (n, m)`` onto every cell; returns (mx, M, m)."""
    npts = npts or M
    phi, _, w = _basis_tables(M, npts)
    nodes, _ = gauss_rule(npts)
    x = grid.points(nodes)
    vals = np.asarray(ic(x.ravel()), dtype=float)
    vals = vals.reshape(x.shape + (-1,))
    return 0.5 * np.einsum("n,nk,cnm->ckm", w, phi, vals)


def evaluate(Q: np.ndarray, xi) -> np.ndarray:
    """q^h at reference points xi in every cell: (cells, len(xi), m)."""
    M = Q.shape[1]
    phi = np.stack([legendre(k, np.asarray(xi, dtype=float)) for k in range(1, M + 1)], axis=1)
    return np.einsum("nk,ckm->cnm", phi, Q)


def plot_points(grid: DgGrid, Q: np.ndarray, per_cell: int = 4):
    """Sample ``per_cell`` uniformly spaced points inside every cell."""
    xi = -1.0 + (2.0 * np.arange(per_cell) + 1.0) / per_cell
    x = grid.points(xi).ravel()
    vals = evaluate(Q, xi).reshape(x.size, -1)
    return x, vals


def pad_cells(Q: np.ndarray, bc: str) -> np.ndarray:
    """One ghost cell per side: copies (outflow) or wraps (periodic)."""
    if bc == "periodic":
        return np.concatenate([Q[-1:], Q, Q[:1]], axis=0)
    if bc == "outflow":
        return np.concatenate([Q[:1], Q, Q[-1:]], axis=0)
    raise ValueError(f"unknown boundary condition {bc!r}")


def flux_coefficients(Q: np.ndarray, model: FluxModel, dx: float, second: bool = True):
    """Galerkin coefficients of f(q^h) and of f'(q^h) d/dx f^h.

    Both come back with the shape of ``Q``; the second is None when
    ``second`` is false.
    """
    M = Q.shape[1]
    phi, dphi, w = _basis_tables(M, M)
    qn = np.einsum("nk,ckm->cnm", phi, Q)
    fn = model.flux(qn)
    F = 0.5 * np.einsum("n,nk,cnm->ckm", w, phi, fn)
    if not second:
        return F, None
    dfdx = (2.0 / dx) * np.einsum("nk,ckm->cnm", dphi, F)
    if model.m == 1:
        jf = model.jacobian(qn)[..., 0] * dfdx
    else:
        jf = np.einsum("cnij,cnj->cni", model.jacobian(qn), dfdx)
    G = 0.5 * np.einsum("n,nk,cnm->ckm", w, phi, jf)
    return F, G


def modified_flux(terms: Sequence, dt: float) -> np.ndarray:
    """Sum over stages of alpha F - dt beta G.

    ``terms`` holds ``(alpha, beta, F, G)``. The minus sign makes the
    expansion represent f - dt/2 f' f_x for a second-order Taylor step, so
    that q - dt d/dx(modified flux) carries q_tt = (f' f_x)_x with
    the correct sign.
    """
    out = None
    for alpha, beta, F, G in terms:
        if out is None:
            out = np.zeros_like(F)
        elif F.shape != out.shape:
            raise ValueError(f"coefficient shapes {F.shape} and {out.shape} differ")
        if alpha:
            out += alpha * F
        if beta:
            if G is None or G.shape != out.shape:
                raise ValueError("second-derivative coefficients missing or misshapen")
            out -= (dt * beta) * G
    if out is None:
        raise ValueError("modified flux needs at least one term")
    return out


def edge_values(C: np.ndarray, side: str) -> np.ndarray:
    """Trace of an expansion at xi = +1 ("right") or xi = -1 ("left") of each cell."""
    plus, minus = _edge_signs(C.shape[1])
    if side == "right":
        return np.einsum("k,ckm->cm", plus, C)
    if side == "left":
        return np.einsum("k,ckm->cm", minus, C)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def hlle_speeds(Ql, Qr, model: FluxModel):
    Ql = np.asarray(Ql, dtype=float)
    Qr = np.asarray(Qr, dtype=float)
    lam_hat = model.eigenvalues(0.5 * (Ql + Qr))
    lam_l = model.eigenvalues(Ql)
    lam_r = model.eigenvalues(Qr)
    s1 = np.minimum(lam_hat.min(axis=-1), lam_l.min(axis=-1))
    s2 = np.maximum(lam_hat.max(axis=-1), lam_r.max(axis=-1))
    return s1, s2


def llf_flux(Ql, Qr, model: FluxModel):
    s1, s2 = hlle_speeds(Ql, Qr, model)
    alpha = np.maximum(np.abs(s1), np.abs(s2))[..., None]
    Ql = np.asarray(Ql, dtype=float)
    Qr = np.asarray(Qr, dtype=float)
    return 0.5 * ((model.flux(Ql) + model.flux(Qr)) - alpha * (Qr - Ql))


def _hll_combine(Fl, Fr, dQ, s1, s2):
    s1 = s1[..., None]
    s2 = s2[..., None]
    width = s2 - s1
    safe = np.where(width > 0, width, 1.0)
    middle = (s2 * Fl - s1 * Fr + s1 * s2 * dQ) / safe
    return np.where(s1 >= 0, Fl, np.where(s2 <= 0, Fr, middle))


def hlle_flux(Ql, Qr, model: FluxModel):
    Ql = np.asarray(Ql, dtype=float)
    Qr = np.asarray(Qr, dtype=float)
    s1, s2 = hlle_speeds(Ql, Qr, model)
    return _hll_combine(model.flux(Ql), model.flux(Qr), Qr - Ql, s1, s2)


class DgStage(NamedTuple):
    """Everything one stage state contributes to a later stage update.

    All arrays are over padded cells (F, G) or interfaces (the rest).
    """

    F: np.ndarray
    G: np.ndarray | None
    dQ: np.ndarray
    s1: np.ndarray
    s2: np.ndarray


def stage_data(Q: np.ndarray, model: FluxModel, dx: float, bc: str,
               second: bool = True) -> DgStage:
    Qp = pad_cells(Q, bc)
    model.check(np.concatenate([edge_values(Qp, "left"), edge_values(Qp, "right")]))
    F, G = flux_coefficients(Qp, model, dx, second)
    Ql = edge_values(Qp[:-1], "right")
    Qr = edge_values(Qp[1:], "left")
    s1, s2 = hlle_speeds(Ql, Qr, model)
    return DgStage(F, G, Qr - Ql, s1, s2)


def dg_md_stage(Qn: np.ndarray, contributions: Sequence, dt: float, dx: float,
                riemann: str = "llf") -> np.ndarray:
    """One stage (or final update) from ``(alpha, beta, DgStage)`` contributions.

    The interior term integrates the modified flux against phi_xi exactly.
    Interface fluxes apply the Riemann solver to each contribution's modified
    flux traces, with the dissipation built from that stage's state jump
    weighted by alpha; the sum over contributions is what gets differenced.
    """
    if riemann not in RIEMANN_SOLVERS:
        raise ValueError(f"riemann solver must be one of {RIEMANN_SOLVERS}, got {riemann!r}")
    if not contributions:
        return np.array(Qn, dtype=float, copy=True)
    M = Qn.shape[1]
    Ft = modified_flux([(a, b, s.F, s.G) for a, b, s in contributions], dt)
    if Ft.shape[0] != Qn.shape[0] + 2 or Ft.shape[1:] != Qn.shape[1:]:
        raise ValueError("stage data does not match the state shape")
    fhat = np.zeros((Qn.shape[0] + 1, Qn.shape[2]))
    for alpha, beta, s in contributions:
        Fk = modified_flux([(alpha, beta, s.F, s.G)], dt)
        Fl = edge_values(Fk[:-1], "right")
        Fr = edge_values(Fk[1:], "left")
        if riemann == "llf":
            a = np.maximum(np.abs(s.s1), np.abs(s.s2))[:, None]
            fhat += 0.5 * ((Fl + Fr) - (alpha * a) * s.dQ)
        else:
            fhat += _hll_combine(Fl, Fr, alpha * s.dQ, s.s1, s.s2)
    N = np.einsum("kl,clm->ckm", _stiffness(M), Ft[1:-1]) / dx
    plus, minus = _edge_signs(M)
    edge = plus[None, :, None] * fhat[1:, None, :] - minus[None, :, None] * fhat[:-1, None, :]
    return Qn + dt * N - (dt / dx) * edge


def minmod(a, b, c):
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c)))
    same = (np.sign(a) == np.sign(b)) & (np.sign(b) == np.sign(c))
    mag = np.minimum(np.minimum(np.abs(a), np.abs(b)), np.abs(c))
    return np.where(same, np.sign(a) * mag, 0.0)


def moment_limiter(Q: np.ndarray, bc: str) -> np.ndarray:
    """Hierarchical minmod limiting of the higher moments, top coefficient first.

    Coefficient k is compared against scaled jumps of coefficient k - 1 in
    the neighbouring cells; a cell stops descending at the first
    coefficient the minmod leaves alone. Cell averages are never touched.
    """
    M = Q.shape[1]
    Qp = pad_cells(Q, bc)
    out = np.array(Q, dtype=float, copy=True)
    active = np.ones((Q.shape[0], Q.shape[2]), dtype=bool)
    for k in range(M, 1, -1):
        theta = 1.0 / np.sqrt(4.0 * k - 2.0)
        lower = Qp[:, k - 2, :]
        fwd = theta * (lower[2:] - lower[1:-1])
        bwd = theta * (lower[1:-1] - lower[:-2])
        cur = out[:, k - 1, :]
        lim = minmod(cur, fwd, bwd)
        changed = lim != cur
        out[:, k - 1, :] = np.where(active, lim, cur)
        active &= changed
        if not active.any():
            break
    return out


@dataclass
class DgOperator:
    model: FluxModel
    grid: DgGrid
    bc: str = "periodic"
    riemann: str = "llf"
    limiter: bool = False

    def __post_init__(self):
        if self.riemann not in RIEMANN_SOLVERS:
            raise ValueError(f"riemann solver must be one of {RIEMANN_SOLVERS}")

    def derivatives(self, Q: np.ndarray, second: bool = True) -> DgStage:
        return stage_data(Q, self.model, self.grid.dx, self.bc, second)

    def md_stage(self, Qn, contributions, dt):
        return dg_md_stage(Qn, contributions, dt, self.grid.dx, self.riemann)

    def limit(self, Q):
        return moment_limiter(Q, self.bc) if self.limiter else Q

    def totals(self, Q) -> np.ndarray:
        return np.sum(Q[:, 0, :], axis=0) * self.grid.dx

    def max_speed(self, Q) -> float:
        if getattr(self.model, "speed_bound", None) is not None:
            return float(self.model.speed_bound)
        return float(np.max(self.model.max_abs_speed(Q[:, 0, :])))

    def check(self, Q):
        self.model.check(Q[:, 0, :])
