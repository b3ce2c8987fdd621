"""Flux models for 1D hyperbolic systems.

Every function takes states of shape ``(..., m)`` and broadcasts over the
leading axes; matrices come back as ``(..., m, m)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Advection",
    "BuckleyLeverett",
    "EigenSystem",
    "Euler",
    "FluxModel",
    "ShallowWater",
    "StateError",
    "make_model",
]

ADMISSIBLE_FLOOR = 1e-12


class StateError(ValueError):
    """An inadmissible state was handed to a model."""

    def __init__(self, message: str, component: str | None = None, index=None):
        super().__init__(message)
        self.component = component
        self.index = index


def _check_positive(values: np.ndarray, component: str):
    bad = ~(values >= ADMISSIBLE_FLOOR)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        idx = tuple(int(k) for k in idx)
        raise StateError(
            f"inadmissible state: {component} = {values[idx]!r} at index {idx}",
            component=component,
            index=idx,
        )


@dataclass(frozen=True)
class EigenSystem:
    R: np.ndarray
    Rinv: np.ndarray
    lam: np.ndarray


class FluxModel:
    name: str = ""
    m: int = 1
    #: speed bound used in place of sampled eigenvalues, when known a priori
    speed_bound: float | None = None

    def flux(self, q):
        raise NotImplementedError

    def jacobian(self, q):
        raise NotImplementedError

    def eigenvalues(self, q):
        raise NotImplementedError

    def eigensystem(self, q) -> EigenSystem:
        raise NotImplementedError

    def max_abs_speed(self, q):
        """max_p |lambda_p(q)| per state."""
        return np.max(np.abs(self.eigenvalues(q)), axis=-1)

    def check(self, q):
        """Raise StateError when any state is outside the admissible set."""
        q = np.asarray(q, dtype=float)
        if not np.all(np.isfinite(q)):
            idx = tuple(int(k) for k in np.argwhere(~np.isfinite(q))[0])
            raise StateError(f"non-finite state at index {idx}", index=idx)

    def __repr__(self):
        return f"{type(self).__name__}()"


class _Scalar(FluxModel):
    m = 1

    def eigenvalues(self, q):
        return self.jacobian(q)[..., 0]

    def eigensystem(self, q) -> EigenSystem:
        q = np.asarray(q, dtype=float)
        one = np.ones(q.shape[:-1] + (1, 1))
        return EigenSystem(one, one.copy(), self.eigenvalues(q))


class Advection(_Scalar):
    """q_t + q_x = 0."""

    name = "advection"
    speed_bound = 1.0

    def flux(self, q):
        return np.array(q, dtype=float)

    def jacobian(self, q):
        q = np.asarray(q, dtype=float)
        return np.ones(q.shape[:-1] + (1, 1))

    def __repr__(self):
        return "Advection()"


class BuckleyLeverett(_Scalar):
    """f(q) = q^2 / (q^2 + M (1 - q)^2)."""

    name = "buckley-leverett"

    def __init__(self, M: float = 1.0 / 3.0):
        if not M > 0:
            raise ValueError("mobility ratio M must be positive")
        self.M = float(M)
        self.speed_bound = self.global_speed_bound()

    def flux(self, q):
        q = np.asarray(q, dtype=float)
        return q * q / (q * q + self.M * (1.0 - q) ** 2)

    def dflux(self, q):
        q = np.asarray(q, dtype=float)
        d = q * q + self.M * (1.0 - q) ** 2
        return 2.0 * self.M * q * (1.0 - q) / (d * d)

    def jacobian(self, q):
        return self.dflux(q)[..., None]

    def global_speed_bound(self) -> float:
        """max over [0, 1] of |f'(q)|, located by bounded Brent minimisation."""
        from scipy.optimize import minimize_scalar

        # f' is unimodal on [0, 1]
        res = minimize_scalar(
            lambda x: -float(self.dflux(x)), bounds=(0.0, 1.0), method="bounded",
            options={"xatol": 1e-14},
        )
        return float(-res.fun)

    def __repr__(self):
        return f"BuckleyLeverett(M={self.M!r})"


class ShallowWater(FluxModel):
    """(h, hu) with flux (hu, hu^2 + g h^2 / 2)."""

    name = "shallow-water"
    m = 2

    def __init__(self, g: float = 1.0):
        self.g = float(g)

    def check(self, q):
        super().check(q)
        _check_positive(np.asarray(q, dtype=float)[..., 0], "h")

    def flux(self, q):
        q = np.asarray(q, dtype=float)
        self.check(q)
        h, hu = q[..., 0], q[..., 1]
        return np.stack([hu, hu * hu / h + 0.5 * self.g * h * h], axis=-1)

    def jacobian(self, q):
        q = np.asarray(q, dtype=float)
        self.check(q)
        h, hu = q[..., 0], q[..., 1]
        u = hu / h
        J = np.zeros(q.shape[:-1] + (2, 2))
        J[..., 0, 1] = 1.0
        J[..., 1, 0] = self.g * h - u * u
        J[..., 1, 1] = 2.0 * u
        return J

    def eigenvalues(self, q):
        q = np.asarray(q, dtype=float)
        self.check(q)
        h = q[..., 0]
        u = q[..., 1] / h
        c = np.sqrt(self.g * h)
        return np.stack([u - c, u + c], axis=-1)

    def eigensystem(self, q) -> EigenSystem:
        q = np.asarray(q, dtype=float)
        self.check(q)
        h = q[..., 0]
        u = q[..., 1] / h
        c = np.sqrt(self.g * h)
        shape = q.shape[:-1] + (2, 2)
        R = np.empty(shape)
        R[..., 0, 0] = 1.0
        R[..., 0, 1] = 1.0
        R[..., 1, 0] = u - c
        R[..., 1, 1] = u + c
        Rinv = np.empty(shape)
        inv2c = 0.5 / c
        Rinv[..., 0, 0] = (u + c) * inv2c
        Rinv[..., 0, 1] = -inv2c
        Rinv[..., 1, 0] = -(u - c) * inv2c
        Rinv[..., 1, 1] = inv2c
        return EigenSystem(R, Rinv, np.stack([u - c, u + c], axis=-1))

    def __repr__(self):
        return f"ShallowWater(g={self.g!r})"


class Euler(FluxModel):
    """Ideal-gas Euler equations in (rho, rho u, E)."""

    name = "euler"
    m = 3

    def __init__(self, gamma: float = 1.4):
        self.gamma = float(gamma)

    def pressure(self, q):
        q = np.asarray(q, dtype=float)
        rho, mom, E = q[..., 0], q[..., 1], q[..., 2]
        return (self.gamma - 1.0) * (E - 0.5 * mom * mom / rho)

    def primitive(self, q):
        """(rho, u, p) from conserved variables."""
        q = np.asarray(q, dtype=float)
        return np.stack([q[..., 0], q[..., 1] / q[..., 0], self.pressure(q)], axis=-1)

    def conserved(self, prim):
        prim = np.asarray(prim, dtype=float)
        rho, u, p = prim[..., 0], prim[..., 1], prim[..., 2]
        return np.stack([rho, rho * u, p / (self.gamma - 1.0) + 0.5 * rho * u * u], axis=-1)

    def check(self, q):
        super().check(q)
        q = np.asarray(q, dtype=float)
        _check_positive(q[..., 0], "rho")
        _check_positive(self.pressure(q), "p")

    def _decode(self, q):
        q = np.asarray(q, dtype=float)
        self.check(q)
        rho = q[..., 0]
        u = q[..., 1] / rho
        p = self.pressure(q)
        return rho, u, p, q[..., 2]

    def flux(self, q):
        rho, u, p, E = self._decode(q)
        return np.stack([rho * u, rho * u * u + p, (E + p) * u], axis=-1)

    def jacobian(self, q):
        rho, u, p, E = self._decode(q)
        g = self.gamma
        H = (E + p) / rho
        J = np.zeros(rho.shape + (3, 3))
        J[..., 0, 1] = 1.0
        J[..., 1, 0] = 0.5 * (g - 3.0) * u * u
        J[..., 1, 1] = (3.0 - g) * u
        J[..., 1, 2] = g - 1.0
        J[..., 2, 0] = u * (0.5 * (g - 1.0) * u * u - H)
        J[..., 2, 1] = H - (g - 1.0) * u * u
        J[..., 2, 2] = g * u
        return J

    def sound_speed(self, q):
        rho, _, p, _ = self._decode(q)
        return np.sqrt(self.gamma * p / rho)

    def eigenvalues(self, q):
        rho, u, p, _ = self._decode(q)
        c = np.sqrt(self.gamma * p / rho)
        return np.stack([u - c, u, u + c], axis=-1)

    def eigensystem(self, q) -> EigenSystem:
        rho, u, p, E = self._decode(q)
        g = self.gamma
        c = np.sqrt(g * p / rho)
        H = (E + p) / rho
        shape = rho.shape + (3, 3)
        R = np.empty(shape)
        R[..., 0, :] = 1.0
        R[..., 1, 0] = u - c
        R[..., 1, 1] = u
        R[..., 1, 2] = u + c
        R[..., 2, 0] = H - u * c
        R[..., 2, 1] = 0.5 * u * u
        R[..., 2, 2] = H + u * c
        b1 = (g - 1.0) / (c * c)
        b2 = 0.5 * b1 * u * u
        Rinv = np.empty(shape)
        Rinv[..., 0, 0] = 0.5 * (b2 + u / c)
        Rinv[..., 0, 1] = -0.5 * (b1 * u + 1.0 / c)
        Rinv[..., 0, 2] = 0.5 * b1
        Rinv[..., 1, 0] = 1.0 - b2
        Rinv[..., 1, 1] = b1 * u
        Rinv[..., 1, 2] = -b1
        Rinv[..., 2, 0] = 0.5 * (b2 - u / c)
        Rinv[..., 2, 1] = -0.5 * (b1 * u - 1.0 / c)
        Rinv[..., 2, 2] = 0.5 * b1
        return EigenSystem(R, Rinv, np.stack([u - c, u, u + c], axis=-1))

    def __repr__(self):
        return f"Euler(gamma={self.gamma!r})"


def make_model(name: str, **params) -> FluxModel:
    models = {
        "advection": Advection,
        "buckley-leverett": BuckleyLeverett,
        "shallow-water": ShallowWater,
        "euler": Euler,
    }
    try:
        cls = models[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; expected one of {', '.join(models)}") from None
    return cls(**params)
