"""Explicit multiderivative Runge-Kutta tableaux.

A tableau with ``s`` stages and ``r`` derivatives advances ``y' = L(y)`` by

    y_i     = y_n + sum_m dt^m sum_j a[m][i, j] L^(m-1)(y_j)
    y_{n+1} = y_n + sum_m dt^m sum_i b[m][i]    L^(m-1)(y_i)

Coefficients are kept as exact fractions; float copies are made once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "SCHEMES",
    "Tableau",
    "amplification_polynomial",
    "make_tableau",
    "max_imaginary_extent",
]

F = Fraction


@dataclass(frozen=True)
class Tableau:
    name: str
    c: tuple[Fraction, ...]
    # a[m][i][j] and b[m][i], m = 0 .. r-1 holds the (m+1)-th derivative
    a: tuple[tuple[tuple[Fraction, ...], ...], ...]
    b: tuple[tuple[Fraction, ...], ...]
    design_order: int
    a_float: np.ndarray = field(init=False, repr=False, compare=False)
    b_float: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        s = len(self.c)
        if s < 1 or not self.b:
            raise ValueError(f"{self.name}: need at least one stage and one derivative")
        if len(self.a) != len(self.b):
            raise ValueError(f"{self.name}: a and b disagree on derivative count")
        for m, (am, bm) in enumerate(zip(self.a, self.b)):
            if len(bm) != s or len(am) != s or any(len(row) != s for row in am):
                raise ValueError(f"{self.name}: derivative {m + 1} block is not {s}x{s}")
            for i in range(s):
                for j in range(i, s):
                    if am[i][j] != 0:
                        raise ValueError(
                            f"{self.name}: a^({m + 1})[{i + 1},{j + 1}] = {am[i][j]} "
                            "breaks explicitness"
                        )
        if sum(self.b[0]) != 1:
            raise ValueError(f"{self.name}: first-derivative weights must sum to 1")
        object.__setattr__(
            self, "a_float", np.array([[[float(x) for x in row] for row in am] for am in self.a])
        )
        object.__setattr__(self, "b_float", np.array([[float(x) for x in bm] for bm in self.b]))

    @property
    def s(self) -> int:
        return len(self.c)

    @property
    def r(self) -> int:
        return len(self.b)

    def stage_coefficients(self, i: int) -> list[tuple[int, tuple[float, ...]]]:
        """Nonzero (j, (a1_ij, a2_ij, ...)) pairs feeding stage ``i`` (0-based)."""
        out = []
        for j in range(i):
            coeffs = tuple(float(self.a[m][i][j]) for m in range(self.r))
            if any(coeffs):
                out.append((j, coeffs))
        return out

    def update_coefficients(self) -> list[tuple[int, tuple[float, ...]]]:
        out = []
        for i in range(self.s):
            coeffs = tuple(float(self.b[m][i]) for m in range(self.r))
            if any(coeffs):
                out.append((i, coeffs))
        return out


def _lower(s: int, entries: dict[tuple[int, int], Fraction]) -> tuple[tuple[Fraction, ...], ...]:
    rows = [[F(0)] * s for _ in range(s)]
    for (i, j), v in entries.items():
        rows[i - 1][j - 1] = F(v)
    return tuple(tuple(r) for r in rows)


def _tdrk3() -> Tableau:
    return Tableau(
        "tdrk3",
        c=(F(0), F(1)),
        a=(_lower(2, {(2, 1): F(1)}), _lower(2, {(2, 1): F(1, 2)})),
        b=((F(2, 3), F(1, 3)), (F(1, 6), F(0))),
        design_order=3,
    )


def _tdrk4() -> Tableau:
    return Tableau(
        "tdrk4",
        c=(F(0), F(1, 2)),
        a=(_lower(2, {(2, 1): F(1, 2)}), _lower(2, {(2, 1): F(1, 8)})),
        b=((F(1), F(0)), (F(1, 6), F(1, 3))),
        design_order=4,
    )


def _tdrk5() -> Tableau:
    return Tableau(
        "tdrk5",
        c=(F(0), F(2, 5), F(1)),
        a=(
            _lower(3, {(2, 1): F(2, 5), (3, 1): F(1)}),
            _lower(3, {(2, 1): F(2, 25), (3, 1): F(-1, 4), (3, 2): F(3, 4)}),
        ),
        b=((F(1), F(0), F(0)), (F(1, 8), F(25, 72), F(1, 36))),
        design_order=5,
    )


def _rk4() -> Tableau:
    return Tableau(
        "rk4",
        c=(F(0), F(1, 2), F(1, 2), F(1)),
        a=(_lower(4, {(2, 1): F(1, 2), (3, 2): F(1, 2), (4, 3): F(1)}),),
        b=((F(1, 6), F(1, 3), F(1, 3), F(1, 6)),),
        design_order=4,
    )


def _ssprk3() -> Tableau:
    return Tableau(
        "ssprk3",
        c=(F(0), F(1), F(1, 2)),
        a=(_lower(3, {(2, 1): F(1), (3, 1): F(1, 4), (3, 2): F(1, 4)}),),
        b=((F(1, 6), F(1, 6), F(2, 3)),),
        design_order=3,
    )


def taylor(r: int) -> Tableau:
    """Single-stage Taylor method of order ``r``."""
    return Tableau(
        f"taylor{r}",
        c=(F(0),),
        a=tuple(((F(0),),) for _ in range(r)),
        b=tuple((F(1, math.factorial(m)),) for m in range(1, r + 1)),
        design_order=r,
    )


SCHEMES = {
    "tdrk3": _tdrk3,
    "tdrk4": _tdrk4,
    "tdrk5": _tdrk5,
    "rk4": _rk4,
    "ssprk3": _ssprk3,
    "taylor2": lambda: taylor(2),
}


def make_tableau(name: str) -> Tableau:
    try:
        return SCHEMES[name]()
    except KeyError:
        raise ValueError(
            f"unknown integrator {name!r}; expected one of {', '.join(sorted(SCHEMES))}"
        ) from None


def _polymul(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    out = [F(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                out[i + j] += x * y
    return out


def _polyadd(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def amplification_polynomial(t: Tableau) -> list[Fraction]:
    """Coefficients of R(z) with y_{n+1} = R(dt*lam) y_n on y' = lam*y.

    For the linear problem dt^m L^(m-1)(y) = z^m y, so every stage value is a
    polynomial in z.
    """
    stages: list[list[Fraction]] = []
    for i in range(t.s):
        y = [F(1)]
        for j in range(i):
            for m in range(t.r):
                if t.a[m][i][j]:
                    term = [F(0)] * (m + 1) + [t.a[m][i][j]]
                    y = _polyadd(y, _polymul(term, stages[j]))
        stages.append(y)
    out = [F(1)]
    for i in range(t.s):
        for m in range(t.r):
            if t.b[m][i]:
                term = [F(0)] * (m + 1) + [t.b[m][i]]
                out = _polyadd(out, _polymul(term, stages[i]))
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def max_imaginary_extent(t: Tableau, tol: float = 1e-12, *, y_max: float = 10.0,
                         step: float = 1e-3) -> float:
    """Largest y with |R(iy')| <= 1 + tol on all of [0, y].

    The axis is sampled at ``step`` to find the first violation, then the
    crossing is refined by bisection.
    """
    coeffs = np.array([float(x) for x in amplification_polynomial(t)])

    def excess(y):
        return np.abs(np.polynomial.polynomial.polyval(1j * np.asarray(y), coeffs)) - 1.0 - tol

    ys = np.arange(0.0, y_max + step, step)
    bad = np.nonzero(excess(ys) > 0)[0]
    if bad.size == 0:
        return float(ys[-1])
    k = bad[0]
    if k == 0:
        return 0.0
    lo, hi = ys[k - 1], ys[k]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
    return float(lo)
