"""Time loop, convergence harness and solution I/O."""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .dg import DgGrid, DgOperator, DgState, plot_points, project_initial
from .models import StateError
from .problems import ProblemSpec, dg_relative_l2, fd_relative_l2, make_problem
from .tableaux import Tableau, make_tableau
from .weno import FdGrid, FdState, WenoOperator, WenoParams

__all__ = [
    "NumericalError",
    "RunResult",
    "advance",
    "build",
    "convergence_study",
    "read_solution_csv",
    "run",
    "solution_csv",
    "step_size",
    "write_solution_csv",
]

log = logging.getLogger(__name__)

MAX_DT_RETRIES = 8


class NumericalError(RuntimeError):
    """The solution blew up or left the admissible set."""

    def __init__(self, message, step=None, index=None):
        super().__init__(message)
        self.step = step
        self.index = index


def advance(q: np.ndarray, tableau: Tableau, op, dt: float) -> np.ndarray:
    """One step of a two-derivative (or classical) Runge-Kutta scheme.

    Stage ``i`` is built by the operator's stage routine from the
    ``(a1_ij, a2_ij)`` weights of earlier stages; the update uses the
    ``(b1_i, b2_i)`` weights. Only stages that later rows reference are kept.
    """
    if tableau.r > 2:
        raise ValueError(f"{tableau.name}: spatial operators support at most two derivatives")
    second = tableau.r == 2
    stages = {}
    needed = {j for i in range(tableau.s) for j, _ in tableau.stage_coefficients(i)}
    needed |= {i for i, _ in tableau.update_coefficients()}

    def weights(coeffs):
        return (coeffs[0], coeffs[1] if second else 0.0)

    for i in range(tableau.s):
        if i not in needed:
            continue
        terms = [(*weights(c), stages[j]) for j, c in tableau.stage_coefficients(i)]
        y = q if i == 0 else op.limit(op.md_stage(q, terms, dt))
        stages[i] = op.derivatives(y, second)
    terms = [(*weights(c), stages[i]) for i, c in tableau.update_coefficients()]
    return op.limit(op.md_stage(q, terms, dt))


def step_size(q, op, cfl: float, t: float, t_final: float) -> float:
    """nu dx / S with S the largest wave speed of ``q``; clipped to land on t_final."""
    speed = op.max_speed(q)
    if not speed > 0:
        raise NumericalError(f"wave speed {speed!r} gives no usable time step")
    dt = cfl * op.grid.dx / speed
    return min(dt, t_final - t)


@dataclass
class RunResult:
    config: RunConfig
    problem: ProblemSpec
    state: FdState | DgState
    times: list[float] = field(default_factory=list)
    totals: list[np.ndarray] = field(default_factory=list)
    snapshots: list[tuple[int, float, np.ndarray]] = field(default_factory=list)
    steps: int = 0
    rejected: int = 0

    @property
    def dx(self) -> float:
        return self.state.grid.dx

    def solution(self):
        """(x, values) pairs as written to the solution CSV."""
        if isinstance(self.state, FdState):
            return self.state.grid.x, self.state.q
        return plot_points(self.state.grid, self.state.Q)

    def error(self) -> float:
        if self.problem.exact is None:
            raise ValueError(f"{self.problem.name} has no exact solution")
        exact, t = self.problem.exact, self.state.t
        if isinstance(self.state, FdState):
            return fd_relative_l2(self.state.q, exact(t, self.state.grid.x))
        return dg_relative_l2(self.state.grid, self.state.Q, lambda x: exact(t, x))


def build(config: RunConfig, problem: ProblemSpec | None = None):
    """Operator and initial coefficients/point values for a configuration."""
    problem = problem or make_problem(config.problem)
    a, b = problem.domain
    if config.space == "weno":
        grid = FdGrid(a, b, config.mx)
        params = WenoParams(config.weno_mode, config.weno_power, config.weno_eps,
                            config.weno_inflation)
        op = WenoOperator(problem.model, grid, problem.bc, params, problem.fd_alpha)
        q0 = np.asarray(problem.ic(grid.x), dtype=float).reshape(grid.mx, problem.model.m)
    else:
        grid = DgGrid(a, b, config.mx)
        op = DgOperator(problem.model, grid, problem.bc, config.riemann, config.limiter)
        q0 = op.limit(project_initial(problem.ic, grid))
    return problem, op, q0


def _check_finite(q, step):
    bad = ~np.isfinite(q)
    if bad.any():
        idx = tuple(int(k) for k in np.argwhere(bad)[0])
        raise NumericalError(f"non-finite value at step {step}, index {idx}", step, idx)


def run(config: RunConfig, problem: ProblemSpec | None = None) -> RunResult:
    config = config.resolved()
    problem, op, q = build(config, problem)
    tableau = make_tableau(config.integrator)
    t_final = config.t_final
    t = 0.0
    res = RunResult(config, problem, None)  # type: ignore[arg-type]
    res.times.append(t)
    res.totals.append(op.totals(q))
    res.snapshots.append((0, t, q.copy()))
    step = 0
    is_dg = isinstance(op, DgOperator)
    while t < t_final:
        dt = step_size(q, op, config.cfl, t, t_final)
        for attempt in range(MAX_DT_RETRIES + 1):
            try:
                q_new = advance(q, tableau, op, dt)
            except StateError as exc:
                raise NumericalError(f"step {step + 1}: {exc}", step + 1, exc.index) from exc
            _check_finite(q_new, step + 1)
            if not is_dg:
                break
            realized = dt * op.max_speed(q_new) / op.grid.dx
            if realized <= config.cfl_max or attempt == MAX_DT_RETRIES:
                break
            res.rejected += 1
            dt *= config.cfl / realized
        try:
            op.check(q_new)
        except StateError as exc:
            raise NumericalError(f"step {step + 1}: {exc}", step + 1, exc.index) from exc
        q = q_new
        step += 1
        t = t_final if t_final - (t + dt) <= 1e-14 * max(1.0, t_final) else t + dt
        res.times.append(t)
        res.totals.append(op.totals(q))
        if config.snapshot_every and step % config.snapshot_every == 0:
            res.snapshots.append((step, t, q.copy()))
    if res.snapshots[-1][0] != step:
        res.snapshots.append((step, t, q.copy()))
    res.steps = step
    res.state = FdState(op.grid, q, t) if not is_dg else DgState(op.grid, q, t)
    log.info("%s/%s/%s mx=%d: %d steps to t=%g", config.problem, config.space,
             config.integrator, config.mx, step, t)
    return res


def convergence_study(config: RunConfig, meshes) -> list[tuple[int, float, float | None]]:
    """Rows (mx, error, order) with order = log2(e_coarse / e_fine)."""
    rows = []
    prev = None
    for mx in meshes:
        err = run(config.replace(mx=int(mx))).error()
        order = None if prev is None else math.log2(prev / err)
        rows.append((int(mx), err, order))
        prev = err
    return rows


def convergence_csv(rows) -> str:
    buf = io.StringIO()
    buf.write("mx,error,order\n")
    for mx, err, order in rows:
        buf.write(f"{mx},{err:.17g},{'' if order is None else format(order, '.17g')}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# solution files


def solution_csv(x, values, meta: dict | None = None) -> str:
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    buf = io.StringIO()
    for key, val in (meta or {}).items():
        buf.write(f"# {key} = {val}\n")
    buf.write(",".join(["x"] + [f"q{k + 1}" for k in range(values.shape[1])]) + "\n")
    for xi, row in zip(x, values):
        buf.write(",".join(format(float(v), ".17g") for v in (xi, *row)) + "\n")
    return buf.getvalue()


def write_solution_csv(path, x, values, meta: dict | None = None):
    Path(path).write_text(solution_csv(x, values, meta))


def read_solution_csv(path):
    """Returns (x, values, meta) from a file written by write_solution_csv."""
    meta = {}
    rows = []
    header = None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            meta[key.strip()] = val.strip()
        elif header is None:
            header = line.split(",")
        elif line.strip():
            rows.append([float(v) for v in line.split(",")])
    if header is None or header[0] != "x":
        raise ValueError(f"{path}: missing x,q1,... header")
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return data[:, 0], data[:, 1:], meta
