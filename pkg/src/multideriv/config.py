"""Run configuration: plain-text ``key = value`` files plus flag overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .tableaux import SCHEMES

__all__ = ["ConfigError", "RunConfig", "parse_config", "format_config"]

SPACES = ("weno", "dg")
RIEMANN = ("llf", "hlle")
WENO_MODES = ("z", "js", "linear")


class ConfigError(ValueError):
    """Bad configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class RunConfig:
    """One solver run.

    Fields left as ``None`` take the problem's defaults when resolved:
    ``cfl`` and ``cfl_max`` from the CFL tables, ``t_final``, ``riemann`` and
    ``limiter`` from the problem registry.
    """

    problem: str = "advection-smooth"
    space: str = "weno"
    integrator: str = "tdrk4"
    mx: int = 100
    cfl: float | None = None
    cfl_max: float | None = None
    t_final: float | None = None
    weno_mode: str = "z"
    weno_power: int = 2
    weno_eps: float = 1e-12
    weno_inflation: float = 1.1
    riemann: str | None = None
    limiter: bool | None = None
    out: str | None = None
    snapshot_every: int = 0

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def resolved(self) -> "RunConfig":
        """Copy with every problem-dependent default filled in, then validated."""
        from .problems import make_problem

        if self.space not in SPACES:
            raise ConfigError("space", f"expected one of {', '.join(SPACES)}, got {self.space!r}")
        try:
            problem = make_problem(self.problem)
        except ValueError as exc:
            raise ConfigError("problem", str(exc)) from None
        nu, nu_max = problem.cfl(self.space, self.integrator)
        cfg = self.replace(
            cfl=nu if self.cfl is None else self.cfl,
            cfl_max=nu_max if self.cfl_max is None else self.cfl_max,
            t_final=problem.t_final if self.t_final is None else self.t_final,
            riemann=problem.riemann if self.riemann is None else self.riemann,
            limiter=(problem.limiter and self.space == "dg") if self.limiter is None
            else self.limiter,
        )
        cfg.validate()
        return cfg

    def validate(self):
        if self.space not in SPACES:
            raise ConfigError("space", f"expected one of {', '.join(SPACES)}, got {self.space!r}")
        if self.integrator not in SCHEMES:
            raise ConfigError("integrator", f"unknown scheme {self.integrator!r}; "
                              f"expected one of {', '.join(SCHEMES)}")
        min_mx = 10 if self.space == "weno" else 3
        if not isinstance(self.mx, int) or self.mx < min_mx:
            raise ConfigError("mx", f"need at least {min_mx} cells for {self.space}, got {self.mx!r}")
        if self.cfl is not None and not self.cfl > 0:
            raise ConfigError("cfl", f"must be positive, got {self.cfl!r}")
        if self.cfl is not None and self.cfl_max is not None and self.cfl > self.cfl_max:
            raise ConfigError("cfl", f"{self.cfl!r} exceeds cfl_max = {self.cfl_max!r}")
        if self.t_final is not None and not self.t_final >= 0:
            raise ConfigError("t_final", f"must be non-negative, got {self.t_final!r}")
        if self.weno_mode not in WENO_MODES:
            raise ConfigError("weno_mode", f"expected one of {', '.join(WENO_MODES)}")
        if self.weno_power < 1:
            raise ConfigError("weno_power", "must be >= 1")
        if not self.weno_eps > 0:
            raise ConfigError("weno_eps", "must be positive")
        if not self.weno_inflation >= 1:
            raise ConfigError("weno_inflation", "must be >= 1")
        if self.riemann is not None and self.riemann not in RIEMANN:
            raise ConfigError("riemann", f"expected one of {', '.join(RIEMANN)}")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every", "must be >= 0")


_FIELDS = {f.name: f for f in fields(RunConfig)}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _convert(key: str, text: str):
    kind = _FIELDS[key].type.replace(" | None", "")
    if text.lower() in ("", "none") and "None" in _FIELDS[key].type:
        return None
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(text)
    except ValueError:
        raise ConfigError(key, f"cannot read {text!r} as {kind}") from None
    return text


def _read_file(path) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise ConfigError(key or f"line {lineno}", "expected 'key = value'")
        if key not in _FIELDS:
            raise ConfigError(key, "unknown key")
        values[key] = _convert(key, val.strip())
    return values


def parse_config(path=None, overrides: dict | None = None) -> RunConfig:
    """File values, then overrides (``None`` means "not given"), then defaults."""
    values = _read_file(path) if path is not None else {}
    for key, val in (overrides or {}).items():
        key = key.replace("-", "_")
        if key not in _FIELDS:
            raise ConfigError(key, "unknown key")
        if val is None:
            continue
        values[key] = _convert(key, val) if isinstance(val, str) else val
    return RunConfig(**values).resolved()


def format_config(config: RunConfig) -> str:
    """Inverse of the file reader."""
    lines = []
    for name in _FIELDS:
        val = getattr(config, name)
        lines.append(f"{name} = {'none' if val is None else repr(val) if isinstance(val, float) else val}")
    return "\n".join(lines) + "\n"
