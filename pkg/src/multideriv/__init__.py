"""Two-derivative Runge-Kutta time stepping for 1D conservation laws."""

from .config import ConfigError, RunConfig, parse_config
from .driver import NumericalError, advance, convergence_study, run, step_size
from .models import StateError, make_model
from .problems import make_problem
from .tableaux import Tableau, amplification_polynomial, make_tableau

__all__ = [
    "ConfigError",
    "NumericalError",
    "RunConfig",
    "StateError",
    "Tableau",
    "advance",
    "amplification_polynomial",
    "convergence_study",
    "make_model",
    "make_problem",
    "make_tableau",
    "parse_config",
    "run",
    "step_size",
]

__version__ = "0.1.0"
