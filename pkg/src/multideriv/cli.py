"""Command-line entry point.

    multideriv run --problem dam-break --space dg --integrator tdrk4 --mx 60 --out sol.csv
    multideriv converge --space weno --integrator ssprk3 --cfl 0.9 --meshes 25,50,100
    multideriv reference --problem shock-entropy --integrator ssprk3 --mx 6000 --cfl 0.1 --out ref.csv
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, parse_config
from .driver import NumericalError, convergence_csv, convergence_study, run, solution_csv
from .models import StateError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--problem")
    p.add_argument("--space", choices=("weno", "dg"))
    p.add_argument("--integrator")
    p.add_argument("--mx", type=int)
    p.add_argument("--cfl", type=float)
    p.add_argument("--cfl-max", type=float)
    p.add_argument("--t-final", type=float)
    p.add_argument("--riemann", choices=("llf", "hlle"))
    p.add_argument("--weno-mode", choices=("z", "js", "linear"))
    p.add_argument("--no-limiter", dest="limiter", action="store_const", const=False, default=None)
    p.add_argument("--limiter", dest="limiter", action="store_const", const=True)
    p.add_argument("--out", help="output CSV (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multideriv",
                                     description="Two-derivative Runge-Kutta solvers for 1D conservation laws")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("run", help="run one configuration and write the final solution"))
    conv = sub.add_parser("converge", help="error/order table over a list of meshes")
    _common(conv)
    conv.add_argument("--meshes", required=True, help="comma-separated mesh sizes")
    _common(sub.add_parser("reference", help="like run, with a metadata header"))
    return parser


_CONFIG_KEYS = ("problem", "space", "integrator", "mx", "cfl", "cfl_max", "t_final",
                "riemann", "weno_mode", "limiter", "out")


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        overrides = {k: getattr(args, k) for k in _CONFIG_KEYS}
        config = parse_config(args.config, overrides)
        if args.command == "converge":
            try:
                meshes = [int(m) for m in args.meshes.split(",") if m.strip()]
            except ValueError:
                raise ConfigError("meshes", f"cannot read {args.meshes!r} as a list of integers") from None
            if not meshes:
                raise ConfigError("meshes", "empty mesh list")
            for mx in meshes:
                config.replace(mx=mx).validate()
            _emit(convergence_csv(convergence_study(config, meshes)), config.out)
            return EXIT_OK
        result = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, StateError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    meta = None
    if args.command == "reference":
        meta = {"problem": config.problem, "space": config.space, "mesh": config.mx,
                "scheme": config.integrator, "cfl": config.cfl, "t_final": result.state.t}
    x, values = result.solution()
    _emit(solution_csv(x, values, meta), config.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
