import subprocess
import sys

import pytest

from multideriv.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from multideriv.config import ConfigError, RunConfig, format_config, parse_config


def test_empty_file_plus_problem_flag(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("")
    cfg = parse_config(path, {"problem": "dam-break", "space": "dg"})
    assert (cfg.cfl, cfg.cfl_max, cfg.t_final, cfg.riemann, cfg.limiter) == (0.08, 0.085, 0.2, "llf", True)
    cfg = parse_config(path, {"problem": "buckley-leverett"})
    assert (cfg.cfl, cfg.t_final, cfg.riemann) == (0.4, 0.4, "hlle")


def test_flags_override_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nproblem = lax-shock-tube\nmx = 80\nintegrator = ssprk3\n")
    cfg = parse_config(path, {"mx": 120, "integrator": None})
    assert (cfg.problem, cfg.mx, cfg.integrator) == ("lax-shock-tube", 120, "ssprk3")


def test_cfl_above_max_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config(None, {"space": "dg", "cfl": 0.1})
    assert info.value.key == "cfl"


@pytest.mark.parametrize("text,key", [
    ("speed = 3\n", "speed"),
    ("mx = ten\n", "mx"),
    ("limiter = maybe\n", "limiter"),
    ("space = fv\n", "space"),
    ("mx = 5\n", "mx"),
    ("riemann = roe\n", "riemann"),
])
def test_bad_entries_name_the_key(tmp_path, text, key):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(ConfigError) as info:
        parse_config(path)
    assert info.value.key == key and key in str(info.value)


def test_round_trip(tmp_path):
    cfg = RunConfig(problem="shock-entropy", space="dg", integrator="tdrk5", mx=77, cfl=0.05,
                    weno_eps=1e-10, out="a.csv").resolved()
    path = tmp_path / "rt.cfg"
    path.write_text(format_config(cfg))
    assert parse_config(path) == cfg


def test_cli_run_weno_and_dg(tmp_path):
    out = tmp_path / "fd.csv"
    assert main(["run", "--problem", "dam-break", "--space", "weno", "--integrator", "tdrk4",
                 "--mx", "30", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "x,q1,q2" and len(lines) == 31
    out = tmp_path / "dg.csv"
    assert main(["run", "--problem", "buckley-leverett", "--space", "dg", "--integrator", "tdrk4",
                 "--mx", "10", "--no-limiter", "--riemann", "llf", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "x,q1" and len(lines) == 41


def test_cli_output_deterministic(tmp_path):
    args = ["run", "--problem", "lax-shock-tube", "--space", "weno", "--integrator", "tdrk4",
            "--mx", "40", "--weno-mode", "js"]
    main(args + ["--out", str(tmp_path / "a.csv")])
    main(args + ["--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_cli_converge(tmp_path):
    out = tmp_path / "conv.csv"
    assert main(["converge", "--space", "weno", "--integrator", "tdrk4", "--cfl", "0.9",
                 "--meshes", "25,50", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "mx,error,order" and len(lines) == 3 and lines[1].endswith(",")


def test_cli_reference_header(tmp_path):
    out = tmp_path / "ref.csv"
    assert main(["reference", "--problem", "lax-shock-tube", "--integrator", "ssprk3",
                 "--mx", "20", "--cfl", "0.1", "--out", str(out)]) == EXIT_OK
    head = out.read_text().splitlines()[:7]
    keys = [line[2:].split(" = ")[0] for line in head if line.startswith("#")]
    assert {"problem", "mesh", "scheme", "cfl", "t_final"} <= set(keys)


def test_cli_exit_codes(capsys):
    assert main(["run", "--problem", "nope"]) == EXIT_CONFIG
    assert main(["converge", "--meshes", "25,x"]) == EXIT_CONFIG
    assert main(["run", "--space", "dg", "--cfl", "0.5"]) == EXIT_CONFIG
    assert main(["run", "--problem", "dam-break", "--mx", "50", "--cfl", "5", "--cfl-max", "10"]) \
        == EXIT_NUMERICAL
    assert "numerical failure" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "multideriv", "run", "--mx", "12",
                           "--t-final", "0.1"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("x,q1\n")
