import shutil
import subprocess
import sys

import numpy as np
import pytest

from boussinesq_lab.asymptotics import RegionConstants, RegionLabel, classify_region
from boussinesq_lab.cli import main, rh_suites
from boussinesq_lab.config import ConfigError, Expression, load_config, parse_config
from boussinesq_lab.harness import (ComparisonRow, StabilityError, comparison_rows, exact_member,
                                    gnuplot_compare, simulate_times)
from boussinesq_lab.rh import ReflectionSamples
from boussinesq_lab.spectral import PeriodicGrid, paper_mb, read_state_csv

SMALL_MB = """\
# small desk-scale run
run.system = MB
initial.builtin = paper-mb
grid.L = 200
grid.N = 2048
stepping.dt = auto
output.times = 25, 50
compare.y_max = 2
"""


# --- expressions and config parsing -------------------------------------------

def test_expression_grammar():
    x = np.linspace(-2, 2, 5)
    e = Expression("-(1/10)*exp(-x^2/20) + sech(x)*sin(pi*x)")
    assert np.allclose(e(x), -0.1 * np.exp(-x**2 / 20) + np.sin(np.pi * x) / np.cosh(x))
    assert np.all(Expression("3")(x) == 3.0)


@pytest.mark.parametrize("text", ["__import__('os')", "x.real", "open(x)", "x if x else 1", "[x]",
                                  "exp(x, x)", "y + 1", "x +"])
def test_expression_rejects(text):
    with pytest.raises(ConfigError):
        Expression(text)


def test_parse_defaults_and_keys():
    cfg = parse_config(SMALL_MB)
    assert cfg.system == "MB" and cfg.builtin == "paper-mb"
    assert cfg.half_length == 200.0 and cfg.n_points == 2048
    assert cfg.dt is None and cfg.times == (25.0, 50.0)
    assert cfg.regions == RegionConstants()


def test_parse_gb_defaults_to_paper_gb():
    cfg = parse_config("run.system = GB\n")
    assert cfg.builtin == "paper-gb"
    assert cfg.companion_state().system == "MB"


def test_parse_expressions():
    cfg = parse_config("initial.a = 0\ninitial.b = exp(-x^2)\ngrid.L = 10\ngrid.N = 64\n")
    s = cfg.initial_state()
    assert s.system == "MB" and not s.field_a.any()
    assert s.field_b[32] == 1.0


@pytest.mark.parametrize("text", [
    "grid.L = 200\nbogus.key = 1\n",
    "grid.N = 1000\n",
    "output.times = 300, 100\n",
    "compare.y_max = -1\n",
    "initial.builtin = nope\n",
    "run.system = GB\ninitial.builtin = paper-mb\n",
    "initial.a = x\n",
    "stepping.dealias = maybe\n",
    "regions.c1 = -2\n",
    "no equals sign\n",
    "grid.L = abc\n",
])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_load_missing(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config"):
        load_config(tmp_path / "absent.cfg")


# --- harness pieces -----------------------------------------------------------

def test_dt_above_bound_is_rejected():
    g = PeriodicGrid(50.0, 256)
    with pytest.raises(StabilityError, match="rejected step"):
        simulate_times(paper_mb(g), [1.0], dt=1.0)


def test_row_format_and_region_labels():
    g = PeriodicGrid(100.0, 512)
    s = simulate_times(paper_mb(g), [30.0])[0]
    rows = comparison_rows(s, exact_member(np.linspace(-4, 4, 801)), 3.0)
    assert rows and {r.field for r in rows} == {"p", "q"}
    for r in rows:
        assert r.region is classify_region(r.x, r.t)
        assert np.isfinite([r.simulated, r.asymptotic, r.abs_error, r.error_order]).all()
    origin = next(r for r in rows if r.x == 0.0)
    line = origin.csv().split(",")
    assert len(line) == len(ComparisonRow.HEADER.split(","))
    assert line[6] == RegionLabel.PAINLEVE.value


def test_gnuplot_script_text():
    gp = gnuplot_compare("comparison.csv", [100.0, 300.0], ("p", "q"))
    assert "set datafile separator ','" in gp
    assert gp.count("dt 1") == 4 and gp.count("dt 2") == 4
    assert "multiplot layout 2,1" in gp


def test_rh_suites_zero_reflection_pass():
    for name, val, tol in rh_suites(ReflectionSamples.zero(), 3):
        assert val <= tol, name


# --- command line -------------------------------------------------------------

@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(SMALL_MB)
    return p


def test_simulate_writes_snapshots(tmp_path, small_cfg):
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(small_cfg), "--out", str(out), "--quiet"]) == 0
    files = sorted(out.glob("snapshot_MB_*.csv"))
    assert [f.name for f in files] == ["snapshot_MB_t25.csv", "snapshot_MB_t50.csv"]
    assert read_state_csv(files[1]).t == 50.0


def test_simulate_zero_data(tmp_path):
    cfg = tmp_path / "z.cfg"
    cfg.write_text("initial.a = 0\ninitial.b = 0\ngrid.L = 20\ngrid.N = 64\noutput.times = 1\n")
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    s = read_state_csv(out / "snapshot_MB_t1.csv")
    assert not s.field_a.any() and not s.field_b.any()


def test_simulate_rejects_large_dt(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("grid.L = 50\ngrid.N = 256\nstepping.dt = 2\noutput.times = 4\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path), "--quiet"]) == 3
    assert "rejected step" in capsys.readouterr().err


def test_config_errors_exit_two(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("grid.N = 3\n")
    assert main(["simulate", "--config", str(cfg), "--quiet"]) == 2
    assert main(["simulate", "--quiet"]) == 2
    assert main(["no-such-command"]) == 2
    assert main(["regions", "--c1", "-1", "--out", str(tmp_path)]) == 2


def test_compare_small_run_is_deterministic(tmp_path, small_cfg):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["compare", "--config", str(small_cfg), "--out", str(d), "--quiet"]) == 0
    for name in ("comparison.csv", "error_summary.csv", "compare.gp"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    lines = (a / "comparison.csv").read_text().splitlines()
    assert lines[0] == ComparisonRow.HEADER
    summary = (a / "error_summary.csv").read_text()
    assert "# decay q t=25->50" in summary


def test_compare_zero_data_has_zero_errors(tmp_path):
    cfg = tmp_path / "z.cfg"
    cfg.write_text("initial.a = 0\ninitial.b = 0\ngrid.L = 100\ngrid.N = 512\noutput.times = 25, 30\n")
    out = tmp_path / "o"
    assert main(["compare", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    body = (out / "comparison.csv").read_text().splitlines()[1:]
    # zero up to round-off of the Hermite interpolant of a linear P
    assert body and all(float(r.split(",")[5]) <= 1e-16 for r in body)


def test_compare_early_extraction_is_a_config_error(tmp_path):
    cfg = tmp_path / "e.cfg"
    cfg.write_text("grid.L = 50\ngrid.N = 256\noutput.times = 5, 10\n")
    assert main(["compare", "--config", str(cfg), "--out", str(tmp_path), "--quiet"]) == 2


def test_compare_without_rows_exits_four(tmp_path):
    cfg = tmp_path / "w.cfg"
    cfg.write_text("grid.L = 50\ngrid.N = 256\noutput.times = 0\ncompare.source = seed\n")
    assert main(["compare", "--config", str(cfg), "--out", str(tmp_path), "--quiet"]) == 4


def test_painleve_line(tmp_path):
    out = tmp_path / "p"
    assert main(["painleve", "--a", "0", "--y-seed", "-20", "--y-end", "2", "--out", str(out),
                 "--quiet"]) == 0
    rep = (out / "painleve_diagnostics.txt").read_text()
    res = float(rep.split("model_residual")[1].split("=")[1].split()[0])
    assert res <= 1e-10
    assert (out / "painleve.csv").read_text().splitlines()[1] == "y,P,dP"


def test_painleve_seeded_report(tmp_path):
    out = tmp_path / "p"
    assert main(["painleve", "--a", "0.05", "--y-seed", "-40", "--y-end", "0", "--compare-seed", "-60",
                 "--out", str(out), "--quiet"]) == 0
    rep = dict(l.split(" = ") for l in (out / "painleve_diagnostics.txt").read_text().splitlines()
               if " = " in l)
    res = float(next(v for k, v in rep.items() if k.startswith("model_residual")))
    assert res <= 1e-6
    disc = float(next(v for k, v in rep.items() if k.startswith("seed_discrepancy")))
    assert disc <= 1 / 40


def test_painleve_pole_exit(tmp_path, capsys):
    assert main(["painleve", "--a", "0.5", "--y-end", "5", "--out", str(tmp_path), "--quiet"]) == 5
    assert "pole encountered at y=" in capsys.readouterr().err


@pytest.mark.parametrize("preset,amp", [("zero", "0"), ("gaussian", "0.5"), ("bump", "0.7")])
def test_rh_check_passes(tmp_path, preset, amp):
    assert main(["rh-check", "--preset", preset, "--amplitude", amp, "--samples", "4",
                 "--out", str(tmp_path), "--quiet"]) == 0
    assert "FAIL" not in (tmp_path / "rh_check.txt").read_text()


def test_rh_check_rejects_amplitude(tmp_path):
    assert main(["rh-check", "--preset", "gaussian", "--amplitude", "1.1", "--quiet"]) == 2


def test_regions_boundaries(tmp_path):
    assert main(["regions", "--t-list", "1e4", "--out", str(tmp_path), "--quiet"]) == 0
    row = (tmp_path / "regions.csv").read_text().splitlines()[1].split(",")
    assert [float(v) for v in row] == pytest.approx([1e4, 200.0, 1000.0, 2500.0])


def test_regions_nested_curves(tmp_path):
    assert main(["regions", "--out", str(tmp_path), "--quiet"]) == 0
    data = np.loadtxt(tmp_path / "regions.csv", delimiter=",", skiprows=1)
    assert np.all(np.diff(data[:, 0]) > 0)
    # each curve is monotone in t; with the defaults they are nested only for
    # t >= 256 (c1 t^1/2 = c2 t^3/4 at t = 16, c2 t^3/4 = c3 t at t = 256)
    for j in (1, 2, 3):
        assert np.all(np.diff(data[:, j]) > 0)
    late = data[:, 0] >= 256
    assert np.all(data[late, 1] <= data[late, 2]) and np.all(data[late, 2] <= data[late, 3])
    assert not np.all(data[~late, 2] <= data[~late, 3])
    assert (tmp_path / "regions.gp").exists()


@pytest.mark.skipif(shutil.which("boussinesq-lab") is None, reason="console script not installed")
def test_console_script_exit_code(tmp_path):
    r = subprocess.run(["boussinesq-lab", "regions", "--t-list", "100", "--out", str(tmp_path), "--quiet"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    r = subprocess.run([sys.executable, "-m", "boussinesq_lab.cli", "rh-check", "--amplitude", "1.5",
                        "--quiet"], capture_output=True, text=True)
    assert r.returncode == 2
