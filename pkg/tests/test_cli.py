import csv
import math

import pytest

from hermite_maxwell import cli
from hermite_maxwell.config import ConfigError, RunConfig, parse_config
from hermite_maxwell.diagnostics import RunReport

BASE = """\
regime: dielectric
m: 2
k: 2
t_final: {t}
grid: {grid}
output: {out}
"""


def write(tmp_path, name="run.yaml", t=1.0, grid=8, extra=""):
    path = tmp_path / name
    path.write_text(BASE.format(t=t, grid=grid, out=tmp_path / "out") + extra)
    return path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_solve_writes_timeseries(tmp_path, capsys):
    assert cli.main(["solve", str(write(tmp_path))]) == 0
    rows = read_rows(tmp_path / "out" / "timeseries.csv")
    assert tuple(rows[0]) == RunReport.COLUMNS
    assert rows[1][0] == "0" and float(rows[-1][1]) == 1.0
    raw = (tmp_path / "out" / "timeseries.csv").read_bytes()
    assert b"\r\n" in raw
    assert "max rel L2 error" in capsys.readouterr().out


def test_zero_final_time_gives_one_row(tmp_path):
    assert cli.main(["solve", str(write(tmp_path, t=0))]) == 0
    assert len(read_rows(tmp_path / "out" / "timeseries.csv")) == 2


def test_floats_use_17_significant_digits(tmp_path):
    cli.main(["solve", str(write(tmp_path))])
    rows = read_rows(tmp_path / "out" / "timeseries.csv")
    val = rows[-1][4]
    assert float(val) == float(format(float(val), ".17g"))
    assert cli.fmt(0.1) == "0.10000000000000001" and cli.fmt(None) == "" and cli.fmt(3) == "3"


def test_unknown_key_is_named_with_line(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("regime: dielectric\nm: 2\nmm: 3\nk: 2\nt_final: 1\ngrid: 8\n")
    assert cli.main(["solve", str(path)]) == cli.EXIT_CONFIG
    err = capsys.readouterr().err
    assert "'mm'" in err and "line 3" in err


@pytest.mark.parametrize("text,fragment", [
    ("m: 2\nk: 2\nt_final: 1\ngrid: 8\n", "regime"),
    ("regime: dielectric\nm: 2.5\nk: 2\nt_final: 1\ngrid: 8\n", "integer"),
    ("regime: dielectric\nm: 2\nk: 2\nt_final: 1\ngrid: [8, 1]\n", "grid"),
    ("regime: dielectric\nm: 2\nk: 2\nt_final: 1\ngrid: 8\nmedium: {epsilon: -1}\n", "medium.epsilon"),
    ("regime: dielectric\nm: 2\nk: 2\nt_final: 1\ngrid: 8\nmedium: {electric_poles: [{strength: 1, resonance: 1}]}\n",
     "pole"),
    ("regime: lorentz_resonant\nm: 2\nk: 2\nt_final: 1\ngrid: 8\nmedium: {epsilon: 1}\n", "pole"),
    ("regime: dielectric\nm: 2\nk: 2\nt_final: 1\ngrid: 8\ndiagnostics: {every: 2}\n", "diagnostics.every"),
    ("regime: dielectric\nm: 2\nk: 2\nt_final: 1\ngrid: 8\nstart: cold\n", "start"),
    ("regime: dielectric\nm: [2\n", "syntax"),
    ("", "empty"),
])
def test_schema_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


def test_config_defaults_and_lorentz_medium():
    cfg = parse_config("regime: lorentz_resonant\nm: 3\nk: 10\nt_final: 5\ngrid: [20, 24, 28]\n")
    assert isinstance(cfg, RunConfig)
    assert cfg.cfl == 0.9 and cfg.q is None and cfg.dissipation and cfg.start == "exact"
    assert cfg.error_every == 1 and cfg.energy_every == 10
    assert cfg.medium.electric_poles[0].damping == 0.0107
    sc = cfg.solver(20)
    assert sc.q == 5 and sc.n == 20


def test_explicit_medium_block():
    cfg = parse_config("regime: sellmeier_highfreq\nm: 3\nk: 10\nt_final: 5\ngrid: 20\n"
                       "medium:\n  epsilon: 1\n  mu: 1\n  electric_poles:\n"
                       "    - {strength: 1.8, resonance: 1.0, damping: 0}\n")
    assert cfg.medium.electric_poles[0].strength == 1.8


def test_solve_rejects_grid_list(tmp_path):
    assert cli.main(["solve", str(write(tmp_path, grid="[8, 10, 12]"))]) == cli.EXIT_CONFIG


def test_missing_file(tmp_path):
    assert cli.main(["solve", str(tmp_path / "nope.yaml")]) == cli.EXIT_CONFIG


def test_sweep_and_rates(tmp_path, capsys):
    path = write(tmp_path, grid="[8, 10, 12]")
    assert cli.main(["sweep", str(path)]) == 0
    out = tmp_path / "out"
    rows = cli.read_convergence(out / "convergence.csv")
    assert [r[0] for r in rows] == [8, 10, 12]
    for n, dof, _ in rows:
        assert dof == n * 3 / 2.0
    for n in (8, 10, 12):
        assert (out / f"N{n}" / "timeseries.csv").exists()
    summary = (out / "summary.txt").read_text()
    assert "fitted rate" in summary
    capsys.readouterr()
    assert cli.main(["rates", str(out / "convergence.csv")]) == 0
    rate = float(capsys.readouterr().out.split(":")[1])
    assert f"{rate:.4f}" in summary


def test_sweep_needs_three_grids(tmp_path):
    assert cli.main(["sweep", str(write(tmp_path, grid="[8, 10]"))]) == cli.EXIT_CONFIG


def test_rates_on_a_perfect_power_law(tmp_path, capsys):
    path = tmp_path / "c.csv"
    cli.write_convergence([(n, n * 4 / 10, 5.0 * (n * 0.4) ** -9.0) for n in (20, 30, 40, 50)], path)
    assert cli.main(["rates", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "fitted rate: 9.0000"


def test_rates_rejects_wrong_header(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("n,err\n1,2\n")
    assert cli.main(["rates", str(path)]) == cli.EXIT_FAILED


def test_output_directory_override(tmp_path, monkeypatch):
    target = tmp_path / "elsewhere"
    monkeypatch.setenv("HERMITE_OUTPUT_DIR", str(target))
    assert cli.main(["solve", str(write(tmp_path))]) == 0
    assert (target / "timeseries.csv").exists()
    assert not (tmp_path / "out").exists()


def test_runs_are_deterministic(tmp_path):
    path = write(tmp_path, extra="diagnostics: {energy_every: 1}\n")
    cli.main(["solve", str(path)])
    first = (tmp_path / "out" / "timeseries.csv").read_bytes()
    cli.main(["--threads", "1", "solve", str(path)])
    assert (tmp_path / "out" / "timeseries.csv").read_bytes() == first


def test_bad_thread_count(tmp_path):
    assert cli.main(["--threads", "0", "solve", str(write(tmp_path))]) == cli.EXIT_CONFIG


def test_instability_exit_code_and_partial_output(tmp_path):
    path = write(tmp_path, t=60, grid=12, extra="cfl: 2.5\n")
    with pytest.warns(UserWarning):
        assert cli.main(["solve", str(path)]) == cli.EXIT_UNSTABLE
    rows = read_rows(tmp_path / "out" / "timeseries.csv")
    assert len(rows) > 2


def test_sweep_abort_keeps_partial_results(tmp_path):
    path = write(tmp_path, t=60, grid="[4, 12, 14]", extra="cfl: 2.5\n")
    with pytest.warns(UserWarning):
        code = cli.main(["sweep", str(path)])
    assert code == cli.EXIT_UNSTABLE
    out = tmp_path / "out"
    assert "aborted" in (out / "summary.txt").read_text()
    assert (out / "convergence.csv").exists()
