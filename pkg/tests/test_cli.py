import json
import re

import numpy as np
import pytest

from nmkdv import cli
from nmkdv.validation import read_field_csv


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_kappa_pure_step(capsys):
    code, out, _ = run(["kappa", "--profile", "pure-step", "--A", "1"], capsys)
    assert code == 0
    vals = dict(re.findall(r"^(\w+)=(\S+)$", out, re.M))
    assert float(vals["kappa_root"]) == pytest.approx(0.5, rel=1e-8)
    assert float(vals["kappa_formula"]) == pytest.approx(0.5, rel=1e-8)
    assert float(vals["reldiff"]) <= 1e-8


def test_soliton_field(tmp_path, capsys):
    path = tmp_path / "sol.csv"
    code, _, _ = run(["soliton", "--A", "2", "--gamma0", "-1", "--x", "-10:10:0.01",
                      "--t", "-1:1:0.01", "--output", str(path)], capsys)
    assert code == 0
    f = read_field_csv(path)
    i = int(np.argmin(np.abs(f.t_values)))
    j = int(np.argmin(np.abs(f.x_values)))
    assert f.t_values[i] == 0 and f.x_values[j] == 0
    assert f.u[i, j] == 1.0
    assert path.read_text().startswith("# nmkdv ")


def test_residual_command(tmp_path, capsys):
    path = tmp_path / "sol.csv"
    run(["soliton", "--A", "1", "--x", "-10:10:0.05", "--t", "-0.5:0.5:0.05", "--output", str(path)], capsys)
    code, out, _ = run(["residual", "--input", str(path)], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[1].startswith("max_abs,rms,n_points")
    assert float(lines[2].split(",")[0]) < 1e-4


def test_scatter_schema(capsys):
    code, out, _ = run(["scatter", "--A", "2", "--n_k", "3", "--k_min", "0.5", "--k_max", "2"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == "k,a1_re,a1_im,a2_re,a2_im,b_re,b_im,r1_re,r1_im,r2_re,r2_im"
    row = dict(zip(lines[1].split(","), map(float, lines[-1].split(","))))
    assert row["k"] == 2.0 and row["a1_re"] == pytest.approx(1.25, rel=1e-9)


def test_asym_rays(capsys):
    code, out, _ = run(["asym", "--A", "2", "--xi", "-1", "--t", "-100,100", "--format", "jsonl"], capsys)
    assert code == 0
    recs = [json.loads(l) for l in out.splitlines()[1:]]
    assert [r["sector"] for r in recs] == ["R_IV", "R_II"]
    assert recs[0]["u_leading"] == pytest.approx(2.0)


def test_threads_do_not_change_output(capsys, monkeypatch):
    argv = ["asym", "--A", "2", "--xi", "-1,-2,0.1", "--t", "-50,-10,10,50"]
    _, one, _ = run(argv, capsys)
    monkeypatch.setenv("NMKDV_THREADS", "3")
    _, three, _ = run(argv, capsys)
    assert one == three
    monkeypatch.setenv("NMKDV_THREADS", "many")
    assert run(argv, capsys)[0] == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# pure step\nA = 2   # amplitude\nprofile = pure-step\n")
    code, out, _ = run(["kappa", "--config", str(cfg)], capsys)
    assert code == 0 and "A=2.0" in out.splitlines()[0]
    assert "kappa_formula=1\n" in out


@pytest.mark.parametrize("argv", [
    ["kappa", "--bogus", "1"],
    ["kappa", "--A", "abc"],
    ["kappa", "--A", "-1"],
    ["soliton", "--A", "1", "--x", "1:0:0.1", "--t", "0:1:0.1"],
    ["soliton", "--A", "1"],
    ["kappa", "--profile", "no-such-preset"],
    ["kappa", "--format", "xml"],
    ["nonsense"],
])
def test_config_errors_exit_2(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("A = 1\ncolour = blue\n")
    code, _, err = run(["kappa", "--config", str(cfg)], capsys)
    assert code == 2 and "colour" in err


def test_numerical_failure_exit_1(capsys):
    # asymptotic parameter outside its admissible range
    assert run(["asym", "--xi", "-1", "--t", "10", "--alpha", "0.1"], capsys)[0] == 1


def test_validate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(["validate", "--output", str(a)], capsys)[0] == 0
    assert run(["validate", "--output", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert "FAIL" not in a.read_text()


def test_write_dataset(tmp_path):
    p = tmp_path / "empty.csv"
    cli.write_dataset([], "csv", str(p), meta="m")
    assert p.read_text() == "# m\n"
    p = tmp_path / "c.csv"
    cli.write_dataset([{"k": 1.0, "z": 1 + 2j}, {"k": 0.1, "z": -0.5j}], "csv", str(p))
    assert p.read_text().splitlines() == ["k,z_re,z_im", "1.0,1.0,2.0", "0.1,-0.0,-0.5"]
    p = tmp_path / "c.jsonl"
    cli.write_dataset([{"k": 1.0, "z": 1 + 2j}], "jsonl", str(p), meta="m")
    assert json.loads(p.read_text().splitlines()[1]) == {"k": 1.0, "z_re": 1.0, "z_im": 2.0}


def test_parse_values():
    assert np.allclose(cli.parse_values("-1:1:0.5"), [-1, -0.5, 0, 0.5, 1])
    assert list(cli.parse_values("1,2.5")) == [1.0, 2.5]
    with pytest.raises(cli.ConfigError):
        cli.parse_values("a:b")
