import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rp2ends import cli
from rp2ends.errors import ConfigError, ParseError


def run(argv, tmp_path=None):
    buf = io.StringIO()
    code = cli.main(argv, stream=buf)
    return code, buf.getvalue()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.mark.parametrize("tok,val", [
    ("2", 2), ("-2", -2), ("+2.5", 2.5), ("i", 1j), ("-i", -1j), ("2i", 2j), ("-2i", -2j),
    ("1+i", 1 + 1j), ("1-i", 1 - 1j), ("-1.5e-3+2e2i", -1.5e-3 + 200j), (".5-.25i", 0.5 - 0.25j),
    (" 3 + 4i ", 3 + 4j),
])
def test_complex_literals(tok, val):
    assert cli.parse_complex(tok) == val


@pytest.mark.parametrize("tok", ["", "i2", "1+", "2j", "1+2", "1++i", "x", "1e", "--1"])
def test_bad_complex_literals(tok):
    with pytest.raises(ParseError) as e:
        cli.parse_complex(tok)
    assert repr(tok) in str(e.value)


@given(st.floats(-1e6, 1e6, allow_nan=False), st.floats(-1e6, 1e6, allow_nan=False))
def test_complex_format_round_trip(a, b):
    z = complex(a, b)
    assert cli.parse_complex(cli.fmt_complex(z)) == z


def test_angles():
    assert cli.parse_angle("pi/3") == pytest.approx(np.pi / 3)
    assert cli.parse_angle("5*pi/3") == pytest.approx(5 * np.pi / 3)
    assert cli.parse_angle("-2pi/3") == pytest.approx(-2 * np.pi / 3)
    assert cli.parse_angle("pi") == pytest.approx(np.pi)
    assert cli.parse_angle("0.25") == 0.25
    with pytest.raises(ParseError):
        cli.parse_angle("tau")


def test_config_grammar():
    raw = cli.read_config_text("# header\nresidue = 1-2i  # trailing\n\n iota=pi/6\n")
    assert raw == {"residue": "1-2i", "iota": "pi/6"}
    cfg = cli.build_config("spectrum", raw)
    assert cfg["residue"] == 1 - 2j and cfg["iota"] == pytest.approx(np.pi / 6)
    with pytest.raises(ConfigError):
        cli.read_config_text("residue 2\n")
    with pytest.raises(ConfigError):
        cli.build_config("spectrum", {"resdue": "2"})
    with pytest.raises(ConfigError):
        cli.build_config("wang", {"Nx": "3.5"})
    fam = cli.build_config("family", {"a-3": "2, 1", "b-1": "0.3"})
    assert fam["a"] == {-3: [2, 1]} and fam["b"] == {-1: [0.3]}


def test_classify_negative_literals():
    code, out = run(["classify", "2", "-2i", "-i", "0"])
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 5
    assert "Hyperbolic" in lines[1] and "plus_infinity" in lines[1]
    assert "QuasiHyperbolic" in lines[2] and "QuasiHyperbolic" in lines[3]
    assert "Parabolic" in lines[4]


def test_exit_codes(tmp_path):
    assert run(["classify", "1+x"])[0] == 2
    assert run(["nonsense"])[0] == 2
    assert run(["spectrum", "0"])[0] == 2
    assert run(["classify", "--config", str(tmp_path / "missing.cfg")])[0] == 2
    bad = write(tmp_path, "bad.cfg", "residue = 2\ncolour = red\n")
    assert run(["spectrum", "--config", bad])[0] == 2
    grid = write(tmp_path, "g.cfg", "field = grid\nfield_file = %s\n" % (tmp_path / "none.csv"))
    assert run(["develop", "--config", grid, "--out", str(tmp_path)])[0] == 2
    # a ray near a table edge does not settle by y_max: numerical failure
    slow = write(tmp_path, "s.cfg", "field = model\nresidue = 2\nangle = 0.5\ny_max = 12\n")
    assert run(["develop", "--config", slow, "--out", str(tmp_path)])[0] == 3


def test_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["spectrum", "2", "-2", "1+i", "--out", str(d), "--format", "csv"])[0] == 0
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()
    rows = (a / "spectrum.csv").read_text().splitlines()
    assert rows[0].startswith("R,class,xi,iota")
    assert rows[3].startswith("1.0+1.0i,Hyperbolic")
    assert run(["classify", "2", "--out", str(a), "--format", "json"])[0] == 0
    rec = json.loads((a / "classify.json").read_text())
    assert rec[0]["class"] == "Hyperbolic" and rec[0]["twist"] == "plus_infinity"


def test_wang_then_grid_holonomy(tmp_path):
    cfg = write(tmp_path, "w.cfg", "residue = 2\nperturbation = 0.3\nNx = 32\nNy = 41\ny1 = 8\n")
    code, out = run(["wang", "--config", cfg, "--out", str(tmp_path)])
    assert code == 0 and "bracketed: True" in out
    summ = json.loads((tmp_path / "wang_summary.json").read_text())
    assert summ["residual_inf"] <= 1e-9
    h = write(tmp_path, "h.cfg", "field = grid\nfield_file = %s\nheights = 4\n"
              % (tmp_path / "wang_grid.csv"))
    code, out = run(["holonomy", "--config", h, "--format", "json", "--out", str(tmp_path)])
    assert code == 0
    rec = json.loads((tmp_path / "holonomy.json").read_text())
    lam = sorted(np.exp(2 * np.pi * np.array([3**0.5, 0, -(3**0.5)])), reverse=True)
    assert rec[0]["class"] == "Hyperbolic"
    assert np.allclose(rec[0]["eigenvalues"], lam, rtol=1e-6)


def test_develop_matches_table(tmp_path):
    for ang, landing in (("0.1", "vertex v1"), ("pi/6", "segment v1v2"), ("5*pi/6", "segment v2v3")):
        cfg = write(tmp_path, "d.cfg", "field = model\nresidue = 2\nangle = %s\n" % ang)
        code, out = run(["develop", "--config", cfg, "--out", str(tmp_path), "--svg"])
        assert code == 0, out
        assert landing in out and "(match)" in out
        assert (tmp_path / "develop.svg").read_text().startswith("<svg")


def test_triangle_command():
    code, out = run(["triangle"])
    assert code == 0
    rows = out.splitlines()[1:]
    assert len(rows) == 6 and all(r.rstrip().endswith("true") for r in rows)


def test_levinson_command(tmp_path):
    code, out = run(["levinson", "--out", str(tmp_path)])
    assert code == 0
    s = json.loads((tmp_path / "levinson_summary.json").read_text())
    assert s["q"] == 2 and s["tail_error"] < 1e-6
    head = (tmp_path / "levinson_solution.csv").read_text().splitlines()[0]
    assert head == "y,re_x1,re_x2,im_x1,im_x2"


def test_family_commands(tmp_path):
    qh = write(tmp_path, "f.cfg", "a-3 = 2, 1\na-2 = 1\nt_list = 1e-2, 1e-3, 1e-4\n")
    code, out = run(["family", "--config", qh, "--out", str(tmp_path)])
    assert code == 0 and "monotone tail: pass" in out
    lines = (tmp_path / "family_sweep.csv").read_text().splitlines()
    assert lines[0] == "t,lambda1,lambda2,lambda3,dev1,dev2,dev3,residual,barrier_sup"
    assert len(lines) == 4
    par = write(tmp_path, "p.cfg", "kind = ParabolicNeck\ndecay_C = 1\nt_list = 1e-2, 1e-4\n")
    assert run(["family", "--config", par, "--out", str(tmp_path)])[0] == 0
    s = json.loads((tmp_path / "family_summary.json").read_text())
    assert s["rows_decay_like_inverse_log"]
    nodecay = write(tmp_path, "n.cfg", "kind = ParabolicNeck\nt_list = 1e-2, 1e-4\n")
    assert run(["family", "--config", nodecay, "--out", str(tmp_path)])[0] == 2
