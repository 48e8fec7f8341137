import csv
import io
import json

import numpy as np
import pytest

from substatic import cli
from substatic import config as CFG
from substatic import models as M
from substatic import serialize as SER
from substatic.acceptance import REGISTRY
from substatic.errors import ConfigError
from substatic.functionals import Base, volume_functional


def _doc(**over):
    doc = {
        "schema": 1,
        "model": {"family": "schwarzschild", "mass": 0.5},
        "checks": [{"name": "willmore", "surface": {"type": "sphere", "r": 3.0}}],
    }
    doc.update(over)
    return doc


def test_parse_valid_config():
    cfg = CFG.parse_config(_doc(tolerances={"willmore": 1e-8}, output={"format": "csv"}))
    assert cfg.model.family == "schwarzschild" and cfg.model.mass == 0.5
    assert cfg.tolerances == {"willmore": 1e-8}


@pytest.mark.parametrize(
    "bad",
    [
        _doc(extra=1),
        _doc(schema=2),
        _doc(checks=[{"name": "no_such_check"}]),
        _doc(tolerances={"willmore": 0.0}),
        _doc(tolerances={"willmore": -1.0}),
        _doc(model={"family": "schwarzschild", "mass": 0.5, "spin": 1.0}),
        _doc(output={"format": "xml"}),
        _doc(checks=[{"name": "willmore", "surface": {"type": "torus"}}]),
    ],
)
def test_reject_bad_config(bad):
    with pytest.raises(ConfigError):
        CFG.parse_config(bad)


def test_every_check_name_dispatches():
    tr = M.schwarzschild(0.5)
    args = {
        "laplacian_comparison": {"r0": 2.0},
        "area_series": {"base": 2.0, "t_grid": [0.0, 1.0]},
        "volume_series": {"base": 2.0, "t_grid": [0.0, 1.0]},
        "avr_base_independence": {"bases": [2.0, 3.0]},
        "willmore": {"surface": {"type": "sphere", "r": 3.0}},
        "isoperimetric": {"surface": {"type": "sphere", "r": 3.0}},
        "heintze_karcher": {"surface": {"type": "sphere", "r": 3.0}},
        "boundary_minimizing": {"surfaces": [{"type": "sphere", "r": 3.0}]},
        "lagrange_multiplier": {"surface": {"type": "sphere", "r": 3.0}},
        "isoperimetric_profile": {"V_grid": [1.0, 10.0]},
        "first_variation": {"surface": {"type": "cosine", "coeffs": [3.0, 0.2]}},
        "f_pinching": {"k": 0.5, "window": [2.0, 100.0]},
        "cd01": {"r": [3.0]},
    }
    skip = {"small_t_limit"}  # needs a capped model
    for name in CFG.CHECK_NAMES:
        if name in skip:
            continue
        check = {"name": name, **args.get(name, {})}
        CFG.parse_config(_doc(checks=[check]))
        reports, _ = CFG.run_check(tr, check)
        assert reports, name
    flat = M.euclidean()
    reports, _ = CFG.run_check(flat, {"name": "small_t_limit"})
    assert reports[0].passed


def test_make_base():
    assert CFG.make_base("point").kind == "point"
    assert CFG.make_base(3.0).r0 == 3.0
    assert CFG.make_base({"r0": 2.0, "eta0": 1.5}).eta0 == 1.5


def _series():
    tr = M.reissner_nordstrom(1.0, 0.5)
    return volume_functional(tr, Base.sphere(4.0), [0.0, 0.1, 1.0, 10.0], k=1.5)


def test_series_csv_is_byte_stable():
    a, b = SER.emit_series(_series()), SER.emit_series(_series())
    assert a == b
    assert a.startswith("t,A,V\n") and "\r" not in a
    rows = list(csv.reader(io.StringIO(a)))
    assert len(rows) == 5
    assert float(rows[1][2]) == pytest.approx(2.0)


def test_series_json_round_trip():
    s = _series()
    back = json.loads(SER.emit_series(s, "json"))
    assert [row["t"] for row in back] == s.t_grid.tolist()
    assert [row["A"] for row in back] == s.A.tolist()
    assert [row["V"] for row in back] == s.V.tolist()


def test_float_formatting():
    assert SER.fmt_float(0.1) == "0.1"
    assert SER.fmt_float(float("inf")) == "inf"
    assert float(SER.fmt_float(1 / 3)) == 1 / 3
    assert json.loads(SER.to_json({"x": np.float64(2.5), "y": np.array([1, 2]), "z": float("nan")})) == {
        "x": 2.5,
        "y": [1, 2],
        "z": "nan",
    }


def test_series_written_to_file(tmp_path):
    path = tmp_path / "series.csv"
    text = SER.emit_series(_series(), "csv", path)
    assert path.read_bytes() == text.encode()


def test_cli_model(capsys):
    assert cli.run(["model", "--family", "reissner-nordstrom", "--m", "1", "--q", "0.6"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["r_min"] == pytest.approx(1.8)


@pytest.mark.parametrize(
    "argv",
    [
        ["model", "--family", "reissner-nordstrom", "--m", "1", "--q", "2"],
        ["model", "--family", "warp-drive"],
        ["model", "--family", "schwarzschild", "--m", "-1"],
        ["model"],
        ["check", "bogus", "--family", "schwarzschild"],
        ["suite", "--config", "/nonexistent.json"],
        ["suite", "--criteria", "99"],
        ["willmore", "--family", "schwarzschild", "--m", "0.5", "--sphere", "3", "--avr", "soon"],
    ],
)
def test_cli_errors_exit_2(argv, capsys):
    assert cli.run(argv) == 2


def test_cli_check_pass_and_fail(capsys):
    assert cli.run(["check", "substatic", "--family", "reissner-nordstrom", "--m", "1", "--q", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["passed"]
    assert cli.run(["check", "substatic", "--family", "schwarzschild", "--m", "1", "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("name,lhs,rhs,margin,tol,passed,equality\n")


def test_cli_compare(capsys, tmp_path):
    assert cli.run(["compare", "--family", "schwarzschild", "--m", "0.5", "--r0", "2", "--points", "5"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["t", "A", "V"] and len(rows) == 6
    assert all(abs(float(r[1]) - 1.0) < 1e-12 for r in rows[1:])
    out = tmp_path / "empty.csv"
    assert cli.run(["compare", "--family", "schwarzschild", "--m", "0.5", "--points", "0", "-o", str(out)]) == 0
    assert out.read_text() == "t,A,V\n"


def test_cli_inequalities(capsys):
    assert cli.run(["willmore", "--family", "schwarzschild", "--m", "0.5", "--coeffs", "3", "0.3"]) == 0
    assert json.loads(capsys.readouterr().out)["reports"][0]["margin"] > 0
    assert cli.run(["isoperimetric", "--family", "space-form", "--sphere", "1", "--avr", "closed-form"]) == 0


def test_cli_ends(capsys):
    assert cli.run(["ends", "--family", "schwarzschild", "--m", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["end"] == "f-complete"
    cli.run(["ends", "--family", "schwarzschild-ads", "--m", "1", "--lam", "-3"])
    assert json.loads(capsys.readouterr().out)["end"] == "conformally-compact"


def test_cli_geodesic(capsys):
    argv = ["geodesic", "--family", "schwarzschild", "--m", "0.5", "--r", "3", "--alpha", "0.5", "--length", "1"]
    assert cli.run(argv) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["rho", "r", "phi", "eta", "h_over_f"]
    assert len(rows) == 12
    assert cli.run(argv + ["--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["energy_drift"] < 1e-12


def test_cli_suite_config(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(_doc(checks=[
        {"name": "willmore", "surfaces": [{"type": "sphere", "r": 2.0}, {"type": "cosine", "coeffs": [3.0, 0.3]}]},
        {"name": "substatic"},
    ])))
    assert cli.run(["suite", "--config", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [r["equality"] for r in out["reports"]] == [True, False, True]


def test_cli_suite_criteria(capsys):
    assert cli.run(["suite", "--criteria", "2", "3", "--format", "json"]) == 0
    captured = capsys.readouterr()
    assert captured.err.count("[PASS]") == 2
    assert [c["criterion"] for c in json.loads(captured.out)["criteria"]] == [2, 3]


def test_registry_is_complete():
    assert sorted(REGISTRY) == list(range(1, 12))
    assert all(c.title for c in REGISTRY.values())
