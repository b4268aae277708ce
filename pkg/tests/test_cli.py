import csv
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from oscspec.cli import UsageError, load_construction, main, parse_config, sample_points
from oscspec.generators import GeneratorSet


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_build_summary(capsys):
    code, out, _ = run(capsys, "build", "--max-level", "4")
    assert code == 0
    assert "levels: 2,4,8,16 blocks" in out
    assert "breakpoints: 7,15,27,47" in out


def test_build_rejects_c(capsys):
    code, _, err = run(capsys, "build", "--c", "1/2")
    assert code == 2 and "(0, 1/4]" in err


def test_build_round_trip(capsys, tmp_path):
    path = tmp_path / "c.json"
    assert run(capsys, "build", "--out", str(path))[0] == 0
    data = json.loads(path.read_text(encoding="utf-8"))
    tree, gens = load_construction(data)
    fresh = GeneratorSet.build(12)
    assert tree == fresh.tree
    assert gens.functions == fresh.functions


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\nc = 1/8\nmax_level = 3\n", encoding="utf-8")
    code, out, _ = run(capsys, "build", "--config", str(cfg))
    assert code == 0 and "2,4,8 blocks" in out
    # flags override the file
    code, out, _ = run(capsys, "build", "--config", str(cfg), "--max-level", "2")
    assert "2,4 blocks" in out


@pytest.mark.parametrize(
    "text, msg",
    [
        ("c = 0.25\n", "not an exact rational"),
        ("colour = red\n", "unknown key"),
        ("max_level\n", "key = value"),
        ("bump_thirds = false\n", "bump_thirds"),
        ("base = 1/2,3/4\n", "V_1"),
    ],
)
def test_bad_config_is_usage_error(capsys, tmp_path, text, msg):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text, encoding="utf-8")
    code, _, err = run(capsys, "build", "--config", str(cfg))
    assert code == 2 and msg in err


def test_parse_config_values():
    vals = parse_config("base = 1009/1024, 1019/1024\nseed=3\nbump_thirds = yes")
    assert vals["seed"] == 3 and vals["bump_thirds"] is True
    assert vals["base"].lo == F(1009, 1024)
    with pytest.raises(UsageError):
        parse_config("max_level = many")


def test_verify_selected(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "verify", "geometry", "isometry", "--count", "20", "--seed", "7",
                        "--out", str(out))
    assert code == 0
    rep = json.loads(out.read_text(encoding="utf-8"))
    assert rep["passed"] and rep["config"]["seed"] == 7
    assert set(rep["suites"]) == {"geometry", "isometry"}
    assert any(d["anchor"] == "geometry.delta_closed_form" for d in rep["discrepancies"])
    assert "PASS" in text and "DISCREPANCY" in text


def test_verify_cantor_has_discrepancies(capsys):
    code, out, _ = run(capsys, "verify", "cantor")
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert any(d["anchor"] == "spectrum.equals_M" for d in rep["discrepancies"])


def test_verify_unknown_check(capsys):
    code, _, err = run(capsys, "verify", "geometry", "magic")
    assert code == 2 and "magic" in err


def test_verify_is_deterministic(capsys):
    a = run(capsys, "verify", "isometry", "--count", "5", "--seed", "1")[1]
    b = run(capsys, "verify", "isometry", "--count", "5", "--seed", "1", "--jobs", "2")[1]
    assert a == b


def test_plot(capsys, tmp_path):
    svg = tmp_path / "p.svg"
    assert run(capsys, "plot", "4", "--out", str(svg))[0] == 0
    text = svg.read_text(encoding="utf-8")
    assert text.startswith("<svg") and "<polyline" in text
    for label in (">0<", ">1/4<", ">1/3<", ">1/2<", ">1<"):
        assert label in text
    assert run(capsys, "plot", "13")[0] == 2


def test_sample(capsys, gens):
    code, out, _ = run(capsys, "sample", "2")
    rows = list(csv.reader(out.splitlines()))
    assert code == 0 and rows[0] == ["t", "f(t)"]
    f = gens.phi(2)
    assert [F(r[0]) for r in rows[1:]] == list(f.xs)
    assert [F(r[1]) for r in rows[1:]] == list(f.ys)
    code, out, _ = run(capsys, "sample", "1", "--count", "9", "--decimals", "4")
    rows = list(csv.reader(out.splitlines()))
    assert len(rows) == 1 + 9 + len(gens.phi(1).xs)
    assert rows[1] == ["0/1", "-1/1", "0.0000", "-1.0000"]
    assert run(capsys, "sample", "0")[0] == 2


def test_sample_points():
    assert sample_points([F(0), F(1)], 0) == [F(0), F(1)]
    assert sample_points([F(0), F(1, 2), F(1)], 3) == [F(0), F(1, 4), F(1, 2), F(3, 4), F(1)]


def test_norm(capsys, tmp_path):
    path = tmp_path / "a.txt"
    path.write_text("1/2\n-1/2\n# done\n", encoding="utf-8")
    code, out, _ = run(capsys, "norm", str(path))
    res = json.loads(out)
    assert code == 0 and res["l1"] == res["sup"] == "1/1" and res["equal"] is True
    path.write_text("1/2\nhalf\n", encoding="utf-8")
    assert run(capsys, "norm", str(path))[0] == 2
    assert run(capsys, "norm", str(tmp_path / "missing"))[0] == 2


def test_spectrum_points_file(capsys, tmp_path):
    path = tmp_path / "pts.txt"
    path.write_text("7/10\n1/3\n401/1000\n", encoding="utf-8")
    code, out, _ = run(capsys, "spectrum", str(path))
    rep = json.loads(out)
    assert code == 0
    assert [p["verdict"] for p in rep["points"]] == [
        "CONSTANCY_CERTIFIED", "OSCILLATION_CERTIFIED", "CONSTANCY_CERTIFIED"]
    code, out2, _ = run(capsys, "spectrum", str(path), "--jobs", "2")
    assert json.loads(out2) == rep


def test_probe(capsys):
    code, out, _ = run(capsys, "probe", "+", "--radii", "1/2048")
    pc = json.loads(out)
    assert code == 0 and pc["verdict"] == "UNDETERMINED_B_REGION"
    assert pc["evidence"][0]["oscillation"] == "2/1" and pc["evidence"][0]["level"] == 2
    assert run(capsys, "probe", "+x")[0] == 2
    assert run(capsys, "probe", "+" * 13)[0] == 2


def test_argparse_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["probe", "+", "--radii", "0"])
    assert exc.value.code == 2


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "oscspec", "build", "--max-level", "2"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0 and "2,4 blocks" in out.stdout
