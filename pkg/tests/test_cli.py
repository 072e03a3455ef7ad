import csv
import io
import json
import math

import pytest

from pluripot.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_quarterpair(capsys):
    code, out, _ = run(capsys, "eval", "--set", "quarterpair", "--point", "2,0,0,0")
    assert code == 0
    first, blob = out.splitlines()
    assert float(first) == pytest.approx(0.5 * math.log(7 + 4 * math.sqrt(3)), rel=1e-15)
    assert json.loads(blob)["value"] == float(first)


def test_eval_density_and_negative_point(capsys):
    code, out, _ = run(capsys, "eval", "--set", "disk", "--point", "-0.5,0,0,0")
    obj = json.loads(out.splitlines()[1])
    assert code == 0 and obj["value"] == 0.0 and obj["density"] == pytest.approx(1 / math.sqrt(0.75))


def test_eval_json_descriptor(capsys, tmp_path):
    desc_file = tmp_path / "sp.json"
    desc_file.write_text(json.dumps({"kind": "quarterpair", "affine": [[1, 0], [0, 1], [1, 0]]}))
    code, out, _ = run(capsys, "eval", "--set", str(desc_file), "--point", "3,0,0,0")
    assert code == 0
    assert float(out.splitlines()[0]) == pytest.approx(0.5 * math.log(7 + 4 * math.sqrt(3)), rel=1e-14)


def test_eval_errors(capsys):
    assert run(capsys, "eval", "--set", "pacman", "--point", "2,0,0,0")[0] == 3
    assert run(capsys, "eval", "--set", "hexagon", "--point", "2,0,0,0")[0] == 2
    assert run(capsys, "eval", "--set", "square", "--point", "2,0,0")[0] == 2
    assert run(capsys, "eval", "--set", "interval", "--point", "2,0,1,0")[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--set", "square"])
    assert exc.value.code == 2


def test_grid(capsys, tmp_path):
    out = tmp_path / "g.csv"
    code, _, _ = run(capsys, "grid", "--set", "square", "--window", "-1.5,1.5,-1.5,1.5",
                     "--res", "4,3", "--out", str(out), "--threads", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 12
    assert float(rows[0]["x"]) == pytest.approx(-1.125) and float(rows[0]["y"]) == pytest.approx(-1.0)
    inside = [r for r in rows if abs(float(r["x"])) <= 1 and abs(float(r["y"])) <= 1]
    assert inside and all(float(r["value"]) == 0.0 for r in inside)


def test_grid_is_thread_independent(capsys):
    a = run(capsys, "grid", "--set", "simplex", "--window", "-1,2,-1,2", "--res", "7", "--threads", "1")[1]
    b = run(capsys, "grid", "--set", "simplex", "--window", "-1,2,-1,2", "--res", "7", "--threads", "3")[1]
    assert a == b


def test_grid_errors(capsys):
    assert run(capsys, "grid", "--set", "square", "--window", "1,0,0,1")[0] == 2
    assert run(capsys, "grid", "--set", "square", "--window", "0,1,0,1", "--res", "5000")[0] == 2
    assert run(capsys, "grid", "--set", "pacman", "--window", "0,1,0,1")[0] == 3


def test_unwritable_output(capsys, tmp_path):
    target = tmp_path / "missing" / "g.csv"
    code, _, err = run(capsys, "grid", "--set", "square", "--window", "0,1,0,1", "--res", "2",
                       "--out", str(target))
    assert code == 4 and "cannot write" in err


def test_bound(capsys):
    code, out, _ = run(capsys, "bound", "--set", "interval", "--point", "2,0,0,0", "--degrees", "1,2,4,8")
    obj = json.loads(out)
    assert code == 0
    vals = [b["value"] for b in obj["bounds"]]
    assert vals[-1] == pytest.approx(math.log(math.cosh(8 * math.acosh(2))) / 8, abs=1e-8)
    assert obj["reference"] == pytest.approx(math.log(2 + math.sqrt(3)))


def test_bound_lattice_and_errors(capsys):
    code, out, _ = run(capsys, "bound", "--set", "convexk", "--point", "2,0.5", "--degree", "2",
                       "--lattice", "c")
    assert code == 0 and json.loads(out)["reference"] is None
    assert run(capsys, "bound", "--set", "square", "--point", "2,1,0,0")[0] == 3
    assert run(capsys, "bound", "--set", "square", "--point", "2,0", "--lattice", "x")[0] == 2
    assert run(capsys, "bound", "--set", "square", "--point", "2,0", "--degrees", "2,3")[0] == 3


def test_approach(capsys, tmp_path):
    out, js = tmp_path / "p.csv", tmp_path / "p.json"
    code, _, _ = run(capsys, "approach", "--linear-c", "2", "--out", str(out), "--json-out", str(js))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert tuple(rows[0]) == ("k", "delta", "x", "y", "s", "t", "surrogate_value")
    assert len(rows) == 26
    fit = json.loads(js.read_text())["fit"]
    assert fit["kind"] == "FiniteLimit" and fit["value"] == pytest.approx(2 / math.sqrt(3))


def test_approach_variants(capsys):
    code, out, err = run(capsys, "approach", "--linear-c", "-1")
    assert code == 0 and json.loads(err)["fit"]["value"] == 1.0
    code, _, err = run(capsys, "approach", "--tangential", "1,2")
    assert json.loads(err)["fit"]["kind"] == "Divergent"
    code, _, err = run(capsys, "approach", "--target", "scorner", "--m", "0.5")
    assert json.loads(err)["fit"]["value"] == pytest.approx(1.5 / math.sqrt(0.5))
    assert run(capsys, "approach", "--vertical", "--linear-c", "2")[0] == 2
    assert run(capsys, "approach", "--linear-c", "0.5")[0] == 2


def test_verify_subset(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, err = run(capsys, "verify", "--criteria", "1,4,10", "--out", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert [c["id"] for c in report["criteria"]] == [1, 4, 10]
    assert "criterion  1: pass" in err


def test_verify_failure_exit_code(capsys):
    code, out, err = run(capsys, "verify", "--criteria", "3", "--fd-step", "0.1")
    assert code == 1
    assert json.loads(out)["failed"] == [3]
    assert "failed criteria: 3" in err


def test_verify_usage(capsys):
    assert run(capsys, "verify", "--criteria", "13")[0] == 2
    assert run(capsys, "verify", "--fd-step", "-1")[0] == 2
