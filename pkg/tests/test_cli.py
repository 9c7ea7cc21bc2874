from __future__ import annotations

import json
import math

import numpy as np
import pytest

from ncatenoid.cli import run

TET = (np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / math.sqrt(3)).tolist()


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_classify(tmp_path, capsys):
    f = _write(tmp_path, "tet.json", {"vectors": TET, "weights": [1, 1, 1, 1]})
    assert run(["classify", f]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["type"]["kind"] == "TYPE_III"
    assert out["obstructions"]["obstructed"] is False


def test_solve_verify_mesh_round_trip(tmp_path, capsys):
    f = _write(tmp_path, "tet.json", {"vectors": TET, "weights": [1, 1, 1, 1]})
    sol = tmp_path / "sol.json"
    assert run(["solve", f, "-o", str(sol)]) == 0
    data = json.loads(sol.read_text())
    assert 1 <= len(data) <= 4
    assert all(d["verification"]["reduction2_residual"] < 1e-9 for d in data)
    assert run(["verify", str(sol)]) == 0
    reps = json.loads(capsys.readouterr().out)
    assert all(r["passed"] for r in reps)
    obj = tmp_path / "s.obj"
    assert run(["mesh", str(sol), "-o", str(obj)]) == 0
    assert obj.read_bytes().startswith(b"v ")


def test_solve_is_deterministic(tmp_path, capsys):
    f = _write(tmp_path, "tet.json", {"vectors": TET, "weights": [1, 1, 1, 1]})
    run(["solve", f])
    first = capsys.readouterr().out
    run(["solve", f])
    assert capsys.readouterr().out == first


def test_solve_obstructed_exit_1(tmp_path, capsys):
    e3, m3 = [0, 0, 1], [0, 0, -1]
    f = _write(tmp_path, "obs.json", {"vectors": [m3, e3, e3, e3], "weights": [3, 1, 1, 1]})
    assert run(["solve", f]) == 1
    cap = capsys.readouterr()
    assert json.loads(cap.out) == []
    diag = json.loads(cap.err.strip().splitlines()[-1])
    assert any(h["condition"] == 3 for h in diag["obstructions"])


def test_type1_family_solve(tmp_path, capsys):
    e3, m3 = [0, 0, 1], [0, 0, -1]
    f = _write(tmp_path, "par.json", {"vectors": [m3, e3, e3, e3], "weights": [3, -1, 2, 2]})
    assert run(["solve", f, "--param", "t=2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out[0]["family"]["eqf_residual"] == 0.0


@pytest.mark.parametrize("obj", [{"vectors": TET, "weights": [1, 1, 1, 2]}, {"vectors": [[1, 0, 0]]}])
def test_invalid_input_exit_2(tmp_path, obj):
    assert run(["solve", _write(tmp_path, "bad.json", obj)]) == 2


def test_bad_json_and_flags(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{nope")
    assert run(["classify", str(p)]) == 2
    assert run(["bogus"]) == 2
    assert run(["example", "no-such-surface"]) == 2


def test_verify_rejects_tampered(tmp_path, capsys):
    assert run(["example", "tetrahedral"]) == 0
    data = json.loads(capsys.readouterr().out)
    data[0]["candidate"]["b"][0] = [1.0, 0.0]
    f = _write(tmp_path, "t.json", data)
    assert run(["verify", f]) == 1


def test_example_params(capsys):
    assert run(["example", "zm", "--param", "m=4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out[0]["candidate"]["q"]) == 6
    assert out[0]["candidate"]["q"][0] == "inf"
