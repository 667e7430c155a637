import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from gpefactor.cli import main
from gpefactor.io import dump_realization, load_realization, realization_from_dict
from gpefactor.quat import Quaternion
from gpefactor.realization import evaluate, evaluate_slice, quaternion_sample_points, sample_points

from conftest import random_factor, random_quat_factor

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_neg_inv_z2(capsys):
    code, out, _ = run(capsys, "eval", "--realization", DATA / "neg_inv_z2.json", "--point", "1")
    assert code == 0 and out.strip() == "[[-1]]"


def test_eval_quat_jpoly_at_k(capsys):
    code, out, _ = run(capsys, "eval", "--realization", DATA / "quat_jpoly.json", "--point", "k")
    assert code == 0 and out.strip() == "[[1+k, i+j], [-i-j, 1+k]]"


def test_eval_point_with_spaces(capsys):
    code, out, _ = run(capsys, "eval", "--realization", DATA / "inv_z.json", "--point", "0 + 2 i")
    assert code == 0 and out.strip() == "[[-0.5i]]"


def test_eval_on_pole(capsys):
    code, _, err = run(capsys, "eval", "--realization", DATA / "ratio.json", "--point", "2")
    assert code == 3 and "pole" in err


def test_eval_parse_errors(capsys):
    assert run(capsys, "eval", "--realization", DATA / "ratio.json", "--point", "1+")[0] == 2
    assert run(capsys, "eval", "--realization", DATA / "ratio.json", "--point", "1+j")[0] == 2
    assert run(capsys, "eval", "--realization", DATA / "missing.json", "--point", "1")[0] == 2


def test_eval_bad_shape(capsys, tmp_path):
    d = json.loads((DATA / "ratio.json").read_text())
    d["B"] = d["B"][:1]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    assert run(capsys, "eval", "--realization", bad, "--point", "1")[0] == 2


def test_factor_ratio(capsys, tmp_path):
    out_file = tmp_path / "L.json"
    code, out, _ = run(capsys, "factor", "--realization", DATA / "ratio.json", "--side", "right", "--out", out_file)
    assert code == 0
    report = json.loads(out)
    assert report["residual"] <= 1e-9
    L = load_realization(out_file)
    for z in sample_points(L, 10):
        assert abs(evaluate(L, z)[0, 0] - (z + 1) / (z + 2)) < 1e-9


def test_factor_singular_D(capsys):
    code, _, err = run(capsys, "factor", "--realization", DATA / "neg_inv_z2.json")
    assert code == 1 and "D singular, use --regularize" in err


def test_factor_regularize(capsys):
    code, out, _ = run(capsys, "factor", "--realization", DATA / "neg_inv_z2.json", "--regularize")
    assert code == 0
    docs = _split_json(out)
    L = realization_from_dict(docs[0]["factor"])
    for z in (0.7 + 0.4j, -1.2 + 1j, 1.5 - 0.3j):
        assert abs(evaluate(L, z)[0, 0] - 1 / z) <= 1e-6
    assert len(docs[1]["epsilon_path"]) >= 3


def test_factor_quaternion_round_trip(capsys, tmp_path):
    out_file = tmp_path / "L.json"
    code, _, _ = run(capsys, "factor", "--realization", DATA / "quat_round_trip.json", "--out", out_file)
    assert code == 0
    L, L0 = load_realization(out_file), load_realization(DATA / "quat_L0.json")
    for p in quaternion_sample_points():
        assert evaluate_slice(L, p).allclose(evaluate_slice(L0, p), atol=1e-7)


def test_factor_scalar_polynomial(capsys):
    code, out, _ = run(capsys, "factor", "--realization", DATA / "poly_2_minus_z6.json", "--side", "left")
    assert code == 0
    coeffs = _split_json(out)[1]["factor_coefficients"]
    roots = np.roots([complex(*c) for c in coeffs][::-1])
    expected = 2 ** (1 / 6) * np.exp(1j * np.pi * np.array([0, 1, 5]) / 3)
    assert all(np.min(np.abs(roots - e)) < 1e-9 for e in expected)


def test_factor_not_even(capsys):
    assert run(capsys, "factor", "--realization", DATA / "inv_z.json")[0] == 1


@pytest.mark.parametrize("name, kappa", [("quadratic_one_square.json", 1), ("cubic_one_square.json", 1), ("identity.json", 0)])
def test_negsq(capsys, name, kappa):
    code, out, _ = run(capsys, "negsq", "--realization", DATA / name, "--grid", 30)
    rep = json.loads(out)
    assert code == 0 and rep["kappa_estimate"] == kappa and rep["stabilized"]


def test_negsq_bad_grid(capsys):
    assert run(capsys, "negsq", "--realization", DATA / "identity.json", "--grid", 0)[0] == 2


def test_interp_even_interp(capsys, tmp_path):
    out_file = tmp_path / "out.json"
    code, out, _ = run(capsys, "interp", "--spec", DATA / "even_interp_spec.json", "--out", out_file)
    assert code == 0
    res = json.loads(out)
    assert json.loads(out_file.read_text()) == res
    np.testing.assert_allclose([complex(*c) for c in res["coefficients"]], [-2, 0, 4, 0, -1, 0], atol=1e-10)
    assert res["beta"] == 1.0
    np.testing.assert_allclose([complex(*c) for c in res["phi"]], [2, 0, 0, 0, 0, 0, -1], atol=1e-10)


def test_interp_directional(capsys):
    code, out, _ = run(capsys, "interp", "--spec", DATA / "directional_spec.json")
    assert code == 0
    res = json.loads(out)
    assert max(res["residuals"]) <= 1e-8
    Phi = realization_from_dict(res["phi"])
    assert abs(evaluate(Phi, 1.0)[0, 0] - 2) < 1e-9


def test_interp_quaternion(capsys):
    code, out, _ = run(capsys, "interp", "--spec", DATA / "quaternion_spec.json")
    assert code == 0
    Phi = realization_from_dict(json.loads(out)["phi"])
    assert evaluate_slice(Phi, Quaternion(1, 1, 0, 0))[0, 0].isclose(Quaternion(2, 0, 1, 0), 1e-9)


def test_interp_infeasible(capsys):
    assert run(capsys, "interp", "--spec", DATA / "axis_infeasible_spec.json")[0] == 1


@pytest.mark.parametrize("spec", ["{", "[]", '{"type": "even_polynomial"}', '{"type": "nope"}', '{"type": "directional", "nodes": [1], "xi": [], "eta": []}'])
def test_interp_malformed(capsys, tmp_path, spec):
    f = tmp_path / "spec.json"
    f.write_text(spec)
    assert run(capsys, "interp", "--spec", f)[0] == 2


def test_check(capsys):
    code, out, _ = run(capsys, "check", "--realization", DATA / "inv_z.json", "--property", "even")
    assert code == 1 and json.loads(out)["holds"] is False
    assert run(capsys, "check", "--realization", DATA / "gpe_of_minimal.json", "--property", "minimal")[0] == 0
    assert run(capsys, "check", "--realization", DATA / "neg_inv_z2.json", "--property", "even")[0] == 0
    assert run(capsys, "check", "--realization", DATA / "quat_jpoly.json", "--property", "gpe")[0] == 1
    assert run(capsys, "check", "--realization", DATA / "ratio.json", "--property", "gpe")[0] == 0


def test_round_trip_random(rng, tmp_path):
    for R in [random_factor(rng) for _ in range(5)] + [random_quat_factor(rng) for _ in range(5)]:
        f = tmp_path / "R.json"
        dump_realization(R, f)
        S = load_realization(f)
        assert S.field == R.field
        assert dump_realization(S) == dump_realization(R)


def test_round_trip_golden_files():
    for f in sorted(DATA.glob("*.json")):
        if "spec" not in f.name:
            assert dump_realization(load_realization(f)) + "\n" == f.read_text()


def test_deterministic_output(capsys):
    argv = ("factor", "--realization", DATA / "ratio.json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
    argv = ("negsq", "--realization", DATA / "cubic_one_square.json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_installed_script():
    exe = shutil.which("gpefactor")
    cmd = [exe] if exe else [sys.executable, "-m", "gpefactor.cli"]
    proc = subprocess.run(cmd + ["eval", "--realization", str(DATA / "neg_inv_z2.json"), "--point", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "[[-0.25]]"


def _split_json(text):
    dec, docs, i = json.JSONDecoder(), [], 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        obj, i = dec.raw_decode(text, i)
        docs.append(obj)
    return docs


def test_bad_matrix_entry(capsys, tmp_path):
    d = json.loads((DATA / "inv_z.json").read_text())
    d["A"] = [["x"]]
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(d))
    assert run(capsys, "eval", "--realization", f, "--point", "1")[0] == 2
