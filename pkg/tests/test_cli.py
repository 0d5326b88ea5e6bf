import json
import subprocess
import sys

import numpy as np
import pytest

from hgkit.cli import main
from hgkit.model import random_model
from hgkit.modelfile import load_model, save_model
from hgkit.tensor_core import Dim


@pytest.fixture
def flat_file(tmp_path):
    path = tmp_path / "flat.json"
    doc = {"dimension": 8, "metric": "standard", "hypercomplex": "standard",
           "structure_constants": []}
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def random_file(tmp_path):
    path = tmp_path / "random.json"
    save_model(str(path), random_model(Dim(2), seed=7))
    return str(path)


def test_classify_flat(flat_file, capsys):
    rc = main(["classify", flat_file])
    out = capsys.readouterr().out
    assert rc == 0
    assert "class K" in out
    assert "FAIL" not in out
    for line in out.splitlines():
        if line.startswith("class "):
            assert "0.0000000000000000e+00 PASS" in line


def test_classify_nonskew_exits_3(tmp_path, capsys):
    path = tmp_path / "bad.json"
    doc = {"dimension": 4, "structure_constants":
           [{"i": 2, "j": 2, "k": 1, "value": 0.5}]}
    path.write_text(json.dumps(doc))
    rc = main(["classify", str(path)])
    err = capsys.readouterr().err
    assert rc == 3
    assert "(2,2,1)" in err


def test_classify_parse_error_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    rc = main(["classify", str(path)])
    err = capsys.readouterr().err
    assert rc == 2
    assert "line 1" in err


def test_classify_bad_dimension_exits_2(tmp_path, capsys):
    path = tmp_path / "dim.json"
    path.write_text(json.dumps({"dimension": 6, "structure_constants": []}))
    rc = main(["classify", str(path)])
    assert rc == 2


def test_verify_flat_all_passes(flat_file, capsys):
    rc = main(["verify", flat_file, "--suite", "all"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "0 failed" in out
    assert "strong/flat" in out


def test_verify_identities_random_model(random_file, capsys):
    rc = main(["verify", random_file, "--suite", "identities"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "ricci_identity_J1" in out
    assert "SKIP" in out  # class-gated lines skipped
    assert "class precondition" in out


def test_verify_failure_exits_1(tmp_path, capsys):
    # inadmissible point-model data fails the fundamental identities
    path = tmp_path / "pm.json"
    rng = np.random.default_rng(0)
    doc = {"dimension": 4, "metric": "standard", "hypercomplex": "standard",
           "F1": rng.standard_normal((4, 4, 4)).tolist(),
           "F2": rng.standard_normal((4, 4, 4)).tolist()}
    path.write_text(json.dumps(doc))
    rc = main(["verify", str(path), "--suite", "identities"])
    out = capsys.readouterr().out
    assert rc == 1
    assert "FAIL" in out


def test_verify_tol_flag_loosens(tmp_path, capsys):
    path = tmp_path / "pm.json"
    rng = np.random.default_rng(0)
    doc = {"dimension": 4, "metric": "standard", "hypercomplex": "standard",
           "F1": rng.standard_normal((4, 4, 4)).tolist(),
           "F2": rng.standard_normal((4, 4, 4)).tolist()}
    path.write_text(json.dumps(doc))
    rc = main(["verify", str(path), "--suite", "identities", "--tol", "1e9"])
    assert rc == 0


def test_connection_and_curvature_subcommands(flat_file, capsys):
    assert main(["connection", flat_file]) == 0
    assert main(["curvature", flat_file]) == 0
    out = capsys.readouterr().out
    assert "torsion" in out
    assert "trichotomy verdict" in out


def test_report_files_match_stdout(flat_file, tmp_path, capsys):
    base = str(tmp_path / "report")
    main(["classify", flat_file, "--output", base])
    out = capsys.readouterr().out
    text = open(base + ".txt").read()
    assert text.strip() == out.strip()
    doc = json.load(open(base + ".json"))
    # identical numeric content between the two emissions
    values = {ln["label"]: ln["value"] for ln in doc["lines"]}
    for line in text.splitlines():
        if line.startswith("class "):
            label = line[:60].strip()
            assert float(line.split()[-2]) == values[label]


def test_search_emits_roundtrippable_models(tmp_path, capsys):
    outdir = str(tmp_path / "out")
    rc = main(["search", "--target", "W3(J2),W3(J3)", "-n", "1", "--seed", "0",
               "--budget", "25", "--restarts", "3", "--output", outdir])
    assert rc == 0
    log = json.load(open(outdir + "/penalty_log.json"))
    assert log["models"]
    for path in log["models"]:
        m = load_model(path)
        m2 = load_model(path)
        assert np.array_equal(m.C, m2.C)
        # bit-exact round trip through a second save
        save_model(str(tmp_path / "resave.json"), m)
        m3 = load_model(str(tmp_path / "resave.json"))
        assert np.array_equal(m.C, m3.C)


def test_verify_searched_model_all_suites(tmp_path, capsys):
    # a curved class-certified model must verify cleanly: unconditional
    # lines pass, class-gated lines outside its class skip
    outdir = str(tmp_path / "w33")
    main(["search", "--target", "W3(J2),W3(J3)", "-n", "1", "--seed", "0",
          "--budget", "25", "--restarts", "3", "--strict", "--output", outdir])
    capsys.readouterr()
    rc = main(["verify", outdir + "/model_000.json", "--suite", "all"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "0 failed" in out
    assert "nijenhuis(J1) is a 3-form" in out
    assert "dT on alt(T)" in out


def test_search_invalid_dimension_usage_error(capsys):
    rc = main(["search", "--target", "W133", "-n", "1"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "usage error" in err


def test_nullspace_command(capsys):
    rc = main(["nullspace", "-n", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "Kahler-like nullspace dimension" in out
    lines = {l.split("  ")[0].strip(): l for l in out.splitlines()}
    kah = [l for l in out.splitlines() if l.startswith("Kahler-like")][0]
    assert kah.split()[-2] == "0"
    w133 = [l for l in out.splitlines() if l.startswith("W133 nullspace")][0]
    assert w133.split()[-2] == "0"


def test_search_no_certified_strict_is_not_an_error(tmp_path, capsys):
    outdir = str(tmp_path / "none")
    rc = main(["search", "--target", "W133", "-n", "2", "--seed", "0",
               "--budget", "2", "--restarts", "2", "--strict",
               "--output", outdir])
    out = capsys.readouterr().out
    assert rc == 0
    assert "certified models" in out
    log = json.load(open(outdir + "/penalty_log.json"))
    assert log["models"] == []
    assert log["diagnostics"]["best_strict_penalty"] is not None


def test_nullspace_command_n2(capsys):
    # rank facts at d=8 (the bases are cached per process by earlier tests)
    rc = main(["nullspace", "-n", "2"])
    out = capsys.readouterr().out
    assert rc == 0
    kah = [l for l in out.splitlines() if l.startswith("Kahler-like")][0]
    assert kah.split()[-2] == "0"
    w33 = [l for l in out.splitlines() if l.startswith("W3(J2) & W3(J3) nullspace")][0]
    assert int(w33.split()[-2]) > 0


def test_generate_point_model(tmp_path, capsys):
    out_path = str(tmp_path / "pm.json")
    rc = main(["generate-point-model", "-n", "2", "--seed", "0",
               "--classes", "W133", "--output", out_path])
    assert rc == 0
    p = load_model(out_path)
    from hgkit.classify import classify_point_model, W133
    rep = classify_point_model(p)
    assert rep.passes(*W133)
    # classify accepts point-model files too
    assert main(["classify", out_path]) == 0


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "hgkit.cli", "nullspace", "-n", "1"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "Kahler-like" in out.stdout


from hypothesis import given, settings
from hypothesis import strategies as st


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6,
                          allow_nan=False, allow_infinity=False),
                min_size=3, max_size=3))
@settings(max_examples=25, deadline=None)
def test_model_file_floats_roundtrip_bit_exact(values):
    import tempfile

    import numpy as np
    from hgkit.model import LieAlgebraModel
    C = np.zeros((4, 4, 4))
    C[0, 1, 2], C[0, 2, 3], C[1, 2, 0] = values
    C = C - np.einsum('jik->ijk', C)
    m = LieAlgebraModel.create(C, jacobi="skip")
    with tempfile.TemporaryDirectory() as tmp:
        path = tmp + "/m.json"
        save_model(path, m)
        m2 = load_model(path)
    assert np.array_equal(m.C, m2.C)
