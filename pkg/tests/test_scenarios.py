import json
import subprocess
import sys

import numpy as np
import pytest

from quatspin.cli import main
from quatspin.scenarios import (
    ConfigError,
    parse_scenario_text,
    run_scenario,
    validate_scenario,
    write_table,
)

RESONANT_PMS = """
kind = pms
xi1 = 0.3
xi2 = 0.01
theta = 0.14959965017094254
n_blocks = 21
"""

RESONANT_CURVE = """
kind = resonance-curve
gamma = 0.04
delta_min = -0.4
delta_max = 0.4
n_points = 161
t_pass = 78.53981633974483
"""


# ---------------------------------------------------------------------------
# parsing and validation


def test_parse_scenario_text():
    raw = parse_scenario_text("kind = pms  # the structure\n\nn_blocks = 21\nxi1 = 0.3\nflag = true\nname = run1\n")
    assert raw == {"kind": "pms", "n_blocks": 21, "xi1": 0.3, "flag": True, "name": "run1"}


def test_parse_scenario_text_rejects_malformed_lines():
    with pytest.raises(ConfigError) as err:
        parse_scenario_text("kind pms\nxi1 = 0.3\nxi1 = 0.4\n")
    messages = "\n".join(err.value.errors)
    assert "line 1" in messages
    assert "duplicate" in messages


def test_validate_minimal_helical():
    scn = validate_scenario(
        {"kind": "helical", "gamma": 0.04, "omega": 0.02, "delta": 0.0, "t_max": 10.0, "dt": 0.1}
    )
    assert scn.kind == "helical"
    assert scn.params["sign"] == 1
    assert scn.output == "helical.csv"
    assert scn.seed == 0


def test_validate_negative_dt_names_field():
    with pytest.raises(ConfigError) as err:
        validate_scenario({"kind": "helical", "gamma": 0.04, "omega": 0.02, "delta": 0.0, "t_max": 10.0, "dt": -0.1})
    assert any("dt" in msg for msg in err.value.errors)


def test_validate_unknown_kind_lists_allowed():
    with pytest.raises(ConfigError) as err:
        validate_scenario({"kind": "foo"})
    joined = " ".join(err.value.errors)
    for kind in ("pms", "helical", "resonance-curve", "em-check", "lorentz-check"):
        assert kind in joined


def test_validate_aggregates_every_violation():
    with pytest.raises(ConfigError) as err:
        validate_scenario({"kind": "pms", "xi1": "wat", "n_blocks": -3, "bogus": 1})
    joined = " ".join(err.value.errors)
    assert "xi1" in joined
    assert "n_blocks" in joined
    assert "bogus" in joined
    assert "xi2" in joined and "theta" in joined  # missing keys reported too
    assert len(err.value.errors) >= 5


# ---------------------------------------------------------------------------
# runners


def test_run_pms_resonant_ring(tmp_path):
    scn = validate_scenario(parse_scenario_text(RESONANT_PMS))
    report = run_scenario(scn, out_dir=str(tmp_path))
    assert report.summary["closure_distance"] == pytest.approx(0.0514861113044685, abs=1e-9)
    assert report.summary["resonant_geometry"] == 1.0
    path = report.outputs[0]
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0] == "step,t,s0,sx,sy,sz,px,py,pz,px_mid,py_mid,pz_mid"
    assert len(lines) - 1 == 2 * 21 + 2


def test_csv_round_trips_at_full_precision(tmp_path):
    scn = validate_scenario(parse_scenario_text(RESONANT_PMS))
    report = run_scenario(scn, out_dir=str(tmp_path))
    with open(report.outputs[0], encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh]
    assert len(header) == 12
    cfgs = validate_scenario(parse_scenario_text(RESONANT_PMS))
    report2 = run_scenario(cfgs, out_dir=str(tmp_path / "again"))
    with open(report2.outputs[0], encoding="utf-8") as fh:
        fh.readline()
        rows2 = [line.strip().split(",") for line in fh]
    for r1, r2 in zip(rows, rows2):
        for a, b in zip(r1, r2):
            assert float(a) == float(b)
            # shortest repr: re-encoding the parsed value reproduces the text
            assert repr(float(a)) == repr(float(b))


def test_run_resonance_curve_peak(tmp_path):
    scn = validate_scenario(parse_scenario_text(RESONANT_CURVE))
    report = run_scenario(scn, out_dir=str(tmp_path))
    assert report.summary["peak_p_down"] == pytest.approx(1.0, abs=1e-12)
    assert abs(report.summary["peak_delta"]) < 1e-12
    data = np.loadtxt(report.outputs[0], delimiter=",", skiprows=1)
    assert data.shape == (161, 3)
    assert np.max(np.abs(data[:, 1] + data[:, 2] - 1.0)) < 1e-12
    # even in the detuning
    assert np.max(np.abs(data[:, 1] - data[::-1, 1])) < 1e-12


def test_run_em_check_convergence(tmp_path):
    scn = validate_scenario({"kind": "em-check", "case": "plane-wave", "h0": 0.02, "n_levels": 3})
    report = run_scenario(scn, out_dir=str(tmp_path))
    assert report.summary["min_order"] > 1.8
    rows = open(report.outputs[0], encoding="utf-8").read().splitlines()[1:]
    by_level = {}
    for row in rows:
        h, name, value = row.split(",")
        by_level.setdefault(name, []).append(float(value))
    for name, values in by_level.items():
        for coarse, fine in zip(values[:-1], values[1:]):
            if coarse > 1e-14:
                assert coarse / fine > 3.5, name


def test_run_em_check_constant_exact(tmp_path):
    scn = validate_scenario({"kind": "em-check", "case": "constant", "n_levels": 2})
    report = run_scenario(scn, out_dir=str(tmp_path))
    assert report.summary["max_residual"] == 0.0


def test_run_lorentz_check(tmp_path):
    scn = validate_scenario({"kind": "lorentz-check", "n_cases": 50, "seed": 7})
    report = run_scenario(scn, out_dir=str(tmp_path))
    assert report.summary["max_i1_rel_err"] < 1e-10
    assert report.summary["max_i2_rel_err"] < 1e-10
    assert report.summary["max_closed_vs_conj"] < 1e-10
    assert report.summary["max_w0_change"] > 1e-3


def test_run_helical(tmp_path):
    scn = validate_scenario(
        {"kind": "helical", "gamma": 0.04, "omega": 0.02, "delta": 0.0, "t_max": 50.0, "dt": 0.05}
    )
    report = run_scenario(scn, out_dir=str(tmp_path))
    assert report.summary["max_norm_drift"] < 1e-12
    data = np.loadtxt(report.outputs[0], delimiter=",", skiprows=1)
    assert data.shape == (1001, 12)
    # polarization stays unit length
    norms = np.linalg.norm(data[:, 6:9], axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-9


def test_deterministic_across_runs_and_threads(tmp_path):
    scn = validate_scenario({"kind": "lorentz-check", "n_cases": 40, "seed": 11})
    blobs = []
    for name, threads in (("a", 1), ("b", 4), ("c", None)):
        report = run_scenario(scn, out_dir=str(tmp_path / name), threads=threads)
        blobs.append(open(report.outputs[0], "rb").read())
    assert blobs[0] == blobs[1] == blobs[2]


def test_json_output(tmp_path):
    scn = validate_scenario(
        {"kind": "resonance-curve", "gamma": 0.04, "delta_min": -0.1, "delta_max": 0.1,
         "n_points": 5, "t_pass": 10.0, "format": "json"}
    )
    report = run_scenario(scn, out_dir=str(tmp_path))
    assert report.outputs[0].endswith("resonance-curve.json")
    doc = json.load(open(report.outputs[0], encoding="utf-8"))
    assert doc["columns"] == ["delta", "p_down", "p_up"]
    assert len(doc["rows"]) == 5
    from quatspin.spin import spin_flip_probability

    mid = doc["rows"][2]
    assert abs(mid[0]) < 1e-15
    assert mid[1] == spin_flip_probability(10.0, 0.04, mid[0])
    assert mid[1] + mid[2] == pytest.approx(1.0, abs=1e-15)
    scn2 = validate_scenario(
        {"kind": "resonance-curve", "gamma": 0.04, "delta_min": -0.1, "delta_max": 0.1,
         "n_points": 5, "t_pass": 10.0, "format": "json"}
    )
    report2 = run_scenario(scn2, out_dir=str(tmp_path / "again"))
    assert open(report.outputs[0], "rb").read() == open(report2.outputs[0], "rb").read()


def test_write_table_csv_lf_endings(tmp_path):
    path = str(tmp_path / "t.csv")
    write_table(path, ("a", "b"), [[1, 0.5], [2, 0.25]], "csv")
    blob = open(path, "rb").read()
    assert b"\r" not in blob
    assert blob.decode("utf-8") == "a,b\n1,0.5\n2,0.25\n"


# ---------------------------------------------------------------------------
# CLI


def write_scenario(tmp_path, text, name="scn.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_cli_list_kinds(capsys):
    assert main(["list-kinds"]) == 0
    out = capsys.readouterr().out
    for kind in ("pms", "helical", "resonance-curve", "em-check", "lorentz-check"):
        assert kind in out


def test_cli_validate_ok(tmp_path, capsys):
    path = write_scenario(tmp_path, RESONANT_PMS)
    assert main(["validate", path]) == 0
    assert "valid" in capsys.readouterr().out


def test_cli_validate_reports_all_errors(tmp_path, capsys):
    path = write_scenario(tmp_path, "kind = pms\nxi1 = oops\nn_blocks = -2\n")
    assert main(["validate", path]) == 2
    err = capsys.readouterr().err
    assert "xi1" in err and "n_blocks" in err and "theta" in err


def test_cli_run(tmp_path, capsys):
    path = write_scenario(tmp_path, RESONANT_PMS)
    assert main(["run", path, "--out", str(tmp_path / "out")]) == 0
    out = capsys.readouterr().out
    assert "closure_distance" in out
    assert (tmp_path / "out" / "pms.csv").exists()


def test_cli_run_missing_file(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.txt")]) == 3
    assert "cannot read" in capsys.readouterr().err


def test_cli_run_format_override(tmp_path):
    path = write_scenario(tmp_path, RESONANT_PMS)
    assert main(["run", path, "--out", str(tmp_path / "out"), "--format", "json"]) == 0
    assert (tmp_path / "out" / "pms.json").exists()


def test_cli_out_dir_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("QUATSPIN_OUT_DIR", str(tmp_path / "envout"))
    path = write_scenario(tmp_path, RESONANT_PMS)
    assert main(["run", path]) == 0
    assert (tmp_path / "envout" / "pms.csv").exists()


def test_cli_byte_identical_reruns(tmp_path):
    path = write_scenario(tmp_path, "kind = lorentz-check\nn_cases = 30\nseed = 3\n")
    assert main(["run", path, "--out", str(tmp_path / "r1")]) == 0
    assert main(["run", path, "--out", str(tmp_path / "r2")]) == 0
    b1 = open(tmp_path / "r1" / "lorentz-check.csv", "rb").read()
    b2 = open(tmp_path / "r2" / "lorentz-check.csv", "rb").read()
    assert b1 == b2


def test_cli_module_entry_point(tmp_path):
    path = write_scenario(tmp_path, RESONANT_CURVE)
    proc = subprocess.run(
        [sys.executable, "-m", "quatspin.cli", "run", path, "--out", str(tmp_path / "out")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "peak_p_down" in proc.stdout
    assert (tmp_path / "out" / "resonance-curve.csv").exists()

    bad = write_scenario(tmp_path, "kind = nope\n", name="bad.txt")
    proc = subprocess.run(
        [sys.executable, "-m", "quatspin.cli", "validate", bad],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "allowed kinds" in proc.stderr
