import io
import json

import pytest

from quadradyn.cli import EXIT_NUMERIC, EXIT_OK, EXIT_SPEC, EXIT_USAGE, dumps, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_classify_family_i_cusp():
    code, out, _ = call("classify", "--family", "I", "--c", "1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["tool"] == "quadradyn" and doc["command"] == "classify"
    assert [p["label"] for p in doc["result"]["finite"]] == ["Cusp"]


def test_invalid_spec_exit_code():
    code, _, err = call("classify", "--family", "V", "--b", "0", "--c", "1", "--s", "0")
    assert code == EXIT_SPEC and "invalid spec" in err
    assert call("classify", "--family", "V", "--b", "1", "--c", "1", "--s", "2.5")[0] == EXIT_SPEC
    assert call("integrals", "--family", "V", "--b", "1", "--c", "1", "--s", "0")[0] == EXIT_SPEC
    assert call("sweep", "--param", "b", "--from", "0", "--to", "1", "--steps", "1")[0] == EXIT_SPEC


def test_usage_errors():
    assert call("classify", "--family", "I", "--bogus")[0] == EXIT_USAGE
    assert call()[0] == EXIT_USAGE
    assert call("sweep", "--param", "b")[0] == EXIT_USAGE


def test_numerical_failure_exit_code(tmp_path):
    # a field whose origin is degenerate beyond the series test
    field = {"p": {"terms": [{"i": 0, "j": 1, "c": 1.0}]}, "q": {"terms": [{"i": 0, "j": 2, "c": 1.0}]}}
    path = tmp_path / "f.json"
    path.write_text(json.dumps(field))
    code, _, err = call("classify", "--field-json", str(path), "--at", "0,0")
    assert code == EXIT_NUMERIC, err


def test_field_json_classification(tmp_path):
    field = {"p": {"terms": [{"i": 0, "j": 1, "c": 1.0}]}, "q": {"terms": [{"i": 1, "j": 0, "c": 1.0}]}}
    path = tmp_path / "f.json"
    path.write_text(json.dumps(field))
    code, out, _ = call("classify", "--field-json", str(path), "--at", "0,0", "--infinity")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["result"]["finite"][0]["label"] == "Saddle"
    assert "infinite_points" in doc["result"]


def test_infinity_key_and_notes():
    code, out, _ = call("classify", "--family", "I", "--c", "1", "--infinity")
    doc = json.loads(out)
    (point,) = doc["result"]["infinite_points"]
    assert point["label"] == "NonHypUnstableNode"
    assert point["series_data"]["m"] == 5
    assert any("CHART-U2-I-SIGN" in n for n in doc["notes"])


def test_spec_json_round_trip(tmp_path):
    _, first, _ = call("classify", "--family", "V", "--b", "1", "--c", "-1", "--s", "2", "--infinity")
    path = tmp_path / "report.json"
    path.write_text(first)
    _, second, _ = call("classify", "--spec-json", str(path), "--infinity")
    assert first == second


def test_sweep_csv_and_events():
    code, out, _ = call("sweep", "--family", "V", "--b", "1", "--d", "2", "--param", "c",
                        "--from", "-1", "--to", "1", "--steps", "41")
    lines = out.splitlines()
    assert code == EXIT_OK and lines[0].startswith("param,b,c,d,region") and len(lines) == 42
    code, out, _ = call("events", "--family", "V", "--b", "1", "--d", "2", "--param", "c",
                        "--from", "-1", "--to", "1", "--steps", "41")
    events = json.loads(out)["result"]["events"]
    assert [e["kind"] for e in events] == ["SaddleFocusSaddle"]


def test_solve_closed_form_columns():
    code, out, _ = call("solve", "--family", "II", "--b", "1", "--start", "0,1", "--t-max", "1",
                        "--step", "0.001", "--closed-form")
    lines = out.splitlines()
    assert lines[0] == "t,x_closed,y_closed,x_rk4,y_rk4,abs_err"
    assert max(float(l.split(",")[-1]) for l in lines[1:]) <= 1e-6


def test_integrals_conservation_report():
    code, out, _ = call("integrals", "--family", "II", "--b", "1", "--start", "0,1", "--t-max", "1")
    doc = json.loads(out)
    assert doc["result"]["conservation"]["max_abs_drift"] <= 1e-8
    assert doc["result"]["integral_curve"]["kind"] == "TanCurve"


def test_portrait_to_file(tmp_path):
    path = tmp_path / "p.svg"
    code, out, _ = call("portrait", "--family", "I", "--c", "1", "--disk", "--seeds", "3", "--out", str(path))
    assert code == EXIT_OK and out == "" and path.read_text().startswith("<?xml")


def test_verify_subset():
    code, out, _ = call("verify", "--only", "8")
    assert code == EXIT_OK and out.startswith("[PASS] criterion  8")


@pytest.mark.parametrize("value, text", [(1.0, "1.0"), (0.1, "0.10000000000000001"), (-0.0, "-0.0"),
                                         (1e300, "1.0000000000000001e+300"), (float("nan"), "null"), (float("inf"), "null")])
def test_float_formatting(value, text):
    assert dumps(value) == text


def test_output_is_deterministic():
    argv = ("classify", "--family", "V", "--b", "1", "--c", "1", "--s", "2", "--infinity")
    assert call(*argv)[1] == call(*argv)[1]
