from __future__ import annotations

import io
import json

import jsonschema
import pytest

from vqcverify.datasets import data_path
from vqcverify.models import two_qubit_example
from vqcverify.report import (
    REPORT_SCHEMA,
    ReportError,
    emit_report,
    load_report,
    max_eps_report,
    verdict_from_report,
    verdict_report,
)
from vqcverify.verifier import RefinementConfig, Status, VerificationProblem, max_epsilon, verify_robust
from vqcverify.weights import (
    WeightsArityError,
    WeightsError,
    WeightsFileMissing,
    WeightsSchemaError,
    load_weights,
    parse_weights,
)

from .conftest import CENTER
from .test_verifier import RX

CFG = RefinementConfig()


# weights


def test_weights_examples(tmp_path):
    wf = parse_weights({"model": "qcl", "weights": [0.99, -0.50, 3.27, -0.69]})
    assert wf.model == "qcl" and len(wf.weights) == 4
    assert len(wf.circuit().ops) == 12
    with pytest.raises(WeightsArityError):
        parse_weights({"model": "qcl", "weights": [1, 2, 3]})
    wf = parse_weights({"model": "custom", "circuit_path": "m.vqc", "weights": []}, tmp_path)
    assert wf.model == "custom" and wf.circuit_path == tmp_path / "m.vqc"


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"model": 3, "weights": []},
        {"model": "qcl", "weights": "1,2,3,4"},
        {"model": "qcl", "weights": [1, 2, True, 4]},
        {"model": "qcl", "weights": [1, 2, 3, 4], "bias": 1},
        {"model": "nope", "weights": []},
        {"model": "custom", "weights": []},
        {"model": "custom", "weights": [], "circuit_path": 7},
    ],
)
def test_weights_schema_errors(doc):
    with pytest.raises(WeightsSchemaError):
        parse_weights(doc)


def test_weights_errors_are_distinct(tmp_path):
    with pytest.raises(WeightsFileMissing):
        load_weights(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(WeightsSchemaError, match="invalid JSON"):
        load_weights(bad)
    assert not issubclass(WeightsArityError, WeightsSchemaError)
    assert all(issubclass(e, WeightsError) for e in (WeightsFileMissing, WeightsSchemaError, WeightsArityError))


@pytest.mark.parametrize("name", ["qcl", "ccqc", "pv"])
def test_bundled_demo_weights(name):
    wf = load_weights(data_path(f"{name}_demo_weights.json"))
    assert wf.model == name
    assert parse_weights(wf.to_json()) == wf


def test_bundled_two_qubit_weights():
    wf = load_weights(data_path("two_qubit_weights.json"))
    assert wf.model == "custom"
    assert wf.circuit() == two_qubit_example()


# reports


def _robust():
    return verify_robust(VerificationProblem(two_qubit_example(), CENTER, 0.5, config=CFG))


def _falsified():
    return verify_robust(VerificationProblem(RX, {"x": 1.4707963267948966}, 0.2, config=CFG))


def test_report_examples():
    d = verdict_report(_robust(), 0.5, CFG)
    jsonschema.validate(d, REPORT_SCHEMA)
    assert d["status"] == "robust" and d["class"] == "1" and d["epsilon"] == 0.5
    assert "witness" not in d
    f = verdict_report(_falsified(), 0.2, CFG)
    jsonschema.validate(f, REPORT_SCHEMA)
    assert f["status"] == "falsified" and set(f["witness"]) == {"x"}


def test_max_eps_report():
    r = max_epsilon(RX, {"x": 0.0}, cfg=CFG)
    d = max_eps_report(r, CFG)
    jsonschema.validate(d, REPORT_SCHEMA)
    assert d["max_epsilon"] == r.epsilon
    lo, hi = d["bracket"]
    assert lo == r.epsilon and hi > lo


def test_max_eps_zero_report_has_diagnostic():
    r = max_epsilon(RX, {"x": 1.5707963267948966}, cfg=CFG)
    d = max_eps_report(r, CFG)
    jsonschema.validate(d, REPORT_SCHEMA)
    assert d["max_epsilon"] == 0 and "not robust" in d["diagnostic"]


@pytest.mark.parametrize("make", [_robust, _falsified])
def test_report_round_trip(tmp_path, make):
    v = make()
    out = tmp_path / "r.json"
    buf = io.StringIO()
    emit_report(v, out, stream=buf, eps=0.5, cfg=CFG)
    assert buf.getvalue().count("\n") == 1
    assert buf.getvalue().startswith(v.status.value.upper())
    back = verdict_from_report(load_report(out))
    assert back == v


def test_emit_report_unwritable(tmp_path):
    with pytest.raises(ReportError):
        emit_report(_robust(), tmp_path / "no" / "such" / "dir.json", stream=None, eps=0.5)


def test_schema_rejects_bad_reports():
    d = verdict_report(_robust(), 0.5, CFG)
    for bad in ({**d, "status": "maybe"}, {**d, "class": "2"}, {k: v for k, v in d.items() if k != "mode"}):
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(bad, REPORT_SCHEMA)
    assert json.loads(json.dumps(d)) == d
    assert {s.value for s in Status} == set(REPORT_SCHEMA["properties"]["status"]["enum"])
