from __future__ import annotations

import json
import shutil
import subprocess
import sys

import jsonschema
import pytest

from vqcverify.cli import main
from vqcverify.datasets import data_path
from vqcverify.report import REPORT_SCHEMA

TWO_QUBIT = ["-c", "builtin:two_qubit"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_prints_distribution(capsys):
    code, out, _ = run(capsys, "run", *TWO_QUBIT, "-i", "6.0,2.7")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("00: 0.25") and lines[-1].startswith("class 1 (p=0.73")


def test_run_named_inputs(capsys):
    code, out, _ = run(capsys, "run", *TWO_QUBIT, "-i", "x1=2.7,x0=6.0")
    assert code == 0 and "class 1" in out


def test_verify_two_qubit_robust(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", *TWO_QUBIT, "-i", "6.0,2.7", "-e", "0.5", "--out", str(out_path))
    assert code == 0 and out.startswith("ROBUST")
    doc = json.loads(out_path.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["status"] == "robust" and doc["class"] == "1"


def test_verify_with_weights_file(capsys):
    code, out, _ = run(capsys, "verify", "-w", str(data_path("two_qubit_weights.json")), "-i", "6.0,2.7", "-e", "0.5")
    assert code == 0 and "ROBUST" in out


def test_verify_falsified_exit_1(capsys, tmp_path):
    c = tmp_path / "rx.vqc"
    c.write_text("qubits 1\ninputs x\nrx q0 $x\nmeasure q0\n")
    code, out, _ = run(capsys, "verify", "-c", str(c), "-i", "1.4707963", "-e", "0.2")
    assert code == 1 and out.startswith("FALSIFIED") and "witness" in out


def test_verify_unknown_exit_2(capsys):
    code, out, _ = run(capsys, "verify", *TWO_QUBIT, "-i", "6.0,2.7", "-e", "0.5", "--max-depth", "0", "--mode", "stepwise", "--clip", "off")
    assert code == 2 and out.startswith("UNKNOWN")


def test_max_eps(capsys, tmp_path):
    out_path = tmp_path / "m.json"
    code, out, _ = run(capsys, "max-eps", *TWO_QUBIT, "-i", "6.0,2.7", "--tau", "0.01", "--out", str(out_path))
    assert code == 0 and out.startswith("max eps")
    doc = json.loads(out_path.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["max_epsilon"] >= 0.5 and len(doc["bracket"]) == 2


def test_model_emit(capsys, tmp_path):
    target = tmp_path / "qcl.vqc"
    code, out, _ = run(capsys, "model", "-k", "qcl", "-w", str(data_path("qcl_demo_weights.json")), "--emit", str(target))
    assert code == 0 and target.read_text().startswith("qubits 4")
    code, out, _ = run(capsys, "run", "-c", str(target), "-i", "0.1,0.2,0.3,0.4")
    assert code == 0
    code, _, err = run(capsys, "model", "-k", "pv", "-w", str(data_path("qcl_demo_weights.json")))
    assert code == 64 and "qcl" in err


def test_dataset_then_batch_verify(capsys, tmp_path):
    samples = tmp_path / "iris.json"
    code, out, _ = run(capsys, "dataset", "iris", "--out", str(samples))
    assert code == 0 and "100 samples" in out
    doc = json.loads(samples.read_text())
    assert len(doc["samples"]) == 100
    report = tmp_path / "batch.json"
    w = str(data_path("qcl_demo_weights.json"))
    code, out, _ = run(capsys, "verify", "-w", w, "--samples", str(samples), "--limit", "3", "-e", "0.01", "--out", str(report))
    assert code in (0, 1, 2)
    reports = json.loads(report.read_text())["reports"]
    assert len(reports) == 3 and out.count("[sample") == 3
    for r in reports:
        jsonschema.validate(r, REPORT_SCHEMA)


def test_dataset_digits_amplitude(capsys, tmp_path):
    out = tmp_path / "d.json"
    code, _, _ = run(capsys, "dataset", "digits", "--classes", "0,1", "--out", str(out))
    assert code == 0 and len(json.loads(out.read_text())["samples"]) == 360
    code, _, _ = run(capsys, "dataset", "iris", "--encode", "amplitude", "--out", str(out))
    assert code == 0 and len(json.loads(out.read_text())["samples"][0]["features"]) == 5


@pytest.mark.parametrize(
    "argv,code",
    [
        (["run", *TWO_QUBIT, "-i", "1.0"], 64),
        (["run", *TWO_QUBIT, "-i", "a,b"], 64),
        (["run", *TWO_QUBIT, "-i", "x0=1,y=2"], 64),
        (["run", "-c", "builtin:nope", "-i", "1"], 64),
        (["verify", *TWO_QUBIT, "-e", "0.1"], 64),
        (["max-eps", *TWO_QUBIT, "-i", "6,2.7", "--eps-min", "1", "--eps-max", "0.5"], 64),
        (["run", "-c", "/no/such/file.vqc", "-i", "1"], 66),
        (["run", "-w", "/no/such/weights.json", "-i", "1"], 66),
        (["dataset", "mnist", "only-one-path"], 64),
        (["dataset", "digits", "--classes", "a,b"], 64),
    ],
)
def test_error_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code and err.startswith("vqcverify: error")


def test_bad_circuit_is_data_error(capsys, tmp_path):
    c = tmp_path / "bad.vqc"
    c.write_text("qubits 1\nfoo q0\nmeasure q0\n")
    code, _, err = run(capsys, "run", "-c", str(c), "-i", "")
    assert code == 65 and "unknown gate" in err


def test_unwritable_output(capsys, tmp_path):
    code, _, err = run(capsys, "verify", *TWO_QUBIT, "-i", "6,2.7", "-e", "0.1", "--out", str(tmp_path / "x" / "y.json"))
    assert code == 73


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["verify", *TWO_QUBIT, "-i", "6,2.7"],
        ["verify", *TWO_QUBIT, "-i", "6,2.7", "-e", "-1"],
        ["verify", *TWO_QUBIT, "-i", "6,2.7", "-e", "0.1", "--clip", "maybe"],
        ["frobnicate"],
    ],
)
def test_argparse_errors_exit_64(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 64


def test_console_script_smoke():
    exe = shutil.which("vqcverify")
    cmd = [exe] if exe else [sys.executable, "-m", "vqcverify.cli"]
    p = subprocess.run(cmd + ["verify", *TWO_QUBIT, "-i", "6.0,2.7", "-e", "0.5"], capture_output=True, text=True)
    assert p.returncode == 0 and "ROBUST" in p.stdout
