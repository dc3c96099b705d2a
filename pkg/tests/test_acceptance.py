"""Acceptance criteria 1 to 11.

Each test records one PASS/FAIL line, printed in the "acceptance criteria"
section at the end of the run. Criteria 1 and 3 contain reference
numbers that the computation does not reproduce; those tests are marked as
strict expected failures so the line stays FAIL and the suite notices if
they ever start passing.

    pytest tests/test_acceptance.py
"""

from __future__ import annotations

import time

import jsonschema
import numpy as np
import pytest

from vqcverify.abstract import (
    REFERENCE_SETTINGS,
    AbstractDistribution,
    AbstractState,
    ball_env,
    classify_abstract,
    run_abstract,
    run_abstract_batch,
    run_abstract_state,
)
from vqcverify.circuit import GateOp, parse_circuit
from vqcverify.concrete import class_probabilities, run_batch, run_concrete, simulate, simulate_gates
from vqcverify.datasets import amplitude_samples, data_path, load_digits_4x4, load_iris
from vqcverify.models import two_qubit_example
from vqcverify.oracles import grid_points, half_angle_critical_points, hull_of_states
from vqcverify.report import REPORT_SCHEMA, max_eps_report, verdict_report
from vqcverify.verifier import RefinementConfig, VerificationProblem, max_epsilon, split_union, verify_robust
from vqcverify.weights import load_weights

from . import conftest
from .conftest import CENTER
from .corpus import random_boxes, random_circuit
from .test_completeness import TOL, _dense_angle, family, hull_gap, permutation_gates

BOX = ball_env(CENTER, 0.5)
COMBOS = [(m, c) for m in ("stepwise", "symbolic") for c in (False, True)]
SYMBOLIC = RefinementConfig(mode="symbolic", clipped=False, strict=False)


def record(n: int, checks: dict[str, bool], detail: str = ""):
    """Store the criterion line and fail on any unmet check."""
    bad = [k for k, ok in checks.items() if not ok]
    line = f"criterion {n:2d}: {'FAIL' if bad else 'PASS'}"
    if bad:
        line += "  unmet: " + ", ".join(bad)
    if detail:
        line += f"  [{detail}]"
    conftest.ACCEPTANCE[n] = line
    assert not bad, line


def close(got, want, tol=0.01) -> bool:
    return bool(np.all(np.abs(np.asarray(got, complex) - np.asarray(want, complex)) <= tol))


def amp(s: AbstractState, e: int):
    a = s[e]
    return (a.re.lo, a.re.hi, a.im.lo, a.im.hi)


def dist(d: AbstractDistribution, e: int):
    return (d[e].lo, d[e].hi)


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="the reference 01 probability 0.21 is 0.2229 when computed")
def test_criterion_1_concrete_pipeline():
    t0 = time.perf_counter()
    c = two_qubit_example((0.99, -0.50, 3.27, -0.69))
    states = simulate_gates(c, CENTER)
    p, cls = run_concrete(c, CENTER)
    agg = class_probabilities(p, c.observed)
    dt = time.perf_counter() - t0
    record(1, {
        "psi1": close(states[2], [-0.22, -0.03j, 0.97j, -0.14]),
        "psi4": close(states[-1], [0.14 - 0.49j, -0.11 + 0.46j, 0.08 + 0.03j, 0.17 + 0.70j]),
        "distribution": close(p, [0.26, 0.21, 0.01, 0.52]),
        "class 1": cls == (1,),
        "P=0.73": close(agg[1], 0.73),
        "<1s": dt < 1,
    }, f"p={np.round(p, 4).tolist()} {dt * 1000:.1f} ms")


def test_criterion_2_abstract_pipeline(two_qubit):
    t0 = time.perf_counter()
    trace = []
    v4 = run_abstract_state(two_qubit, BOX, trace=trace, **REFERENCE_SETTINGS)
    v1 = trace[1]
    rho = run_abstract(two_qubit, BOX, **REFERENCE_SETTINGS)
    agg = rho.class_intervals((0,))
    dt = time.perf_counter() - t0
    want_v1 = {0: (-0.454, 0.029, 0, 0), 1: (0, 0, -0.173, 0.049), 2: (0, 0, 0.824, 1.0), 3: (-0.382, 0.108, 0, 0)}
    want_v4 = {
        0: (-0.159, 0.433, -0.559, -0.355),
        1: (-0.404, 0.184, 0.341, 0.544),
        2: (-0.171, 0.328, -0.074, 0.181),
        3: (-0.086, 0.413, 0.54, 0.768),
    }
    want_rho = {0: (0.126, 0.50), 1: (0.116, 0.460), 2: (0, 0.140), 3: (0.291, 0.761)}
    record(2, {
        "V1": all(close(amp(v1, e), w) for e, w in want_v1.items()),
        "V4": all(close(amp(v4, e), w) for e, w in want_v4.items()),
        "rho#": all(close(dist(rho, e), w) for e, w in want_rho.items()),
        "q0=0 aggregate": close((agg["0"].lo, agg["0"].hi), (0.126, 0.640)),
        "q0=1 aggregate": close((agg["1"].lo, agg["1"].hi), (0.407, 1.221)),
        "<1s": dt < 1,
    }, f"{dt * 1000:.1f} ms")


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="the reference intervals belong to x in [pi/2-0.5, pi/2+0.5], not +-0.2")
def test_criterion_3_incompleteness():
    t0 = time.perf_counter()
    c = parse_circuit("qubits 1\ninputs x\nrx q0 $x\nrx q0 1.5707963267948966\nmeasure q0")
    eps = 0.2
    box = ball_env({"x": np.pi / 2}, eps)
    trace = []
    final = run_abstract_state(c, box, trace=trace, **REFERENCE_SETTINGS)
    mid = trace[0]
    pts = grid_points([np.pi / 2 - eps], [np.pi / 2 + eps], 2001, half_angle_critical_points)
    hull = hull_of_states(simulate(c, pts))
    dt = time.perf_counter() - t0
    record(3, {
        "intermediate 0": close(amp(mid, 0), (0.51, 0.86, 0, 0)),
        "final 1": close(amp(final, 1), (0, 0, -1.216, -0.722)),
        "hull contained": hull.subset_of(final),
        "strictly": not final.subset_of(hull, tol=1e-3),
        "<1s": dt < 1,
    }, f"intermediate 0 re={np.round(amp(mid, 0)[:2], 3).tolist()} final 1 im={np.round(amp(final, 1)[2:], 3).tolist()}")


def test_criterion_4_symbolic(two_qubit):
    t0 = time.perf_counter()
    sym = run_abstract(two_qubit, BOX, mode="symbolic", clipped=False, strict=False)
    rho = run_abstract(two_qubit, BOX, **REFERENCE_SETTINGS)
    dt = time.perf_counter() - t0
    want = {0: (0.165, 0.394), 1: (0.128, 0.410), 2: (0, 0.068), 3: (0.320, 0.698)}
    record(4, {
        "rho#_s": all(close(dist(sym, e), w) for e, w in want.items()),
        "tighter than rho#": sym.subset_of(rho),
        "<1s": dt < 1,
    }, f"{dt * 1000:.1f} ms")


def test_criterion_5_refinement(two_qubit):
    t0 = time.perf_counter()
    d, parts = split_union(two_qubit, BOX, "x0", SYMBOLIC)
    v = verify_robust(VerificationProblem(two_qubit, CENTER, 0.5, config=SYMBOLIC))
    dt = time.perf_counter() - t0
    want = {0: (0.176, 0.387), 1: (0.139, 0.367), 2: (0, 0.057), 3: (0.322, 0.674)}
    record(5, {
        "two halves": len(parts) == 2,
        "union": all(close(dist(d, e), w) for e, w in want.items()),
        "robust": v.robust,
        "<=3 regions": v.regions_explored <= 3,
        "<1s": dt < 1,
    }, f"{v.regions_explored} regions, {dt * 1000:.1f} ms")


def test_criterion_6_classification():
    t0 = time.perf_counter()
    lo, hi = np.zeros(8), np.zeros(8)
    entries = {0b000: (0.2, 0.46), 0b001: (0, 0.2), 0b010: (0.09, 0.10), 0b101: (0.11, 0.6), 0b111: (0.1, 0.6)}
    for e, (a, b) in entries.items():
        lo[e], hi[e] = a, b
    got = classify_abstract(AbstractDistribution(lo, hi), (2, 0))
    dt = time.perf_counter() - t0
    record(6, {"{00, 11}": got == {(0, 0), (1, 1)}, "<1s": dt < 1}, f"got {sorted(''.join(map(str, k)) for k in got)}")


def test_criterion_7_max_epsilon():
    c = parse_circuit("qubits 1\ninputs x\nrx q0 $x\nmeasure q0")
    t0 = time.perf_counter()
    r = max_epsilon(c, {"x": 0.0}, tau=1e-3)
    dt = time.perf_counter() - t0
    record(7, {
        "pi/2 +- 1e-3": abs(r.epsilon - np.pi / 2) <= 1e-3,
        "<5s": dt < 5,
    }, f"eps={r.epsilon:.5f}, {dt:.2f} s")


def _corpus(seed=2024, n=100, boxes=100):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        c = random_circuit(rng)
        lo, hi = random_boxes(rng, len(c.input_vars), boxes)
        yield rng, c, lo, hi


def test_criterion_8_soundness_harness():
    t0 = time.perf_counter()
    violations = 0
    checked = 0
    for rng, c, lo, hi in _corpus():
        u = rng.random((lo.shape[0], 100, lo.shape[1]))
        pts = lo[:, None, :] + (hi - lo)[:, None, :] * u
        p, _ = run_batch(c, pts)
        for mode, clipped in COMBOS:
            d = run_abstract_batch(c, lo, hi, mode, clipped, strict=True)
            violations += int((p < d.lo[:, None, :]).sum() + (p > d.hi[:, None, :]).sum())
            checked += p.shape[0] * p.shape[1]
    dt = time.perf_counter() - t0
    record(8, {"zero violations": violations == 0, "<10min": dt < 600},
           f"{checked} samples checked, {violations} violations, {dt:.1f} s")


def test_criterion_9_degenerate_boxes():
    worst = 0.0
    for _, c, lo, _ in _corpus():
        p, _ = run_batch(c, lo)
        for mode, clipped in COMBOS:
            for strict in (False, True):
                d = run_abstract_batch(c, lo, lo, mode, clipped, strict)
                worst = max(worst, float(np.abs(d.lo - p).max()), float(np.abs(d.hi - p).max()))
    record(9, {"within 1e-9": worst <= 1e-9}, f"max deviation {worst:.2e}")


def test_criterion_10_completeness():
    rng = np.random.default_rng(99)
    perm_gap = 0.0
    dense_gap = np.inf
    for _ in range(100):
        n = int(rng.integers(1, 4))
        states = family(rng, n, "xy"[rng.integers(2)])
        for g in permutation_gates(rng, n):
            perm_gap = max(perm_gap, hull_gap(g, states, n))
    for axis in "xy":
        for _ in range(50):
            n = int(rng.integers(1, 4))
            states = family(rng, n, axis)
            g = GateOp.rotation(axis, int(rng.integers(n)), _dense_angle(rng))
            dense_gap = min(dense_gap, hull_gap(g, states, n))
    record(10, {
        "generalized permutations exact": perm_gap <= TOL,
        "dense rotations lose precision": dense_gap > 1e-6,
    }, f"largest permutation gap {perm_gap:.1e}, smallest dense gap {dense_gap:.2e}")


def _jobs():
    iris = load_iris()
    return {
        "qcl": iris[::10],
        "ccqc": amplitude_samples(iris)[::10],
        "pv": load_digits_4x4(digits=(0, 1))[::36],
    }


def test_criterion_11_end_to_end():
    cfg = RefinementConfig()
    counts = {}
    slowest = 0.0
    valid = True
    for kind, samples in _jobs().items():
        c = load_weights(data_path(f"{kind}_demo_weights.json")).circuit()
        counts[kind] = 0
        for s in samples:
            center = s.env(c.input_vars)
            v = verify_robust(VerificationProblem(c, center, 0.01, config=cfg))
            t0 = time.perf_counter()
            r = max_epsilon(c, center, cfg=cfg)
            slowest = max(slowest, time.perf_counter() - t0)
            try:
                jsonschema.validate(verdict_report(v, 0.01, cfg), REPORT_SCHEMA)
                jsonschema.validate(max_eps_report(r, cfg), REPORT_SCHEMA)
            except jsonschema.ValidationError:
                valid = False
            counts[kind] += 1
    record(11, {
        ">=10 samples per model": min(counts.values()) >= 10,
        "schema-valid reports": valid,
        "max-eps <60s": slowest < 60,
    }, f"samples {counts}, slowest max-eps {slowest:.1f} s")
