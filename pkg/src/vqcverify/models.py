"""Builders for the classifier circuits used in the evaluation.

All builders expand ``R3(wi, wj, wk) = Rz(wk) . Ry(wj) . Rx(wi)`` into three
rotations applied Rx first, and observe qubit 0.
"""

from __future__ import annotations

from typing import Sequence

from .circuit import Circuit, Gate, GateOp, check_circuit

MODEL_ARITY = {"qcl": 4, "ccqc": 36, "pv": 8}
MODEL_FEATURES = {"qcl": 4, "ccqc": 5, "pv": 16}


class ModelError(ValueError):
    pass


def _r3(q: int, wi: float, wj: float, wk: float) -> list[GateOp]:
    return [GateOp.rotation("x", q, wi), GateOp.rotation("y", q, wj), GateOp.rotation("z", q, wk)]


def qcl(weights: Sequence[float]) -> Circuit:
    xs = [f"x{i}" for i in range(4)]
    ops = [GateOp.encoding("x", i, xs[i]) for i in range(4)]
    ops += [GateOp.cx(0, 1), GateOp.cx(1, 2), GateOp.cx(2, 3), GateOp.cx(3, 0)]
    ops += [GateOp.rotation("y", i, weights[i]) for i in range(4)]
    return Circuit(4, tuple(xs), tuple(ops), (0,))


def ccqc(weights: Sequence[float]) -> Circuit:
    # the encoding block is the two-qubit amplitude-preparation routine; its
    # five inputs are angles, see datasets.mottonen_angles
    xs = [f"x{i}" for i in range(5)]
    ops = [
        GateOp.encoding("y", 0, "x0"),
        GateOp.cx(0, 1),
        GateOp.encoding("y", 1, "x1"),
        GateOp.cx(0, 1),
        GateOp(Gate.X, 0),
        GateOp.encoding("y", 1, "x2"),
        GateOp.cx(0, 1),
        GateOp.encoding("y", 1, "x3"),
        GateOp.cx(0, 1),
        GateOp(Gate.X, 0),
        GateOp.encoding("y", 1, "x4"),
    ]
    for layer in range(6):
        w = weights[6 * layer: 6 * layer + 6]
        ops += _r3(0, *w[0:3]) + _r3(1, *w[3:6])
        ops.append(GateOp.cx(0, 1))
    return Circuit(2, tuple(xs), tuple(ops), (0,))


def pv(weights: Sequence[float]) -> Circuit:
    xs = [f"x{i}" for i in range(16)]
    ops = [GateOp(Gate.H, q) for q in range(4)]
    for block, axis in enumerate("xzxz"):
        ops += [GateOp.encoding(axis, q, xs[4 * block + q]) for q in range(4)]
    ops += [GateOp.rotation("y", q, weights[q]) for q in range(4)]
    ops += [GateOp.cx(3, 0), GateOp.cx(0, 1), GateOp.cx(1, 2), GateOp.cx(2, 3)]
    ops += [GateOp.rotation("y", q, weights[4 + q]) for q in range(4)]
    ops += [GateOp.cx(0, 1), GateOp.cx(1, 2), GateOp.cx(2, 3), GateOp.cx(3, 0)]
    return Circuit(4, tuple(xs), tuple(ops), (0,))


_BUILDERS = {"qcl": qcl, "ccqc": ccqc, "pv": pv}


def build_model(kind: str, weights: Sequence[float]) -> Circuit:
    """Materialize one of the evaluation classifiers (``qcl``, ``ccqc``, ``pv``)."""
    kind = kind.lower()
    if kind not in _BUILDERS:
        raise ModelError(f"unknown model {kind!r}; expected one of {sorted(_BUILDERS)}")
    weights = [float(w) for w in weights]
    if len(weights) != MODEL_ARITY[kind]:
        raise ModelError(f"{kind} takes {MODEL_ARITY[kind]} weights, got {len(weights)}")
    return check_circuit(_BUILDERS[kind](weights))


def two_qubit_example(weights: Sequence[float] = (0.99, -0.50, 3.27, -0.69)) -> Circuit:
    """The two-qubit walkthrough classifier.

    ``w0`` and ``w2`` act on q0, ``w1`` and ``w3`` on q1. This is the
    assignment that reproduces the reference amplitudes in the tests.
    """
    w0, w1, w2, w3 = (float(w) for w in weights)
    ops = (
        GateOp.encoding("x", 0, "x0"),
        GateOp.encoding("x", 1, "x1"),
        GateOp.rotation("y", 0, w0),
        GateOp.rotation("y", 1, w1),
        GateOp.cx(0, 1),
        GateOp.rotation("y", 0, w2),
        GateOp.rotation("y", 1, w3),
    )
    return check_circuit(Circuit(2, ("x0", "x1"), ops, (0,)))
