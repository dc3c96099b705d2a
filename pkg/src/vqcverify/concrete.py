"""Dense state-vector semantics and the argmax classifier.

States are complex arrays of length ``2**n`` indexed by basis index (qubit 0
is bit 0). Every function also accepts a leading batch shape, which is how
the verifier evaluates many inputs at once.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Mapping

import numpy as np

from .circuit import Circuit, Gate, GateOp, class_bits, class_value, project

Environment = Mapping[str, float]

_SQRT1_2 = 1 / np.sqrt(2)
_H = np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


class UnboundVariable(KeyError):
    pass


def rotation_matrix(axis: str, angle) -> np.ndarray:
    """``R_axis(angle)`` with shape ``angle.shape + (2, 2)``."""
    t = np.asarray(angle, dtype=float) / 2
    c, s = np.cos(t), np.sin(t)
    m = np.empty(t.shape + (2, 2), dtype=complex)
    if axis == "x":
        m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1] = c, -1j * s, -1j * s, c
    elif axis == "y":
        m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1] = c, -s, s, c
    elif axis == "z":
        m[..., 0, 0], m[..., 1, 1] = c - 1j * s, c + 1j * s
        m[..., 0, 1] = m[..., 1, 0] = 0
    else:
        raise ValueError(f"unknown rotation axis {axis!r}")
    return m


def gate_angle(g: GateOp, env: Environment):
    if g.kind.is_encoding:
        try:
            return env[g.angle_var]
        except KeyError:
            raise UnboundVariable(g.angle_var) from None
    return g.angle_const


def gate_unitary(g: GateOp, env: Environment | None = None) -> np.ndarray:
    """The gate's local matrix.

    Single-qubit gates give a 2x2 matrix. CX gives a 4x4 matrix on the
    register (control = local bit 0, target = local bit 1).
    """
    if g.kind is Gate.CX:
        m = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            j = i ^ 2 if i & 1 else i
            m[j, i] = 1
        return m
    if g.kind is Gate.H:
        return _H.copy()
    if g.kind is Gate.X:
        return _X.copy()
    return rotation_matrix(g.kind.axis, gate_angle(g, env or {}))


def cx_permutation(control: int, target: int, n: int) -> np.ndarray:
    """Index map ``perm`` with ``new[i] = old[perm[i]]`` for CX."""
    idx = np.arange(1 << n)
    return np.where((idx >> control) & 1 == 1, idx ^ (1 << target), idx)


def _split(state: np.ndarray, qubit: int, n: int):
    # view with axis -2 holding the qubit's bit
    return state.reshape(state.shape[:-1] + (1 << (n - qubit - 1), 2, 1 << qubit))


def apply_matrix(state: np.ndarray, m: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a 2x2 matrix (or a batch of them, shape ``(..., 2, 2)``) to one qubit."""
    v = _split(state, qubit, n)
    a, b = v[..., 0, :], v[..., 1, :]
    m = np.asarray(m)
    if m.ndim > 2:
        m = m.reshape(m.shape[:-2] + (1, 1, 2, 2))
    out = np.empty_like(v)
    out[..., 0, :] = m[..., 0, 0] * a + m[..., 0, 1] * b
    out[..., 1, :] = m[..., 1, 0] * a + m[..., 1, 1] * b
    return out.reshape(state.shape)


def apply_gate(state: np.ndarray, g: GateOp, env: Environment | None = None, n: int | None = None) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if n is None:
        n = state.shape[-1].bit_length() - 1
    if g.kind is Gate.CX:
        return state[..., cx_permutation(g.control, g.qubit, n)]
    if g.kind is Gate.X:
        return state[..., np.arange(1 << n) ^ (1 << g.qubit)]
    return apply_matrix(state, gate_unitary(g, env), g.qubit, n)


def lifted_matrix(g: GateOp, env: Environment | None = None, n: int = 1) -> np.ndarray:
    """The full ``2**n x 2**n`` matrix of a gate, by explicit tensor products."""
    if g.kind is Gate.CX:
        m = np.zeros((1 << n, 1 << n), dtype=complex)
        perm = cx_permutation(g.control, g.qubit, n)
        m[np.arange(1 << n), perm] = 1
        return m
    u = gate_unitary(g, env)
    # qubit 0 is the rightmost tensor factor
    return np.kron(np.kron(np.eye(1 << (n - g.qubit - 1)), u), np.eye(1 << g.qubit))


def init_state(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one qubit")
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1
    return psi


def measure(state: np.ndarray) -> np.ndarray:
    # a unit vector's probabilities are at most 1; rounding can overshoot
    return np.minimum(state.real**2 + state.imag**2, 1.0)


def class_matrix(observed: tuple[int, ...], n: int) -> np.ndarray:
    """0/1 matrix ``G[class, e]`` grouping basis outcomes by observed bits."""
    g = np.zeros((1 << len(observed), 1 << n))
    for e in range(1 << n):
        g[class_value(project(e, observed)), e] = 1
    return g


def class_probabilities(dist: np.ndarray, observed: tuple[int, ...]) -> np.ndarray:
    n = dist.shape[-1].bit_length() - 1
    return dist @ class_matrix(observed, n).T


def classify(dist: np.ndarray, observed: tuple[int, ...]) -> tuple[int, ...]:
    """The class with the largest aggregated probability.

    Ties go to the smallest class value.
    """
    probs = class_probabilities(np.asarray(dist, dtype=float), observed)
    return class_bits(int(np.argmax(probs)), len(observed))


def env_vector(c: Circuit, env: Environment) -> np.ndarray:
    try:
        return np.array([float(env[v]) for v in c.input_vars])
    except KeyError as e:
        raise UnboundVariable(e.args[0]) from None


# above this size constant runs are applied gate by gate instead of composed
_FUSE_MAX_QUBITS = 8


@lru_cache(maxsize=256)
def _plan(c: Circuit):
    var = {name: k for k, name in enumerate(c.input_vars)}
    n = c.n_qubits
    steps, run = [], []

    def flush():
        if len(run) > 1 and n <= _FUSE_MAX_QUBITS:
            m = np.eye(1 << n, dtype=complex)
            for g in run:
                m = lifted_matrix(g, None, n) @ m
            steps.append(("matrix", m.T.copy()))
        else:
            steps.extend(("gate", g) for g in run)
        run.clear()

    for g in c.ops:
        if g.kind.is_encoding:
            flush()
            steps.append(("encode", g.kind.axis, g.qubit, var[g.angle_var]))
        else:
            run.append(g)
    flush()
    return tuple(steps)


def simulate(c: Circuit, inputs) -> np.ndarray:
    """Final states for input vectors ordered like ``c.input_vars``.

    ``inputs`` has shape ``(..., len(c.input_vars))``; the result has shape
    ``(..., 2**n)``. Runs of constant gates are multiplied out once per
    circuit and cached.
    """
    x = np.asarray(inputs, dtype=float)
    batch = x.shape[:-1]
    state = np.zeros(batch + (c.dim,), dtype=complex)
    state[..., 0] = 1
    for step in _plan(c):
        if step[0] == "encode":
            _, axis, q, k = step
            state = apply_matrix(state, rotation_matrix(axis, x[..., k]), q, c.n_qubits)
        elif step[0] == "matrix":
            state = state @ step[1]
        else:
            state = apply_gate(state, step[1], n=c.n_qubits)
    return state


def simulate_gates(c: Circuit, env: Environment) -> list[np.ndarray]:
    """Gate-by-gate reference run returning every intermediate state."""
    state = init_state(c.n_qubits)
    states = [state]
    for g in c.ops:
        state = apply_gate(state, g, env, c.n_qubits)
        states.append(state)
    return states


def run_batch(c: Circuit, inputs) -> tuple[np.ndarray, np.ndarray]:
    """Distributions and class values (ints) for a batch of input vectors."""
    dist = measure(simulate(c, inputs))
    probs = class_probabilities(dist, c.observed)
    return dist, np.argmax(probs, axis=-1)


def run_concrete(c: Circuit, env: Environment) -> tuple[np.ndarray, tuple[int, ...]]:
    dist = measure(simulate(c, env_vector(c, env)))
    return dist, classify(dist, c.observed)
