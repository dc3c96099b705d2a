"""Hull-equality checks for single gates.

For a finite set of states ``S`` the oracle compares the abstract gate
applied to the hull of ``S`` with the hull of the gate applied to ``S``.
Generalized permutations (CX, X, Rz, Ry and Rx at multiples of pi) pass on
families whose amplitudes each lie on the real or the imaginary axis; dense
rotations fail as soon as the box has width.
"""

from __future__ import annotations

import numpy as np
import pytest

from vqcverify.abstract import AbstractState, apply_parametric_abstract, is_generalized_permutation
from vqcverify.circuit import Circuit, Gate, GateOp
from vqcverify.concrete import lifted_matrix, simulate
from vqcverify.oracles import box_points, gate_on_states, hull_of_states, measurement_locally_complete

TOL = 1e-9


def family(rng, n: int, axes: str):
    """Product-state family: one encoding per qubit, axis drawn from ``axes``."""
    names = tuple(f"x{q}" for q in range(n))
    ops = tuple(GateOp.encoding(axes[rng.integers(len(axes))], q, names[q]) for q in range(n))
    c = Circuit(n, names, ops, (0,))
    center = rng.uniform(-np.pi, np.pi, n)
    half = rng.uniform(0.05, 0.5, n)
    pts = box_points(center - half, center + half, 200, rng)
    return simulate(c, pts)


def hull_gap(g: GateOp, states: np.ndarray, n: int) -> float:
    """Largest distance between the abstract image and the concrete hull."""
    before = hull_of_states(states)
    got = apply_parametric_abstract(before, g)
    want = hull_of_states(gate_on_states(g, states, n))
    assert want.subset_of(got, tol=TOL)
    return max(float(np.abs(a - b).max()) for a, b in zip(got.parts, want.parts))


def permutation_gates(rng, n: int):
    q = int(rng.integers(n))
    k = int(rng.integers(-3, 4))
    gates = [
        GateOp(Gate.X, q),
        GateOp.rotation("z", q, float(rng.uniform(-2 * np.pi, 2 * np.pi))),
        GateOp.rotation("y", q, k * np.pi),
        GateOp.rotation("x", q, k * np.pi),
    ]
    if n > 1:
        t = int(rng.integers(n - 1))
        gates.append(GateOp.cx(q, t if t < q else t + 1))
    return gates


@pytest.mark.parametrize("axes", ["x", "y", "xy"])
def test_generalized_permutations_are_complete(rng, axes):
    for _ in range(60):
        n = int(rng.integers(1, 4))
        states = family(rng, n, axes)
        assert measurement_locally_complete(hull_of_states(states))
        for g in permutation_gates(rng, n):
            assert is_generalized_permutation(lifted_matrix(g, n=n))
            assert hull_gap(g, states, n) <= TOL, g


def test_exact_permutations_complete_on_any_family(rng):
    # X and CX only move amplitudes, so even 2-D spread is kept exactly
    for _ in range(40):
        n = int(rng.integers(2, 4))
        names = tuple(f"x{q}" for q in range(n))
        ops = tuple(GateOp.encoding(a, q, names[q]) for q in range(n) for a in "xy")
        c = Circuit(n, names, ops, (0,))
        pts = box_points(np.zeros(n), np.full(n, 1.0), 100, rng)
        states = simulate(c, pts)
        for g in (GateOp(Gate.X, 1), GateOp.cx(0, 1), GateOp.rotation("y", 0, np.pi)):
            assert hull_gap(g, states, n) <= TOL


def _dense_angle(rng):
    # keep both cos and sin of the half angle away from zero
    return float(rng.choice([-1, 1]) * rng.uniform(0.5, np.pi - 0.5))


@pytest.mark.parametrize("axis", ["x", "y"])
def test_dense_rotations_are_incomplete(rng, axis):
    for _ in range(60):
        n = int(rng.integers(1, 4))
        states = family(rng, n, axis)
        q = int(rng.integers(n))
        g = GateOp.rotation(axis, q, _dense_angle(rng))
        assert not is_generalized_permutation(lifted_matrix(g, n=n))
        assert hull_gap(g, states, n) > 1e-6, g


def test_hadamard_is_incomplete(rng):
    for _ in range(20):
        states = family(rng, 1, "y")
        assert hull_gap(GateOp(Gate.H, 0), states, 1) > 1e-6


def test_rz_loses_precision_on_two_dimensional_spread(rng):
    # amplitudes spread over both axes: rotating the box by a generic phase
    # covers more than the rotated point cloud
    c = Circuit(1, ("a", "b"), (GateOp.encoding("x", 0, "a"), GateOp.encoding("y", 0, "b")), (0,))
    pts = box_points([0.4, 0.9], [1.4, 1.9], 400, rng)
    states = simulate(c, pts)
    assert not measurement_locally_complete(hull_of_states(states))
    assert hull_gap(GateOp.rotation("z", 0, 0.7), states, 1) > 1e-3
    # quarter turns only swap and negate the axes
    assert hull_gap(GateOp.rotation("z", 0, np.pi), states, 1) <= TOL


def test_degenerate_family_is_complete_for_every_gate(rng):
    psi = simulate(Circuit(2, ("a", "b"), (GateOp.encoding("x", 0, "a"), GateOp.encoding("y", 1, "b")), (0,)), [[0.3, 1.1]])
    for g in (GateOp(Gate.H, 0), GateOp.rotation("x", 1, 0.77), GateOp.cx(1, 0)):
        assert hull_gap(g, psi, 2) <= 1e-12
    assert AbstractState.point(psi[0]).subset_of(hull_of_states(psi))
