"""Slow reference implementations used to check the fast engines.

Nothing here is on the verification path. The functions favor obviousness
over speed: scalar interval objects, full ``2**n x 2**n`` matrices, and
brute-force sampling.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .abstract import AbstractDistribution, AbstractEnvironment, AbstractState
from .circuit import Circuit, GateOp
from .concrete import lifted_matrix, measure, run_batch, simulate
from .interval import ComplexInterval, RealInterval, ci_add, ci_mul, ci_sqmod, itv_trig

_ZERO = ComplexInterval.point(0.0)


def interval_gate_matrix(g: GateOp, aenv: AbstractEnvironment | None, n: int) -> list[list[ComplexInterval]]:
    """Lifted gate matrix with interval entries, built entry by entry."""
    if g.kind.is_encoding:
        iv = aenv[g.angle_var]
        s, c = itv_trig(RealInterval(iv.lo / 2, iv.hi / 2))
        z = RealInterval.point(0.0)
        neg_s = -s
        local = {
            "x": [[ComplexInterval(c, z), ComplexInterval(z, neg_s)], [ComplexInterval(z, neg_s), ComplexInterval(c, z)]],
            "y": [[ComplexInterval(c, z), ComplexInterval(neg_s, z)], [ComplexInterval(s, z), ComplexInterval(c, z)]],
            "z": [[ComplexInterval(c, neg_s), _ZERO], [_ZERO, ComplexInterval(c, s)]],
        }[g.kind.axis]
        dim = 1 << n
        m = [[_ZERO] * dim for _ in range(dim)]
        q = g.qubit
        for e in range(dim):
            for f in range(dim):
                if (e ^ f) & ~(1 << q):
                    continue
                m[e][f] = local[(e >> q) & 1][(f >> q) & 1]
        return m
    u = lifted_matrix(g, None, n)
    return [[ComplexInterval.point(complex(x)) for x in row] for row in u]


def interval_matvec(m: Sequence[Sequence[ComplexInterval]], v: Sequence[ComplexInterval]) -> list[ComplexInterval]:
    out = []
    for row in m:
        acc = _ZERO
        for a, b in zip(row, v):
            acc = ci_add(acc, ci_mul(a, b))
        out.append(acc)
    return out


def state_to_list(s: AbstractState) -> list[ComplexInterval]:
    return [s[e] for e in range(s.dim)]


def list_to_state(v: Sequence[ComplexInterval]) -> AbstractState:
    return AbstractState.from_parts(
        (
            [x.re.lo for x in v],
            [x.re.hi for x in v],
            [x.im.lo for x in v],
            [x.im.hi for x in v],
        )
    )


def run_abstract_oracle(c: Circuit, aenv: AbstractEnvironment) -> AbstractDistribution:
    """Stepwise, unclipped abstract run via full interval matrices."""
    v = [ComplexInterval.point(1.0)] + [_ZERO] * (c.dim - 1)
    for g in c.ops:
        v = interval_matvec(interval_gate_matrix(g, aenv, c.n_qubits), v)
    probs = [ci_sqmod(x) for x in v]
    return AbstractDistribution(np.array([p.lo for p in probs]), np.array([p.hi for p in probs]))


def hull_of_states(states: np.ndarray) -> AbstractState:
    """Componentwise hull of concrete states, shape ``(K, N)``."""
    states = np.asarray(states, dtype=complex)
    return AbstractState(states.real.min(0), states.real.max(0), states.imag.min(0), states.imag.max(0))


def hull_of_dists(dists: np.ndarray) -> AbstractDistribution:
    dists = np.asarray(dists, dtype=float)
    return AbstractDistribution(dists.min(0), dists.max(0))


def box_points(lo, hi, k: int, rng: np.random.Generator, corners: bool = True) -> np.ndarray:
    """``k`` uniform points in the box, plus all corners when there are few."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    pts = lo + (hi - lo) * rng.random((k, lo.size))
    if corners and lo.size <= 10:
        bits = (np.arange(1 << lo.size)[:, None] >> np.arange(lo.size)) & 1
        pts = np.vstack([np.where(bits == 1, hi, lo), pts])
    return pts


def grid_points(lo, hi, per_axis: int, extra: Callable[[float, float], list[float]] | None = None) -> np.ndarray:
    """Tensor grid over the box; ``extra`` may add points per axis (e.g. critical points)."""
    axes = []
    for a, b in zip(np.atleast_1d(lo), np.atleast_1d(hi)):
        pts = list(np.linspace(a, b, per_axis))
        if extra is not None:
            pts += [p for p in extra(a, b) if a <= p <= b]
        axes.append(np.unique(pts))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def half_angle_critical_points(a: float, b: float) -> list[float]:
    """Angles where cos(x/2) or sin(x/2) reaches an extremum."""
    k0, k1 = int(np.floor(a / np.pi)) - 1, int(np.ceil(b / np.pi)) + 1
    return [k * np.pi for k in range(k0, k1 + 1)]


def concrete_hull(c: Circuit, points: np.ndarray) -> tuple[AbstractState, AbstractDistribution]:
    states = simulate(c, points)
    return hull_of_states(states), hull_of_dists(measure(states))


def classes_on(c: Circuit, points: np.ndarray) -> np.ndarray:
    return run_batch(c, points)[1]


def gate_on_states(g: GateOp, states: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(states) @ lifted_matrix(g, None, n).T


def measurement_locally_complete(s: AbstractState) -> bool:
    """Each amplitude has an identically-zero real or imaginary part."""
    re0 = (s.re_lo == 0) & (s.re_hi == 0)
    im0 = (s.im_lo == 0) & (s.im_hi == 0)
    return bool(np.all(re0 | im0))
