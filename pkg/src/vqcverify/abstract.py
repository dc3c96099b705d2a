"""Interval abstract semantics of circuits.

An abstract state stores four float arrays (``re_lo``, ``re_hi``, ``im_lo``,
``im_hi``) of shape ``(..., 2**n)``. A leading batch axis holds independent
boxes, so the verifier can push a whole worklist level through one call.

Two execution modes are supported:

``stepwise``
    every gate is applied to the interval vector on its own.
``symbolic``
    encoding gates are applied one at a time, while each maximal run of
    constant gates is multiplied out exactly first and applied once. This
    avoids compounding the over-approximation inside the run.

With ``strict=True`` every interval bound is widened by one ulp after each
floating-point operation, constant matrix entries are widened too, and
composed matrices carry an explicit rounding-error radius. The result then
encloses the real-arithmetic semantics, not just the float one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .circuit import Circuit, Gate, GateOp, basis_label, class_bits, class_label, class_value, project
from .concrete import cx_permutation, gate_unitary, lifted_matrix
from .interval import (
    ComplexInterval,
    RealInterval,
    civ_add,
    civ_mul,
    civ_sqmod,
    iv_add,
    iv_down,
    iv_meet,
    iv_trig,
    iv_up,
)

MODES = ("stepwise", "symbolic")
MAX_SYMBOLIC_QUBITS = 12
ZERO_TOL = 1e-12
# without outward rounding a point can land a few ulps outside the physical range
SNAP_TOL = 1e-9
_U = 2.0 ** -53


class SoundnessError(RuntimeError):
    """An enclosure became empty, which can only mean an internal bug."""


# ---------------------------------------------------------------------------
# environments


@dataclass(frozen=True)
class AbstractEnvironment:
    """A box of input values: one real interval per variable."""

    bindings: Mapping[str, RealInterval]

    def __post_init__(self):
        object.__setattr__(self, "bindings", dict(self.bindings))

    def __getitem__(self, name: str) -> RealInterval:
        return self.bindings[name]

    def __contains__(self, env) -> bool:
        return all(float(env[k]) in iv for k, iv in self.bindings.items())

    def __iter__(self):
        return iter(self.bindings)

    def __len__(self):
        return len(self.bindings)

    @classmethod
    def from_bounds(cls, names: Sequence[str], lo, hi) -> "AbstractEnvironment":
        return cls({k: RealInterval(float(a), float(b)) for k, a, b in zip(names, lo, hi)})

    def bounds(self, names: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
        missing = [k for k in names if k not in self.bindings]
        if missing:
            raise KeyError(f"unbound variable: {missing[0]}")
        lo = np.array([self.bindings[k].lo for k in names], dtype=float)
        hi = np.array([self.bindings[k].hi for k in names], dtype=float)
        return lo, hi

    def center(self) -> dict[str, float]:
        return {k: iv.mid for k, iv in self.bindings.items()}

    def widest(self, names: Sequence[str] | None = None) -> str:
        names = list(self.bindings) if names is None else list(names)
        # max() keeps the first of equal keys, which gives declaration order
        return max(names, key=lambda k: self.bindings[k].width)

    def split(self, name: str) -> tuple["AbstractEnvironment", "AbstractEnvironment"]:
        from .interval import ri_split

        left, right = ri_split(self.bindings[name])
        a, b = dict(self.bindings), dict(self.bindings)
        a[name], b[name] = left, right
        return AbstractEnvironment(a), AbstractEnvironment(b)

    def __str__(self):
        return "{" + ", ".join(f"{k}: {v}" for k, v in self.bindings.items()) + "}"


def ball_env(env: Mapping[str, float], eps: float) -> AbstractEnvironment:
    """The l-infinity ball of radius ``eps`` around ``env``."""
    eps = float(eps)
    if not math.isfinite(eps) or eps < 0:
        raise ValueError(f"epsilon must be finite and non-negative, got {eps}")
    return AbstractEnvironment({k: RealInterval(float(v) - eps, float(v) + eps) for k, v in env.items()})


# ---------------------------------------------------------------------------
# abstract values


def _check_nonempty(lo, hi, what):
    if np.any(lo > hi) or np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
        raise SoundnessError(f"empty or invalid {what} enclosure")


@dataclass(frozen=True)
class AbstractState:
    """Complex-interval amplitudes, possibly with a leading batch axis."""

    re_lo: np.ndarray
    re_hi: np.ndarray
    im_lo: np.ndarray
    im_hi: np.ndarray

    @classmethod
    def from_parts(cls, parts) -> "AbstractState":
        return cls(*(np.asarray(p, dtype=float) for p in parts))

    @classmethod
    def point(cls, psi) -> "AbstractState":
        psi = np.asarray(psi, dtype=complex)
        return cls(psi.real.copy(), psi.real.copy(), psi.imag.copy(), psi.imag.copy())

    @classmethod
    def initial(cls, n: int, batch: tuple[int, ...] = ()) -> "AbstractState":
        z = np.zeros(batch + (1 << n,))
        re = z.copy()
        re[..., 0] = 1.0
        return cls(re, re.copy(), z, z.copy())

    def __eq__(self, other):
        if not isinstance(other, AbstractState):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.parts, other.parts))

    __hash__ = None

    @property
    def parts(self):
        return self.re_lo, self.re_hi, self.im_lo, self.im_hi

    @property
    def dim(self) -> int:
        return self.re_lo.shape[-1]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __getitem__(self, e: int) -> ComplexInterval:
        if self.re_lo.ndim != 1:
            raise TypeError("index a single (unbatched) state")
        return ComplexInterval(
            RealInterval(float(self.re_lo[e]), float(self.re_hi[e])),
            RealInterval(float(self.im_lo[e]), float(self.im_hi[e])),
        )

    def amps(self) -> dict[int, ComplexInterval]:
        return {e: self[e] for e in range(self.dim)}

    def box(self, b: int) -> "AbstractState":
        return AbstractState(*(p[b] for p in self.parts))

    def contains(self, psi, tol: float = 0.0) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        return (
            (self.re_lo - tol <= psi.real)
            & (psi.real <= self.re_hi + tol)
            & (self.im_lo - tol <= psi.imag)
            & (psi.imag <= self.im_hi + tol)
        ).all(axis=-1)

    def subset_of(self, other: "AbstractState", tol: float = 0.0) -> bool:
        return bool(
            np.all(other.re_lo - tol <= self.re_lo)
            and np.all(self.re_hi <= other.re_hi + tol)
            and np.all(other.im_lo - tol <= self.im_lo)
            and np.all(self.im_hi <= other.im_hi + tol)
        )

    def __str__(self):
        if self.re_lo.ndim != 1:
            return f"AbstractState(batch={self.re_lo.shape[:-1]}, dim={self.dim})"
        n = self.n_qubits
        return "{" + ", ".join(f"{basis_label(e, n)}: {self[e]}" for e in range(self.dim)) + "}"


@dataclass(frozen=True)
class AbstractDistribution:
    """Probability intervals per basis outcome, possibly batched."""

    lo: np.ndarray
    hi: np.ndarray
    strict: bool = field(default=False, compare=False)

    def __eq__(self, other):
        if not isinstance(other, AbstractDistribution):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    __hash__ = None

    @property
    def dim(self) -> int:
        return self.lo.shape[-1]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __getitem__(self, e: int) -> RealInterval:
        if self.lo.ndim != 1:
            raise TypeError("index a single (unbatched) distribution")
        return RealInterval(float(self.lo[e]), float(self.hi[e]))

    def probs(self) -> dict[int, RealInterval]:
        return {e: self[e] for e in range(self.dim)}

    def box(self, b: int) -> "AbstractDistribution":
        return AbstractDistribution(self.lo[b], self.hi[b], self.strict)

    def contains(self, dist, tol: float = 0.0) -> np.ndarray:
        dist = np.asarray(dist, dtype=float)
        return ((self.lo - tol <= dist) & (dist <= self.hi + tol)).all(axis=-1)

    def subset_of(self, other: "AbstractDistribution", tol: float = 0.0) -> bool:
        return bool(np.all(other.lo - tol <= self.lo) and np.all(self.hi <= other.hi + tol))

    def aggregate(self, observed: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
        """Interval sums per class, shape ``(..., 2**len(observed))``."""
        return aggregate_classes(self.lo, self.hi, observed, self.strict)

    def class_intervals(self, observed: tuple[int, ...]) -> dict[str, RealInterval]:
        lo, hi = self.aggregate(observed)
        k = len(observed)
        return {class_label(class_bits(v, k)): RealInterval(float(lo[v]), float(hi[v])) for v in range(lo.shape[-1])}

    def __str__(self):
        if self.lo.ndim != 1:
            return f"AbstractDistribution(batch={self.lo.shape[:-1]}, dim={self.dim})"
        n = self.n_qubits
        return "{" + ", ".join(f"{basis_label(e, n)}: {self[e]}" for e in range(self.dim)) + "}"


def hull_distributions(ds: Iterable[AbstractDistribution]) -> AbstractDistribution:
    """Componentwise hull of several distributions (or of one batched one)."""
    ds = list(ds)
    if not ds:
        raise ValueError("hull of nothing")
    lo = np.concatenate([np.atleast_2d(d.lo) for d in ds]).min(axis=0)
    hi = np.concatenate([np.atleast_2d(d.hi) for d in ds]).max(axis=0)
    return AbstractDistribution(lo, hi, ds[0].strict)


# ---------------------------------------------------------------------------
# single steps


def _widen(x: float, strict: bool):
    """Point entry as an interval; widened by an ulp unless exactly 0 or +-1."""
    if not strict or x in (0.0, 1.0, -1.0):
        return x, x
    return float(np.nextafter(x, -np.inf)), float(np.nextafter(x, np.inf))


def _const_entries(u: np.ndarray, strict: bool):
    """2x2 complex matrix -> entries as interval 4-tuples (``None`` for zeros)."""
    out = []
    for i in range(2):
        row = []
        for j in range(2):
            z = complex(u[i, j])
            if abs(z) <= ZERO_TOL and z == 0:
                row.append(None)
            else:
                row.append(_widen(z.real, strict) + _widen(z.imag, strict))
        out.append(row)
    return out


def encoding_entries(axis: str, lo, hi, strict: bool = False):
    """Interval entries of ``R_axis(theta)`` for ``theta`` in ``[lo, hi]``.

    Each entry is the tightest box around the entry's range. ``lo`` and
    ``hi`` may be arrays (one entry set per box).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    s_lo, s_hi, c_lo, c_hi = iv_trig(lo / 2, hi / 2, strict)
    zero = np.zeros_like(s_lo)
    cos = (c_lo, c_hi, zero, zero)
    if axis == "x":
        m = (zero, zero, -s_hi, -s_lo)
        return [[cos, m], [m, cos]]
    if axis == "y":
        return [[cos, (-s_hi, -s_lo, zero, zero)], [(s_lo, s_hi, zero, zero), cos]]
    if axis == "z":
        return [[(c_lo, c_hi, -s_hi, -s_lo), None], [None, (c_lo, c_hi, s_lo, s_hi)]]
    raise ValueError(f"unknown rotation axis {axis!r}")


def _bcast(entry, ndim: int):
    # (B,) entries against (B, hi, lo) slices
    return tuple(np.reshape(x, np.shape(x) + (1,) * (ndim - np.ndim(x))) for x in entry)


def apply_entries(s: AbstractState, m, qubit: int, strict: bool = False) -> AbstractState:
    """Apply a 2x2 interval matrix (entries from :func:`encoding_entries`
    or :func:`_const_entries`) to one qubit of a (batched) abstract state."""
    n = s.n_qubits
    shape = s.re_lo.shape[:-1] + (1 << (n - qubit - 1), 2, 1 << qubit)
    v = [p.reshape(shape) for p in s.parts]
    halves = [tuple(p[..., k, :] for p in v) for k in (0, 1)]
    ndim = len(shape) - 1
    out = [np.empty(shape) for _ in range(4)]
    for i in range(2):
        acc = None
        for j in range(2):
            if m[i][j] is None:
                continue
            term = civ_mul(_bcast(m[i][j], ndim), halves[j], strict)
            acc = term if acc is None else civ_add(acc, term, strict)
        if acc is None:
            acc = tuple(np.zeros(shape[:-2] + shape[-1:]) for _ in range(4))
        for p, a in zip(out, acc):
            p[..., i, :] = a
    return AbstractState(*(p.reshape(s.re_lo.shape) for p in out))


def apply_permutation(s: AbstractState, perm: np.ndarray) -> AbstractState:
    return AbstractState(*(p[..., perm] for p in s.parts))


def apply_matrix_abstract(s: AbstractState, m: np.ndarray, err: np.ndarray | None = None, strict: bool = False) -> AbstractState:
    """Interval matrix-vector product with a full-space matrix ``m +- err``."""
    m = np.asarray(m, dtype=complex)
    dim = m.shape[0]
    if err is None:
        err = np.zeros(m.shape)
    if not strict:
        return _apply_point_matrix(s, m)
    acc = None
    for col in range(dim):
        e = err[:, col]
        entry = (iv_down(m[:, col].real - e, True), iv_up(m[:, col].real + e, True),
                 iv_down(m[:, col].imag - e, True), iv_up(m[:, col].imag + e, True))
        vec = tuple(p[..., col:col + 1] for p in s.parts)
        term = civ_mul(entry, vec, strict)
        acc = term if acc is None else civ_add(acc, term, strict)
    return AbstractState(*acc)


def _pos_neg(a):
    return np.maximum(a, 0.0), np.maximum(-a, 0.0)


def _apply_point_matrix(s: AbstractState, m: np.ndarray) -> AbstractState:
    # a*[l,h] = [a+ l - a- h, a+ h - a- l] for a point a; summed by matmul
    rp, rn = _pos_neg(m.real)
    ip, inn = _pos_neg(m.imag)
    rl, rh, il, ih = s.parts
    t = lambda a: a.T  # noqa: E731
    re_lo = rl @ t(rp) - rh @ t(rn) - (ih @ t(ip) - il @ t(inn))
    re_hi = rh @ t(rp) - rl @ t(rn) - (il @ t(ip) - ih @ t(inn))
    im_lo = il @ t(rp) - ih @ t(rn) + rl @ t(ip) - rh @ t(inn)
    im_hi = ih @ t(rp) - il @ t(rn) + rh @ t(ip) - rl @ t(inn)
    return AbstractState(re_lo, re_hi, im_lo, im_hi)


def _meet_snapped(lo, hi, a: float, b: float, strict: bool):
    """Meet with ``[a, b]``; unless strict, pull rounding overshoot back first."""
    if not strict:
        lo = np.where((lo > b) & (lo <= b + SNAP_TOL), b, lo)
        hi = np.where((hi < a) & (hi >= a - SNAP_TOL), a, hi)
    return iv_meet(lo, hi, a, b)


def clip_state(s: AbstractState, strict: bool = True) -> AbstractState:
    """Meet every component with ``[-1, 1]``."""
    rl, rh = _meet_snapped(s.re_lo, s.re_hi, -1.0, 1.0, strict)
    il, ih = _meet_snapped(s.im_lo, s.im_hi, -1.0, 1.0, strict)
    _check_nonempty(rl, rh, "amplitude")
    _check_nonempty(il, ih, "amplitude")
    return AbstractState(rl, rh, il, ih)


def measure_abstract(s: AbstractState, clipped: bool = True, strict: bool = False) -> AbstractDistribution:
    lo, hi = civ_sqmod(*s.parts, strict=strict)
    if clipped:
        lo, hi = _meet_snapped(lo, hi, 0.0, 1.0, strict)
        _check_nonempty(lo, hi, "probability")
    return AbstractDistribution(lo, hi, strict)


def aggregate_classes(lo, hi, observed: tuple[int, ...], strict: bool = False):
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n = lo.shape[-1].bit_length() - 1
    k = len(observed)
    members: list[list[int]] = [[] for _ in range(1 << k)]
    for e in range(1 << n):
        members[class_value(project(e, observed))].append(e)
    out_lo = np.empty(lo.shape[:-1] + (1 << k,))
    out_hi = np.empty_like(out_lo)
    for v, es in enumerate(members):
        al, ah = lo[..., es[0]], hi[..., es[0]]
        for e in es[1:]:
            al, ah = iv_add(al, ah, lo[..., e], hi[..., e], strict)
        out_lo[..., v], out_hi[..., v] = al, ah
    return out_lo, out_hi


def possible_classes(lo, hi, observed: tuple[int, ...], strict: bool = False) -> np.ndarray:
    """Boolean mask ``(..., n_classes)`` of classes not strictly dominated."""
    al, ah = aggregate_classes(lo, hi, observed, strict)
    dominated = (ah[..., :, None] < al[..., None, :]).any(axis=-1)
    return ~dominated


def classify_abstract(d: AbstractDistribution, observed: tuple[int, ...]) -> set[tuple[int, ...]]:
    mask = possible_classes(d.lo, d.hi, observed, d.strict)
    if mask.ndim != 1:
        raise TypeError("classify a single (unbatched) distribution")
    return {class_bits(v, len(observed)) for v in np.flatnonzero(mask)}


def is_generalized_permutation(m, tol: float = ZERO_TOL) -> bool:
    nz = np.abs(np.asarray(m)) > tol
    if nz.ndim != 2 or nz.shape[0] != nz.shape[1]:
        raise ValueError("expected a square matrix")
    return bool((nz.sum(axis=0) == 1).all() and (nz.sum(axis=1) == 1).all())


# ---------------------------------------------------------------------------
# gates on abstract states


def encode_abstract(s: AbstractState, g: GateOp, aenv: AbstractEnvironment, strict: bool = False) -> AbstractState:
    if not g.kind.is_encoding:
        raise ValueError(f"{g} is not an encoding gate")
    iv = aenv[g.angle_var]
    return apply_entries(s, encoding_entries(g.kind.axis, iv.lo, iv.hi, strict), g.qubit, strict)


def apply_parametric_abstract(s: AbstractState, g: GateOp, strict: bool = False) -> AbstractState:
    if g.kind.is_encoding:
        raise ValueError(f"{g} is an encoding gate")
    n = s.n_qubits
    if g.kind is Gate.CX:
        return apply_permutation(s, cx_permutation(g.control, g.qubit, n))
    if g.kind is Gate.X:
        return apply_permutation(s, np.arange(1 << n) ^ (1 << g.qubit))
    return apply_entries(s, _const_entries(gate_unitary(g), strict), g.qubit, strict)


def _check_symbolic_size(n: int):
    if n > MAX_SYMBOLIC_QUBITS:
        raise ValueError(f"symbolic mode materializes 2^n x 2^n matrices; refusing n={n} > {MAX_SYMBOLIC_QUBITS}")


def compose_parametric_run(gs: Sequence[GateOp], n: int) -> np.ndarray:
    """Product of the lifted matrices of ``gs`` (first gate applied first)."""
    if not gs:
        raise ValueError("empty gate run")
    _check_symbolic_size(n)
    m = np.eye(1 << n, dtype=complex)
    for g in gs:
        if g.kind.is_encoding:
            raise ValueError(f"encoding gate {g} inside a parametric run")
        m = lifted_matrix(g, None, n) @ m
    return m


def composition_error(gs: Sequence[GateOp], n: int) -> np.ndarray:
    """Entrywise bound on ``|computed product - exact product|``.

    Each lifted rotation row has two nonzero entries, each within 2u of
    the exact value; a product entry then picks up at most gamma_4 relative
    error on top of what it inherits. The final bound is doubled to cover
    the rounding of the bound itself.
    """
    dim = 1 << n
    p = np.eye(dim, dtype=complex)
    err = np.zeros((dim, dim))
    gamma4 = 4 * _U / (1 - 4 * _U)
    c = gamma4 + 2 * _U * (1 + gamma4)
    for g in gs:
        gm = lifted_matrix(g, None, n)
        ag = np.abs(gm)
        if g.kind in (Gate.CX, Gate.X):
            err = ag @ err
        else:
            err = ag @ err + c * (ag @ np.abs(p))
        p = gm @ p
    return 2 * err + _U * np.abs(p)


@lru_cache(maxsize=256)
def _plan(c: Circuit, mode: str, strict: bool):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    steps = []
    var = {k: i for i, k in enumerate(c.input_vars)}
    n = c.n_qubits
    run: list[GateOp] = []

    def flush():
        if not run:
            return
        if all(g.kind in (Gate.CX, Gate.X) for g in run):
            perm = np.arange(1 << n)
            for g in run:
                if g.kind is Gate.CX:
                    perm = perm[cx_permutation(g.control, g.qubit, n)]
                else:
                    perm = perm[np.arange(1 << n) ^ (1 << g.qubit)]
            steps.append(("perm", perm))
        else:
            m = compose_parametric_run(run, n)
            err = composition_error(run, n) if strict else None
            steps.append(("matrix", m, err))
        run.clear()

    for g in c.ops:
        if g.kind.is_encoding:
            flush()
            steps.append(("encode", g.kind.axis, g.qubit, var[g.angle_var]))
        elif mode == "symbolic":
            run.append(g)
        elif g.kind is Gate.CX:
            steps.append(("perm", cx_permutation(g.control, g.qubit, n)))
        elif g.kind is Gate.X:
            steps.append(("perm", np.arange(1 << n) ^ (1 << g.qubit)))
        else:
            steps.append(("entries", g.qubit, _const_entries(gate_unitary(g), strict)))
    flush()
    if mode == "symbolic":
        _check_symbolic_size(n)
    return tuple(steps)


def _run_steps(c: Circuit, lo, hi, mode, clipped, strict, trace=None) -> AbstractState:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    s = AbstractState.initial(c.n_qubits, lo.shape[:-1])
    for step in _plan(c, mode, strict):
        kind = step[0]
        if kind == "encode":
            _, axis, q, k = step
            s = apply_entries(s, encoding_entries(axis, lo[..., k], hi[..., k], strict), q, strict)
        elif kind == "perm":
            s = apply_permutation(s, step[1])
        elif kind == "entries":
            s = apply_entries(s, step[2], step[1], strict)
        else:
            s = apply_matrix_abstract(s, step[1], step[2], strict)
        if clipped:
            s = clip_state(s, strict)
        if trace is not None:
            trace.append(s)
    return s


def run_abstract_state(
    c: Circuit,
    aenv: AbstractEnvironment,
    mode: str = "symbolic",
    clipped: bool = True,
    strict: bool = True,
    trace: list | None = None,
) -> AbstractState:
    """Final abstract state; ``trace`` (if given) collects each step's state."""
    lo, hi = aenv.bounds(c.input_vars)
    return _run_steps(c, lo, hi, mode, clipped, strict, trace)


def run_abstract(
    c: Circuit,
    aenv: AbstractEnvironment,
    mode: str = "symbolic",
    clipped: bool = True,
    strict: bool = True,
) -> AbstractDistribution:
    s = run_abstract_state(c, aenv, mode, clipped, strict)
    return measure_abstract(s, clipped, strict)


def run_abstract_batch(c: Circuit, lo, hi, mode: str = "symbolic", clipped: bool = True, strict: bool = True) -> AbstractDistribution:
    """Abstract distributions for a stack of boxes ``lo, hi`` of shape ``(B, d)``."""
    s = _run_steps(c, lo, hi, mode, clipped, strict)
    return measure_abstract(s, clipped, strict)


# plain interval semantics: stepwise, unclipped, no outward rounding
REFERENCE_SETTINGS = {"mode": "stepwise", "clipped": False, "strict": False}
