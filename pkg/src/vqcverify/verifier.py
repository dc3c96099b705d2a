"""Robustness verification by abstract interpretation plus input splitting.

:func:`verify_robust` processes boxes level by level. A box is safe when
the abstract classifier can only return the center's class. For an unsafe
box the verifier first looks for a concrete counterexample at the center
and corners, and splits the widest input interval if it finds none.

:func:`max_epsilon` searches for the largest robust radius: it doubles
``eps`` until verification fails, then bisects.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .abstract import (
    MODES,
    AbstractEnvironment,
    aggregate_classes,
    ball_env,
    hull_distributions,
    possible_classes,
    run_abstract,
    run_abstract_batch,
)
from .circuit import Circuit, class_bits, class_label, class_value
from .concrete import run_batch, run_concrete

MAX_CORNERS = 1024


class Status(enum.Enum):
    ROBUST = "robust"
    FALSIFIED = "falsified"
    UNKNOWN = "unknown"

    @property
    def exit_code(self) -> int:
        return {Status.ROBUST: 0, Status.FALSIFIED: 1, Status.UNKNOWN: 2}[self]


@dataclass(frozen=True)
class RefinementConfig:
    max_depth: int = 20
    min_width: float = 1e-6
    mode: str = "symbolic"
    clipped: bool = True
    parallel: bool = False
    strict: bool = True
    # total number of boxes evaluated before giving up
    max_regions: int = 4096
    workers: int = 4
    # concrete points tried per box (center included) and per level
    max_corners: int = MAX_CORNERS
    search_budget: int = 8192

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if not self.min_width > 0:
            raise ValueError("min_width must be > 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.max_regions < 1:
            raise ValueError("max_regions must be >= 1")
        if self.max_corners < 1 or self.search_budget < 1:
            raise ValueError("max_corners and search_budget must be >= 1")


@dataclass(frozen=True)
class VerificationProblem:
    circuit: Circuit
    center: Mapping[str, float]
    eps: float
    observed: tuple[int, ...] | None = None
    config: RefinementConfig = field(default_factory=RefinementConfig)

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError("eps must be >= 0")
        missing = [v for v in self.circuit.input_vars if v not in self.center]
        if missing:
            raise ValueError(f"center does not bind {missing}")
        obs = self.circuit.observed if self.observed is None else tuple(self.observed)
        object.__setattr__(self, "observed", obs)
        object.__setattr__(self, "center", {k: float(v) for k, v in self.center.items()})


@dataclass
class Verdict:
    status: Status
    target_class: tuple[int, ...]
    witness: dict[str, float] | None = None
    regions_explored: int = 0
    max_depth_reached: int = 0
    # hull of each class's aggregated probability over the leaf boxes
    class_intervals: dict[str, tuple[float, float]] = field(default_factory=dict)
    undecided: int = 0
    runtime_ms: float = 0.0

    @property
    def robust(self) -> bool:
        return self.status is Status.ROBUST


def _corner_candidates(lo: np.ndarray, hi: np.ndarray, max_points: int, seed: int) -> np.ndarray:
    """Box center followed by up to ``max_points - 1`` corners.

    All corners are used when they fit; otherwise a seeded random subset.
    """
    d = lo.shape[-1]
    k = max_points - 1
    if d < 63 and (1 << d) <= k:
        bits = (np.arange(1 << d)[:, None] >> np.arange(d)) & 1
    else:
        bits = np.random.default_rng(seed).integers(0, 2, size=(k, d))
    corners = np.where(bits == 1, hi, lo)
    return np.vstack([(lo + hi) / 2, corners])


def find_counterexample(
    c: Circuit,
    box: AbstractEnvironment,
    target: tuple[int, ...],
    observed: tuple[int, ...] | None = None,
    max_corners: int = MAX_CORNERS,
    seed: int = 0,
) -> dict[str, float] | None:
    """Concretely evaluate the box center and corners; return a misclassified point."""
    lo, hi = box.bounds(c.input_vars)
    hit = _search_boxes(c, lo[None], hi[None], class_value(target), observed, max_corners, seed)
    if hit is None:
        return None
    return dict(zip(c.input_vars, map(float, hit[1])))


def _search_boxes(c, lo, hi, target_value, observed, max_points, seed, budget=None, chunk=1 << 14):
    """First (box, point) pair, in box order, whose concrete class differs.

    With ``budget`` the total number of points is limited by giving every
    box an equal share (at least its center).
    """
    obs = c.observed if observed is None else tuple(observed)
    circuit = c if obs == c.observed else c.with_observed(obs)
    n = lo.shape[0]
    per_box = max_points if budget is None else max(1, min(max_points, budget // max(n, 1)))
    pts, owner = [], []
    for b in range(n):
        p = _corner_candidates(lo[b], hi[b], per_box, seed + b)
        pts.append(p)
        owner.append(np.full(p.shape[0], b))
    pts = np.concatenate(pts)
    owner = np.concatenate(owner)
    for start in range(0, pts.shape[0], chunk):
        _, cls = run_batch(circuit, pts[start:start + chunk])
        bad = np.flatnonzero(cls != target_value)
        if bad.size:
            i = start + bad[0]
            return int(owner[i]), pts[i]
    return None


def _evaluate(c, lo, hi, cfg: RefinementConfig, observed):
    def run(a, b):
        d = run_abstract_batch(c, a, b, cfg.mode, cfg.clipped, cfg.strict)
        mask = possible_classes(d.lo, d.hi, observed, cfg.strict)
        agg = aggregate_classes(d.lo, d.hi, observed, cfg.strict)
        return mask, agg[0], agg[1]

    if not cfg.parallel or lo.shape[0] < 2:
        return run(lo, hi)
    chunks = np.array_split(np.arange(lo.shape[0]), min(cfg.workers, lo.shape[0]))
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        parts = list(pool.map(lambda ix: run(lo[ix], hi[ix]), chunks))
    return tuple(np.concatenate([p[k] for p in parts]) for k in range(3))


def verify_robust(p: VerificationProblem) -> Verdict:
    t0 = time.perf_counter()
    c, cfg, obs = p.circuit, p.config, p.observed
    circuit = c if obs == c.observed else c.with_observed(obs)
    _, target = run_concrete(circuit, p.center)
    tv = class_value(target)
    n_classes = 1 << len(obs)

    root = ball_env({k: p.center[k] for k in c.input_vars}, p.eps)
    lo, hi = root.bounds(c.input_vars)
    lo, hi = lo[None], hi[None]
    regions = depth_reached = undecided = 0
    agg_lo = np.full(n_classes, np.inf)
    agg_hi = np.full(n_classes, -np.inf)
    witness = None
    depth = 0

    def absorb(a_lo, a_hi):
        nonlocal agg_lo, agg_hi
        if a_lo.shape[0]:
            agg_lo = np.minimum(agg_lo, a_lo.min(axis=0))
            agg_hi = np.maximum(agg_hi, a_hi.max(axis=0))

    while lo.shape[0]:
        regions += lo.shape[0]
        depth_reached = depth
        mask, a_lo, a_hi = _evaluate(c, lo, hi, cfg, obs)
        others = np.delete(mask, tv, axis=1).any(axis=1)
        safe = mask[:, tv] & ~others
        absorb(a_lo[safe], a_hi[safe])
        open_ix = np.flatnonzero(~safe)
        if open_ix.size == 0:
            break
        hit = _search_boxes(circuit, lo[open_ix], hi[open_ix], tv, obs, cfg.max_corners, depth, cfg.search_budget)
        if hit is not None:
            witness = dict(zip(c.input_vars, map(float, hit[1])))
            absorb(a_lo[open_ix], a_hi[open_ix])
            break
        widths = hi[open_ix] - lo[open_ix]
        # argmax returns the first maximum, i.e. declaration order on ties
        var = np.argmax(widths, axis=1)
        wmax = widths[np.arange(open_ix.size), var]
        splittable = wmax > cfg.min_width
        budget_ok = depth < cfg.max_depth and regions + 2 * int(splittable.sum()) <= cfg.max_regions
        if not budget_ok:
            splittable[:] = False
        stuck = ~splittable
        undecided += int(stuck.sum())
        absorb(a_lo[open_ix[stuck]], a_hi[open_ix[stuck]])
        ix = open_ix[splittable]
        v = var[splittable]
        if ix.size == 0:
            break
        l, h = lo[ix], hi[ix]
        mid = l[np.arange(ix.size), v] + (h[np.arange(ix.size), v] - l[np.arange(ix.size), v]) / 2
        left_hi = h.copy()
        left_hi[np.arange(ix.size), v] = mid
        right_lo = l.copy()
        right_lo[np.arange(ix.size), v] = mid
        # children of one parent stay adjacent: canonical order
        lo = np.stack([l, right_lo], axis=1).reshape(-1, l.shape[1])
        hi = np.stack([left_hi, h], axis=1).reshape(-1, h.shape[1])
        depth += 1

    if witness is not None:
        status = Status.FALSIFIED
    elif undecided:
        status = Status.UNKNOWN
    else:
        status = Status.ROBUST
    k = len(obs)
    intervals = {
        class_label(class_bits(i, k)): (float(agg_lo[i]), float(agg_hi[i]))
        for i in range(n_classes)
        if np.isfinite(agg_lo[i])
    }
    return Verdict(
        status=status,
        target_class=target,
        witness=witness,
        regions_explored=regions,
        max_depth_reached=depth_reached,
        class_intervals=intervals,
        undecided=undecided,
        runtime_ms=(time.perf_counter() - t0) * 1000,
    )


def split_union(c: Circuit, box: AbstractEnvironment, var: str | None = None, cfg: RefinementConfig | None = None):
    """Split one variable at its midpoint and hull the two abstract results."""
    cfg = cfg or RefinementConfig()
    var = var or box.widest(c.input_vars)
    parts = box.split(var)
    ds = [run_abstract(c, b, cfg.mode, cfg.clipped, cfg.strict) for b in parts]
    return hull_distributions(ds), ds


@dataclass
class MaxEpsilonResult:
    epsilon: float
    # smallest radius seen to fail; None when eps_max itself verified
    upper: float | None
    verdict: Verdict | None
    evaluations: int
    diagnostic: str = ""
    runtime_ms: float = 0.0

    @property
    def lower(self) -> float:
        return self.epsilon


def max_epsilon(
    c: Circuit,
    center: Mapping[str, float],
    observed: tuple[int, ...] | None = None,
    eps_min: float = 1e-3,
    eps_max: float = np.pi,
    tau: float = 1e-3,
    cfg: RefinementConfig | None = None,
) -> MaxEpsilonResult:
    if not 0 < eps_min <= eps_max:
        raise ValueError("need 0 < eps_min <= eps_max")
    if not tau > 0:
        raise ValueError("tau must be > 0")
    cfg = cfg or RefinementConfig()
    t0 = time.perf_counter()
    count = 0

    def check(eps):
        nonlocal count
        count += 1
        return verify_robust(VerificationProblem(c, center, eps, observed, cfg))

    def done(eps, upper, verdict, diag=""):
        return MaxEpsilonResult(eps, upper, verdict, count, diag, (time.perf_counter() - t0) * 1000)

    v = check(eps_min)
    if not v.robust:
        return done(0.0, eps_min, v, f"not robust at eps_min={eps_min:g} ({v.status.value})")
    low, low_v, high = eps_min, v, None
    while high is None:
        if low >= eps_max:
            return done(low, None, low_v, "robust at eps_max")
        e = min(2 * low, eps_max)
        v = check(e)
        if v.robust:
            low, low_v = e, v
        else:
            high = e
    while high - low > tau:
        mid = low + (high - low) / 2
        v = check(mid)
        if v.robust:
            low, low_v = mid, v
        else:
            high = mid
    return done(low, high, low_v)


@dataclass
class SoundnessReport:
    samples: int
    violations: list[dict[str, float]]
    max_excess: float

    @property
    def ok(self) -> bool:
        return not self.violations


def soundness_probe(
    c: Circuit,
    box: AbstractEnvironment,
    samples: int = 200,
    mode: str = "symbolic",
    clipped: bool = True,
    strict: bool = True,
    tol: float = 0.0,
    seed: int = 0,
) -> SoundnessReport:
    """Sample concrete inputs in ``box`` and check they land inside the abstract result."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    d = run_abstract(c, box, mode, clipped, strict)
    lo, hi = box.bounds(c.input_vars)
    rng = np.random.default_rng(seed)
    pts = lo + (hi - lo) * rng.random((samples, lo.size))
    dist, _ = run_batch(c, pts)
    excess = np.maximum(d.lo - dist, dist - d.hi).max(axis=1)
    bad = np.flatnonzero(excess > tol)
    violations = [dict(zip(c.input_vars, map(float, pts[i]))) for i in bad]
    return SoundnessReport(samples, violations, float(max(excess.max(), 0.0)))


__all__ = [
    "Status",
    "RefinementConfig",
    "VerificationProblem",
    "Verdict",
    "verify_robust",
    "find_counterexample",
    "split_union",
    "max_epsilon",
    "MaxEpsilonResult",
    "soundness_probe",
    "SoundnessReport",
]
