"""Closed, bounded real and complex intervals.

Two layers live here. The scalar layer (:class:`RealInterval`,
:class:`ComplexInterval` and the ``ri_*`` / ``ci_*`` functions) is the
reference arithmetic used by the public API and the tests. The array layer
(``iv_*`` functions) performs the same operations elementwise over numpy
arrays of lower/upper bounds and is what the abstract circuit engine runs on.

Every operation takes a ``strict`` flag. When set, each computed bound is
pushed outward by one unit in the last place, so that rounding in IEEE
arithmetic can never shrink an enclosure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

HALF_PI = math.pi / 2


class IntervalError(ValueError):
    """Raised for malformed intervals or impossible interval operations."""


class UnsplittableInterval(IntervalError):
    pass


class _Empty:
    """The empty interval. Use the :data:`EMPTY` singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    is_empty = True

    def __repr__(self) -> str:
        return "EMPTY"

    def __reduce__(self):
        return (_Empty, ())


EMPTY = _Empty()


def _down(x: float, strict: bool) -> float:
    return math.nextafter(x, -math.inf) if strict else x


def _up(x: float, strict: bool) -> float:
    return math.nextafter(x, math.inf) if strict else x


@dataclass(frozen=True)
class RealInterval:
    """The closed interval ``[lo, hi]`` with finite bounds."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise IntervalError(f"interval bounds must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise IntervalError(f"lower bound {lo} exceeds upper bound {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    is_empty = False

    @classmethod
    def point(cls, x: float) -> RealInterval:
        return cls(x, x)

    @classmethod
    def hull_of(cls, values: Iterable[float]) -> RealInterval:
        vals = list(values)
        return cls(min(vals), max(vals))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return self.lo + (self.hi - self.lo) / 2

    def __contains__(self, x) -> bool:
        if isinstance(x, RealInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        if x is EMPTY:
            return True
        return self.lo <= x <= self.hi

    def __add__(self, other):
        return ri_add(self, other)

    def __mul__(self, other):
        return ri_mul(self, other)

    def __neg__(self) -> RealInterval:
        return RealInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return ri_add(self, -other) if other is not EMPTY else EMPTY

    def __and__(self, other):
        return ri_meet(self, other)

    def __or__(self, other):
        return ri_hull(self, other)

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


Interval = RealInterval | _Empty


def _as_interval(x) -> Interval:
    if x is EMPTY or isinstance(x, RealInterval):
        return x
    return RealInterval.point(x)


def ri_add(a: Interval, b: Interval, strict: bool = False) -> Interval:
    a, b = _as_interval(a), _as_interval(b)
    if a is EMPTY or b is EMPTY:
        return EMPTY
    return RealInterval(_down(a.lo + b.lo, strict), _up(a.hi + b.hi, strict))


def ri_mul(a: Interval, b: Interval, strict: bool = False) -> Interval:
    a, b = _as_interval(a), _as_interval(b)
    if a is EMPTY or b is EMPTY:
        return EMPTY
    p = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    return RealInterval(_down(min(p), strict), _up(max(p), strict))


def ri_sq(a: Interval, strict: bool = False) -> Interval:
    """Square of an interval, treating both factors as the same quantity."""
    a = _as_interval(a)
    if a is EMPTY:
        return EMPTY
    l2, h2 = a.lo * a.lo, a.hi * a.hi
    if a.lo <= 0.0 <= a.hi:
        return RealInterval(0.0, _up(max(l2, h2), strict))
    return RealInterval(max(0.0, _down(min(l2, h2), strict)), _up(max(l2, h2), strict))


def ri_meet(a: Interval, b: Interval) -> Interval:
    a, b = _as_interval(a), _as_interval(b)
    if a is EMPTY or b is EMPTY:
        return EMPTY
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        return EMPTY
    return RealInterval(lo, hi)


def ri_hull(a: Interval, b: Interval) -> Interval:
    a, b = _as_interval(a), _as_interval(b)
    if a is EMPTY:
        return b
    if b is EMPTY:
        return a
    return RealInterval(min(a.lo, b.lo), max(a.hi, b.hi))


def ri_strictly_below(a: RealInterval, b: RealInterval) -> bool:
    """The strict interval order: every point of ``a`` is below every point of ``b``."""
    return a.hi < b.lo


def ri_split(a: RealInterval) -> tuple[RealInterval, RealInterval]:
    if a is EMPTY or not a.hi > a.lo:
        raise UnsplittableInterval(f"cannot split degenerate interval {a!r}")
    m = a.mid
    return RealInterval(a.lo, m), RealInterval(m, a.hi)


def _has_point(lo: float, hi: float, offset: float, period: float, slack: float) -> bool:
    # is there an integer k with lo <= offset + k*period <= hi (widened by slack)?
    k = math.ceil((lo - slack - offset) / period)
    return offset + k * period <= hi + slack


def _trig_slack(lo: float, hi: float, strict: bool) -> float:
    if not strict:
        return 0.0
    return 8 * math.ulp(max(abs(lo), abs(hi), 1.0))


def itv_trig(a: RealInterval, strict: bool = False) -> tuple[RealInterval, RealInterval]:
    """Exact ranges of sine and cosine over ``a``.

    The extrema of sin/cos over a closed interval are attained either at an
    endpoint or at a multiple of pi/2 inside it, so enumerating those points
    gives the tightest enclosure.
    """
    if a is EMPTY:
        return EMPTY, EMPTY
    lo, hi = a.lo, a.hi
    slack = _trig_slack(lo, hi, strict)
    s_end = (math.sin(lo), math.sin(hi))
    c_end = (math.cos(lo), math.cos(hi))
    two_pi = 2 * math.pi
    s_hi = 1.0 if _has_point(lo, hi, HALF_PI, two_pi, slack) else _up(max(s_end), strict)
    s_lo = -1.0 if _has_point(lo, hi, -HALF_PI, two_pi, slack) else _down(min(s_end), strict)
    c_hi = 1.0 if _has_point(lo, hi, 0.0, two_pi, slack) else _up(max(c_end), strict)
    c_lo = -1.0 if _has_point(lo, hi, math.pi, two_pi, slack) else _down(min(c_end), strict)
    clamp = lambda v: min(1.0, max(-1.0, v))  # noqa: E731
    return (
        RealInterval(clamp(s_lo), clamp(s_hi)),
        RealInterval(clamp(c_lo), clamp(c_hi)),
    )


@dataclass(frozen=True)
class ComplexInterval:
    """A box in the complex plane: real part in ``re``, imaginary part in ``im``."""

    re: Interval
    im: Interval

    def __post_init__(self):
        object.__setattr__(self, "re", _as_interval(self.re))
        object.__setattr__(self, "im", _as_interval(self.im))

    @classmethod
    def point(cls, z: complex) -> ComplexInterval:
        z = complex(z)
        return cls(RealInterval.point(z.real), RealInterval.point(z.imag))

    @property
    def is_empty(self) -> bool:
        return self.re is EMPTY or self.im is EMPTY

    def __contains__(self, z) -> bool:
        if self.is_empty:
            return False
        if isinstance(z, ComplexInterval):
            return z.re in self.re and z.im in self.im
        z = complex(z)
        return z.real in self.re and z.imag in self.im

    def __add__(self, other):
        return ci_add(self, other)

    def __mul__(self, other):
        return ci_mul(self, other)

    def __repr__(self) -> str:
        return f"<{self.re!r}, {self.im!r}>"


def ci_add(a: ComplexInterval, b: ComplexInterval, strict: bool = False) -> ComplexInterval:
    return ComplexInterval(ri_add(a.re, b.re, strict), ri_add(a.im, b.im, strict))


def ci_mul(a: ComplexInterval, b: ComplexInterval, strict: bool = False) -> ComplexInterval:
    if a.is_empty or b.is_empty:
        return ComplexInterval(EMPTY, EMPTY)
    rr = ri_mul(a.re, b.re, strict)
    ii = ri_mul(a.im, b.im, strict)
    ri = ri_mul(a.re, b.im, strict)
    ir = ri_mul(a.im, b.re, strict)
    return ComplexInterval(ri_add(rr, -ii, strict), ri_add(ri, ir, strict))


def ci_sqmod(a: ComplexInterval, strict: bool = False) -> Interval:
    """Range of ``|z|^2`` over the box."""
    if a.is_empty:
        return EMPTY
    return ri_add(ri_sq(a.re, strict), ri_sq(a.im, strict), strict)


# ---------------------------------------------------------------------------
# Array layer. Bounds are float64 arrays; shapes broadcast like numpy.


def iv_down(x, strict: bool):
    return np.nextafter(x, -np.inf) if strict else x


def iv_up(x, strict: bool):
    return np.nextafter(x, np.inf) if strict else x


def iv_add(al, ah, bl, bh, strict: bool = False):
    return iv_down(al + bl, strict), iv_up(ah + bh, strict)


def iv_neg(al, ah):
    return -ah, -al


def iv_mul(al, ah, bl, bh, strict: bool = False):
    p1, p2, p3, p4 = al * bl, al * bh, ah * bl, ah * bh
    lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
    hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
    return iv_down(lo, strict), iv_up(hi, strict)


def iv_sq(al, ah, strict: bool = False):
    l2, h2 = al * al, ah * ah
    top = iv_up(np.maximum(l2, h2), strict)
    bottom = np.where((al <= 0.0) & (ah >= 0.0), 0.0, np.maximum(0.0, iv_down(np.minimum(l2, h2), strict)))
    return bottom, top


def iv_meet(al, ah, bl, bh):
    """Intersection; callers must check ``lo > hi`` for emptiness."""
    return np.maximum(al, bl), np.minimum(ah, bh)


def _iv_has_point(lo, hi, offset, period, slack):
    k = np.ceil((lo - slack - offset) / period)
    return offset + k * period <= hi + slack


def iv_trig(lo, hi, strict: bool = False):
    """Elementwise :func:`itv_trig`: returns ``(sin_lo, sin_hi, cos_lo, cos_hi)``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if strict:
        slack = 8 * np.spacing(np.maximum(np.maximum(np.abs(lo), np.abs(hi)), 1.0))
    else:
        slack = 0.0
    two_pi = 2 * np.pi
    sl, sh = np.sin(lo), np.sin(hi)
    cl, ch = np.cos(lo), np.cos(hi)
    s_hi = np.where(_iv_has_point(lo, hi, HALF_PI, two_pi, slack), 1.0, iv_up(np.maximum(sl, sh), strict))
    s_lo = np.where(_iv_has_point(lo, hi, -HALF_PI, two_pi, slack), -1.0, iv_down(np.minimum(sl, sh), strict))
    c_hi = np.where(_iv_has_point(lo, hi, 0.0, two_pi, slack), 1.0, iv_up(np.maximum(cl, ch), strict))
    c_lo = np.where(_iv_has_point(lo, hi, np.pi, two_pi, slack), -1.0, iv_down(np.minimum(cl, ch), strict))
    clip = lambda v: np.clip(v, -1.0, 1.0)  # noqa: E731
    return clip(s_lo), clip(s_hi), clip(c_lo), clip(c_hi)


def civ_add(a, b, strict: bool = False):
    """Complex interval sum on 4-tuples ``(re_lo, re_hi, im_lo, im_hi)``."""
    rl, rh = iv_add(a[0], a[1], b[0], b[1], strict)
    il, ih = iv_add(a[2], a[3], b[2], b[3], strict)
    return rl, rh, il, ih


def civ_mul(a, b, strict: bool = False):
    """Complex interval product on 4-tuples ``(re_lo, re_hi, im_lo, im_hi)``."""
    rr = iv_mul(a[0], a[1], b[0], b[1], strict)
    ii = iv_mul(a[2], a[3], b[2], b[3], strict)
    ri = iv_mul(a[0], a[1], b[2], b[3], strict)
    ir = iv_mul(a[2], a[3], b[0], b[1], strict)
    rl, rh = iv_add(rr[0], rr[1], -ii[1], -ii[0], strict)
    il, ih = iv_add(ri[0], ri[1], ir[0], ir[1], strict)
    return rl, rh, il, ih


def civ_sqmod(rl, rh, il, ih, strict: bool = False):
    a = iv_sq(rl, rh, strict)
    b = iv_sq(il, ih, strict)
    lo, hi = iv_add(a[0], a[1], b[0], b[1], strict)
    return np.maximum(lo, 0.0), hi
