"""Extended interval arithmetic with outward rounding.

Endpoints are IEEE doubles and may be infinite. Rounding is realised
portably: every elementary double operation is computed in the default
round-to-nearest mode and the result is then moved one representable float
outward with :func:`numpy.nextafter` (two floats for ``exp``, which the
platform library only guarantees to within about one ulp). The slack is at
most a couple of ulps per operation, which is harmless for branch-and-bound
bounds and keeps the code independent of the FPU rounding mode.

The module has two layers:

* array kernels (``add``, ``sub``, ``mul``, ``div``, ``exp``, ``sq`` ...) that
  take and return ``(lo, hi)`` pairs of broadcastable arrays; the certifier
  evaluates thousands of boxes at once through these;
* :class:`Interval` and :class:`IntervalBox`, small value types wrapping the
  kernels for scalar use and for the public box API.

An empty interval is represented by ``lo = +inf, hi = -inf``; every kernel
maps an empty operand to an empty result. Division by an interval that
contains zero returns the extended (semi-infinite or whole-line) result
rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

INF = math.inf

# ---------------------------------------------------------------------------
# array kernels
# ---------------------------------------------------------------------------


def down(x):
    """Next float towards -inf (one ulp outward for a lower endpoint)."""
    return np.nextafter(x, -INF)


def up(x):
    """Next float towards +inf (one ulp outward for an upper endpoint)."""
    return np.nextafter(x, INF)


def is_empty(lo, hi):
    return lo > hi


def _empty_like(lo, hi, empty):
    """Overwrite empty slots with the canonical (+inf, -inf) pair."""
    if not np.any(empty):
        return lo, hi
    return np.where(empty, INF, lo), np.where(empty, -INF, hi)


def add(alo, ahi, blo, bhi):
    with np.errstate(invalid="ignore", over="ignore"):
        lo, hi = down(alo + blo), up(ahi + bhi)
    return _empty_like(lo, hi, (alo > ahi) | (blo > bhi))


def sub(alo, ahi, blo, bhi):
    with np.errstate(invalid="ignore", over="ignore"):
        lo, hi = down(alo - bhi), up(ahi - blo)
    return _empty_like(lo, hi, (alo > ahi) | (blo > bhi))


def _prod(x, y):
    # 0 * inf is taken as 0: the endpoints are limits of real products, and
    # any real times exactly zero is zero.
    with np.errstate(invalid="ignore", over="ignore"):
        p = x * y
    return np.where(np.isnan(p), 0.0, p)


def mul(alo, ahi, blo, bhi):
    p1, p2, p3, p4 = _prod(alo, blo), _prod(alo, bhi), _prod(ahi, blo), _prod(ahi, bhi)
    lo = down(np.minimum(np.minimum(p1, p2), np.minimum(p3, p4)))
    hi = up(np.maximum(np.maximum(p1, p2), np.maximum(p3, p4)))
    return _empty_like(lo, hi, (alo > ahi) | (blo > bhi))


def recip(blo, bhi):
    """Extended reciprocal ``{1/y : y in b, y != 0}``.

    ``[0, 0]`` has no reciprocal and maps to the empty interval; an interval
    with zero strictly inside maps to the whole line (the hull of the two
    semi-infinite pieces).
    """
    blo = np.asarray(blo, dtype=float)
    bhi = np.asarray(bhi, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        rlo = down(1.0 / bhi)
        rhi = up(1.0 / blo)
    # 1/(+inf) = 0 is an infimum that is not attained; keeping it is sound.
    rlo = np.where(bhi == 0, -INF, rlo)   # b = [lo, 0] -> [-inf, 1/lo]
    rhi = np.where(blo == 0, INF, rhi)    # b = [0, hi] -> [1/hi, +inf]
    straddle = (blo < 0) & (bhi > 0)
    rlo = np.where(straddle, -INF, rlo)
    rhi = np.where(straddle, INF, rhi)
    empty = (blo > bhi) | ((blo == 0) & (bhi == 0))
    return _empty_like(rlo, rhi, empty)


def div(alo, ahi, blo, bhi):
    """``a / b`` as ``a * recip(b)``; the extra rounding only widens the result."""
    rlo, rhi = recip(blo, bhi)
    return mul(alo, ahi, rlo, rhi)


def exp(alo, ahi):
    with np.errstate(over="ignore"):
        lo = down(down(np.exp(alo)))
        hi = up(up(np.exp(ahi)))
    lo = np.maximum(lo, 0.0)  # exp is positive; clamping is exact and sound
    return _empty_like(lo, hi, alo > ahi)


def sq(alo, ahi):
    """Exact image of ``x**2``, outward rounded; never negative."""
    with np.errstate(over="ignore"):
        l2, h2 = alo * alo, ahi * ahi
    lo = np.where(alo >= 0, l2, np.where(ahi <= 0, h2, 0.0))
    hi = np.maximum(l2, h2)
    lo = np.maximum(down(lo), 0.0)
    return _empty_like(lo, up(hi), alo > ahi)


def neg(alo, ahi):
    return -ahi, -alo


def hull_points(x):
    """Tightest interval around the double ``x`` (a point interval)."""
    x = np.asarray(x, dtype=float)
    return x, x.copy()


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` of the extended reals.

    A non-empty interval must contain at least one real, so ``[+inf, +inf]``
    and ``[-inf, -inf]`` are rejected. Use :meth:`empty` for the empty set.
    """

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if not (lo == INF and hi == -INF):
            if lo > hi:
                raise ValueError(f"lo > hi in [{lo!r}, {hi!r}]")
            if lo == INF or hi == -INF:
                raise ValueError("a non-empty interval must contain a real number")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def empty(cls) -> "Interval":
        return cls(INF, -INF)

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def entire(cls) -> "Interval":
        return cls(-INF, INF)

    @classmethod
    def _from_arrays(cls, lo, hi) -> "Interval":
        return cls(float(lo), float(hi))

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def width(self) -> float:
        if self.is_empty:
            return 0.0
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        if self.is_empty:
            raise ValueError("empty interval has no midpoint")
        if math.isinf(self.lo) or math.isinf(self.hi):
            raise ValueError("unbounded interval has no midpoint")
        return 0.5 * self.lo + 0.5 * self.hi

    def contains(self, x) -> bool:
        return bool(self.lo <= x <= self.hi)

    def subset_of(self, other: "Interval") -> bool:
        if self.is_empty:
            return True
        return other.lo <= self.lo and self.hi <= other.hi

    def _coerce(self, other) -> "Interval":
        return other if isinstance(other, Interval) else Interval.point(other)

    def __add__(self, other):
        o = self._coerce(other)
        return Interval._from_arrays(*add(self.lo, self.hi, o.lo, o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Interval._from_arrays(*sub(self.lo, self.hi, o.lo, o.hi))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return Interval._from_arrays(*mul(self.lo, self.hi, o.lo, o.hi))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return Interval._from_arrays(*div(self.lo, self.hi, o.lo, o.hi))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __neg__(self):
        if self.is_empty:
            return self
        return Interval(-self.hi, -self.lo)

    def __repr__(self) -> str:
        if self.is_empty:
            return "Interval.empty()"
        return f"Interval({self.lo!r}, {self.hi!r})"


_OPS = {
    "+": add, "add": add,
    "-": sub, "sub": sub,
    "*": mul, "×": mul, "mul": mul,
    "/": div, "÷": div, "div": div,
}


def iv_arith(a: Interval, b: Interval, op: str) -> Interval:
    """Outward-rounded ``a op b`` for ``op`` in ``+ - * /``."""
    try:
        kernel = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown interval operation {op!r}") from None
    return Interval._from_arrays(*kernel(a.lo, a.hi, b.lo, b.hi))


def iv_exp(a: Interval) -> Interval:
    return Interval._from_arrays(*exp(a.lo, a.hi))


def iv_sq(a: Interval) -> Interval:
    return Interval._from_arrays(*sq(a.lo, a.hi))


class IntervalBox:
    """Axis-aligned box: one non-empty interval per parameter.

    Stored as two read-only float arrays ``lo`` and ``hi``.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            comps = list(lo)
            lo = [c.lo for c in comps]
            hi = [c.hi for c in comps]
        lo = np.array(lo, dtype=float)
        hi = np.array(hi, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size == 0:
            raise ValueError("box endpoints must be non-empty 1-D arrays of equal length")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("box endpoints must not be NaN")
        if np.any(lo > hi):
            raise ValueError("every box component must be non-empty")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self.lo = lo
        self.hi = hi

    @classmethod
    def from_bounds(cls, bounds) -> "IntervalBox":
        return cls(bounds.lower, bounds.upper)

    @classmethod
    def point(cls, theta) -> "IntervalBox":
        return cls(theta, theta)

    def __len__(self) -> int:
        return self.lo.size

    def __getitem__(self, k) -> Interval:
        return Interval(self.lo[k], self.hi[k])

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntervalBox)
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    def __repr__(self) -> str:
        comps = ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b in zip(self.lo, self.hi))
        return f"IntervalBox({comps})"

    @property
    def widths(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * self.lo + 0.5 * self.hi

    def contains(self, theta) -> bool:
        theta = np.asarray(theta, dtype=float)
        return bool(np.all((self.lo <= theta) & (theta <= self.hi)))


def box_width(b: IntervalBox) -> float:
    """Largest component diameter; ``inf`` if any component is unbounded."""
    return float(np.max(b.hi - b.lo))


def split_index(widths: np.ndarray, scale: np.ndarray | None = None) -> int:
    """Component to bisect: largest ``widths / scale``, lowest index on ties.

    Components with zero scale are never chosen unless every scaled width is
    zero.
    """
    w = np.asarray(widths, dtype=float)
    if scale is not None:
        scale = np.asarray(scale, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(scale > 0, w / scale, 0.0)
    return int(np.argmax(w))  # argmax returns the first maximum


def box_bisect(b: IntervalBox, scale: Sequence[float] | None = None) -> tuple[IntervalBox, IntervalBox]:
    """Split the widest component of ``b`` at its midpoint.

    By default "widest" is the absolute diameter. Passing ``scale`` (for
    example the widths of the original search box) selects the component
    with the largest width relative to it instead. Ties go to the lowest
    index. The two halves share only the split plane.

    Raises
    ------
    ValueError
        If ``b`` is a point box, or the chosen component cannot be split in
        double precision (its midpoint equals an endpoint).
    """
    widths = b.widths
    if not np.any(widths > 0):
        raise ValueError("cannot bisect a degenerate (point) box")
    k = split_index(widths, scale)
    if widths[k] == 0:
        k = int(np.argmax(widths))
    lo_k, hi_k = b.lo[k], b.hi[k]
    if math.isinf(lo_k) or math.isinf(hi_k):
        raise ValueError("cannot bisect an unbounded component")
    m = 0.5 * lo_k + 0.5 * hi_k
    if not lo_k < m < hi_k:
        raise ValueError(f"component {k} is too narrow to split in double precision")
    left_hi = b.hi.copy()
    left_hi[k] = m
    right_lo = b.lo.copy()
    right_lo[k] = m
    return IntervalBox(b.lo, left_hi), IntervalBox(right_lo, b.hi)


def hull(boxes: Iterable[IntervalBox]) -> IntervalBox:
    boxes = list(boxes)
    if not boxes:
        raise ValueError("hull of no boxes")
    lo = np.min([bx.lo for bx in boxes], axis=0)
    hi = np.max([bx.hi for bx in boxes], axis=0)
    return IntervalBox(lo, hi)
