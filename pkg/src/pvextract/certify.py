"""Interval branch-and-bound enclosure of the global minimum SSE.

Best-first search over parameter boxes. Each box carries an interval
enclosure of the SSE over the box (its natural interval extension, see
:func:`bound_objective`); the box with the smallest lower bound is expanded
next. Midpoints of processed boxes give feasible points, the best of which
is the incumbent ``f_upper``. Boxes whose lower bound reaches the incumbent
cannot contain a better point and are discarded. A box is accepted into the
solution list once it is narrower than ``eps_x`` and its objective
enclosure is narrower than ``eps_f`` (or ``eps_rel * f_upper``); otherwise it
is bisected.

At exit the global minimum is enclosed in ``[f_lower, f_upper]``, where
``f_lower`` is the smallest lower bound over all boxes that could still hold
a minimiser: the solution list and, if the search stopped early, everything
left in the queue. The enclosure is therefore rigorous whatever the reason
for stopping; it is merely loose after a timeout or box cap.

For throughput, ``batch_size`` boxes are taken from the queue at once and
evaluated together with numpy. Pruning in a batch uses the incumbent from
before the batch, which is never smaller than the true current incumbent, so
nothing is lost; ``batch_size=1`` is the plain sequential algorithm. Runs are
deterministic for any batch size when stopped by ``max_boxes``.
"""

from __future__ import annotations

import heapq
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import interval as ia
from .data import IVDataset
from .interval import Interval, IntervalBox
from .model import K_BOLTZMANN, MICRO, Q_ELECTRON
from .objective import ModelKind, ParamBounds, residuals, rmse_from_sse, sse, sse_batch

_INF = math.inf


class UncertifiedWarning(UserWarning):
    """The enclosure is valid but the search did not run to completion."""


@dataclass(frozen=True)
class BnbConfig:
    """Branch-and-bound settings.

    Parameters
    ----------
    eps_f, eps_rel
        Absolute and relative objective precision (SSE scale). A box is
        accepted when its SSE enclosure is narrower than ``eps_f`` or than
        ``eps_rel * f_upper``.
    eps_x
        Box width precision (largest component diameter).
    timeout
        Wall-clock budget in seconds. Runs stopped by a timeout are not
        reproducible; use ``max_boxes`` when determinism matters.
    max_boxes
        Cap on the number of boxes processed (evaluated and split or accepted).
    batch_size
        Boxes taken from the queue per step; 1 gives the textbook sequential
        loop.
    bisect
        ``"relative"`` splits the component that is widest relative to the
        initial search box, ``"absolute"`` the widest in absolute terms.
    gradient_contractor
        Also discard boxes strictly inside the search range on which some
        partial derivative of the SSE provably has constant sign.
    local_descent
        Refine each new incumbent with a bounded least-squares descent.
    """

    eps_f: float = 1e-13
    eps_rel: float = 1e-9
    eps_x: float = 1e-8
    timeout: float = 3600.0
    max_boxes: int = 1_000_000
    batch_size: int = 256
    bisect: str = "relative"
    gradient_contractor: bool = False
    local_descent: bool = False

    def __post_init__(self):
        if not self.eps_f > 0:
            raise ValueError(f"eps_f must be > 0, got {self.eps_f!r}")
        if not self.eps_rel >= 0:
            raise ValueError(f"eps_rel must be >= 0, got {self.eps_rel!r}")
        if not self.eps_x > 0:
            raise ValueError(f"eps_x must be > 0, got {self.eps_x!r}")
        if not self.timeout > 0:
            raise ValueError(f"timeout must be > 0, got {self.timeout!r}")
        if int(self.max_boxes) != self.max_boxes or self.max_boxes < 1:
            raise ValueError(f"max_boxes must be an integer >= 1, got {self.max_boxes!r}")
        if int(self.batch_size) != self.batch_size or self.batch_size < 1:
            raise ValueError(f"batch_size must be an integer >= 1, got {self.batch_size!r}")
        if self.bisect not in ("relative", "absolute"):
            raise ValueError(f"bisect must be 'relative' or 'absolute', got {self.bisect!r}")


@dataclass
class BnbResult:
    model: ModelKind
    f_lower: float
    f_upper: float
    rmse_lower: float
    rmse_upper: float
    incumbent: np.ndarray
    solution_boxes: list = field(repr=False)
    boxes_processed: int
    elapsed: float
    terminated_by: str  # "exhausted" | "timeout" | "box_cap"
    n_points: int = 0

    @property
    def certified(self) -> bool:
        return self.terminated_by == "exhausted"

    @property
    def gap(self) -> float:
        return self.f_upper - self.f_lower

    @property
    def rmse_gap(self) -> float:
        return self.rmse_upper - self.rmse_lower

    def same_as(self, other: "BnbResult") -> bool:
        """Equality of everything except the elapsed time."""
        return (
            self.model is other.model
            and self.f_lower == other.f_lower
            and self.f_upper == other.f_upper
            and np.array_equal(self.incumbent, other.incumbent)
            and self.boxes_processed == other.boxes_processed
            and self.terminated_by == other.terminated_by
            and len(self.solution_boxes) == len(other.solution_boxes)
            and all(a == b for a, b in zip(self.solution_boxes, other.solution_boxes))
        )


# ---------------------------------------------------------------------------
# interval objective
# ---------------------------------------------------------------------------
# The enclosures follow the floating-point evaluation order of
# ``model.sdm_rhs`` / ``model.ddm_rhs`` operation by operation, with the
# physical constants taken as the exact values of their double literals.
# Each interval endpoint is then the outward-rounded image of the same float
# expression, so the enclosure contains both the exact real SSE and the
# rounded value that :func:`objective.sse` returns.


def _mul_nonneg(alo, ahi, blo, bhi):
    """``a * b`` for ``a >= 0`` and any ``b`` (0 * inf taken as 0)."""
    with np.errstate(invalid="ignore", over="ignore"):
        lo = np.where(blo >= 0, alo * blo, ahi * blo)
        hi = np.where(bhi >= 0, ahi * bhi, alo * bhi)
    lo = np.where(np.isnan(lo), 0.0, lo)
    hi = np.where(np.isnan(hi), 0.0, hi)
    return ia.down(lo), ia.up(hi)


def _scale_pos(alo, ahi, c):
    """``a * c`` for a positive double ``c``."""
    with np.errstate(over="ignore"):
        return ia.down(alo * c), ia.up(ahi * c)


def _div_pos(alo, ahi, dlo, dhi):
    """``a / d`` for ``d`` with a strictly positive lower endpoint."""
    with np.errstate(over="ignore"):
        lo = np.where(alo >= 0, alo / dhi, alo / dlo)
        hi = np.where(ahi >= 0, ahi / dlo, ahi / dhi)
    return ia.down(lo), ia.up(hi)


def _point_times(x, blo, bhi):
    """Point ``x`` (broadcast) times interval ``b``."""
    with np.errstate(over="ignore"):
        lo = np.where(x >= 0, x * blo, x * bhi)
        hi = np.where(x >= 0, x * bhi, x * blo)
    return ia.down(lo), ia.up(hi)


def _x_over_rp(xlo, xhi, rplo, rphi):
    # reciprocal of rp >= 0, then a product with a positive interval
    with np.errstate(divide="ignore"):
        rlo = ia.down(1.0 / rphi)
        rhi = np.where(rplo == 0, _INF, ia.up(1.0 / rplo))
    with np.errstate(invalid="ignore", over="ignore"):
        lo = np.where(xlo >= 0, xlo * rlo, xlo * rhi)
        hi = np.where(xhi >= 0, xhi * rhi, xhi * rlo)
    lo = np.where(np.isnan(lo), 0.0, lo)
    hi = np.where(np.isnan(hi), 0.0, hi)
    return ia.down(lo), ia.up(hi)


def _diode(xlo, xhi, i0lo, i0hi, nlo, nhi, temperature):
    """Enclosure of ``(i0*MICRO) * (exp((Q*x) / ((n*K)*T)) - 1)``."""
    qxlo, qxhi = _scale_pos(xlo, xhi, Q_ELECTRON)
    nklo, nkhi = _scale_pos(nlo, nhi, K_BOLTZMANN)
    dlo, dhi = _scale_pos(nklo, nkhi, temperature)
    alo, ahi = _div_pos(qxlo, qxhi, dlo, dhi)
    elo, ehi = ia.exp(alo, ahi)
    em1lo, em1hi = ia.down(elo - 1.0), ia.up(ehi - 1.0)
    slo, shi = _scale_pos(i0lo, i0hi, MICRO)
    return _mul_nonneg(slo, shi, em1lo, em1hi)


def _check_box_arrays(lo, hi, model):
    lo = np.atleast_2d(np.asarray(lo, dtype=float))
    hi = np.atleast_2d(np.asarray(hi, dtype=float))
    if lo.shape != hi.shape or lo.shape[-1] != model.dimension:
        raise ValueError(f"{model.name} boxes need {model.dimension} components")
    return lo, hi


def residual_enclosure(lo, hi, model, d: IVDataset):
    """Per-point residual enclosures for a batch of boxes.

    ``lo`` and ``hi`` have shape ``(K, dim)``; the result is a pair of
    ``(K, N)`` arrays.
    """
    model = ModelKind.parse(model)
    lo, hi = _check_box_arrays(lo, hi, model)
    col = lambda a, j: a[:, j, None]  # noqa: E731
    v, i, t = d.voltage, d.current, d.temperature
    rs_j, rp_j = (3, 4) if model is ModelKind.SDM else (5, 6)

    irslo, irshi = _point_times(i, col(lo, rs_j), col(hi, rs_j))
    xlo, xhi = ia.down(v + irslo), ia.up(v + irshi)
    with np.errstate(invalid="ignore", over="ignore"):
        if model is ModelKind.SDM:
            dlo, dhi = _diode(xlo, xhi, col(lo, 1), col(hi, 1), col(lo, 2), col(hi, 2), t)
            plo, phi = ia.sub(col(lo, 0), col(hi, 0), dlo, dhi)
        else:
            d1lo, d1hi = _diode(xlo, xhi, col(lo, 1), col(hi, 1), col(lo, 3), col(hi, 3), t)
            d2lo, d2hi = _diode(xlo, xhi, col(lo, 2), col(hi, 2), col(lo, 4), col(hi, 4), t)
            plo, phi = ia.sub(col(lo, 0), col(hi, 0), d1lo, d1hi)
            plo, phi = ia.sub(plo, phi, d2lo, d2hi)
        glo, ghi = _x_over_rp(xlo, xhi, col(lo, rp_j), col(hi, rp_j))
        plo, phi = ia.sub(plo, phi, glo, ghi)
        return ia.down(plo - i), ia.up(phi - i)


def bound_objective_batch(lo, hi, model, d: IVDataset):
    """SSE enclosures ``(flo, fhi)`` for a batch of boxes, shape ``(K,)`` each."""
    rlo, rhi = residual_enclosure(lo, hi, model, d)
    slo, shi = ia.sq(rlo, rhi)
    # left-to-right accumulation, as in the point objective
    flo, fhi = slo[:, 0].copy(), shi[:, 0].copy()
    with np.errstate(invalid="ignore", over="ignore"):
        for k in range(1, slo.shape[1]):
            flo = ia.down(flo + slo[:, k])
            fhi = ia.up(fhi + shi[:, k])
    flo = np.maximum(flo, 0.0)  # a sum of squares is non-negative
    fhi = np.where(np.isnan(fhi), _INF, fhi)
    return flo, fhi


def bound_objective(b: IntervalBox, model, d: IVDataset) -> Interval:
    """Interval enclosing ``{sse(theta) : theta in b}``."""
    flo, fhi = bound_objective_batch(b.lo[None, :], b.hi[None, :], model, d)
    return Interval(float(flo[0]), float(fhi[0]))


# ---------------------------------------------------------------------------
# optional monotonicity test
# ---------------------------------------------------------------------------


def _pt(x):
    return ia.hull_points(x)


def gradient_enclosure(lo, hi, model, d: IVDataset):
    """Enclosures of the SSE partial derivatives over a batch of boxes.

    Returns ``(glo, ghi)`` of shape ``(K, dim)``. Uses generic interval
    kernels; it is only needed when the gradient contractor is switched on.
    """
    model = ModelKind.parse(model)
    lo, hi = _check_box_arrays(lo, hi, model)
    box = [(lo[:, j, None], hi[:, j, None]) for j in range(model.dimension)]
    v, i, t = d.voltage, d.current, d.temperature
    rlo, rhi = residual_enclosure(lo, hi, model, d)
    c = ia.div(*_pt(Q_ELECTRON), *ia.mul(*_pt(K_BOLTZMANN), *_pt(t)))
    mu = _pt(MICRO)
    ipt = _pt(i)

    if model is ModelKind.SDM:
        diodes = [(box[1], box[2])]
        rs, rp = box[3], box[4]
    else:
        diodes = [(box[1], box[3]), (box[2], box[4])]
        rs, rp = box[5], box[6]
    x = ia.add(*_pt(v), *ia.mul(*ipt, *rs))

    d_i0, d_n = [], []
    d_rs = ia.neg(*ia.div(*ipt, *rp))
    for i0, n in diodes:
        targ = ia.div(*ia.mul(*c, *x), *n)
        e = ia.exp(*targ)
        d_i0.append(ia.neg(*ia.mul(*mu, *ia.sub(*e, *_pt(1.0)))))
        i0mu_e = ia.mul(*ia.mul(*i0, *mu), *e)
        d_n.append(ia.div(*ia.mul(*i0mu_e, *targ), *n))
        d_rs = ia.sub(*d_rs, *ia.div(*ia.mul(*i0mu_e, *ia.mul(*c, *ipt)), *n))
    d_rp = ia.div(*x, *ia.sq(*rp))
    ones = (np.ones_like(rlo), np.ones_like(rlo))
    if model is ModelKind.SDM:
        partials = [ones, d_i0[0], d_n[0], d_rs, d_rp]
    else:
        partials = [ones, d_i0[0], d_i0[1], d_n[0], d_n[1], d_rs, d_rp]

    two_r = ia.mul(*_pt(2.0), rlo, rhi)
    glo = np.empty(lo.shape)
    ghi = np.empty(lo.shape)
    for j, (plo, phi) in enumerate(partials):
        tlo, thi = ia.mul(*two_r, np.broadcast_to(plo, rlo.shape), np.broadcast_to(phi, rlo.shape))
        slo, shi = tlo[:, 0].copy(), thi[:, 0].copy()
        for k in range(1, tlo.shape[1]):
            slo, shi = ia.add(slo, shi, tlo[:, k], thi[:, k])
        glo[:, j], ghi[:, j] = slo, shi
    glo = np.where(np.isnan(glo), -_INF, glo)
    ghi = np.where(np.isnan(ghi), _INF, ghi)
    return glo, ghi


def _monotone_discard(lo, hi, root_lo, root_hi, model, d):
    """Boxes that provably hold no minimiser by a sign-definite partial derivative.

    Only components lying strictly inside the search range qualify: there a
    minimiser would need a zero partial derivative.
    """
    glo, ghi = gradient_enclosure(lo, hi, model, d)
    interior = (lo > root_lo) & (hi < root_hi)
    signed = (glo > 0) | (ghi < 0)
    return np.any(interior & signed, axis=1)


# ---------------------------------------------------------------------------
# queue
# ---------------------------------------------------------------------------


class BoxQueue:
    """Priority queue of boxes keyed by their SSE lower bound.

    Ties are broken by insertion order. Box data lives in growable arrays;
    the heap holds ``(lower bound, sequence number, slot)`` triples.
    """

    def __init__(self, dim: int, capacity: int = 1024):
        self.dim = dim
        self._lo = np.empty((capacity, dim))
        self._hi = np.empty((capacity, dim))
        self._lb = np.empty(capacity)
        self._ub = np.empty(capacity)
        self._heap: list[tuple[float, int, int]] = []
        self._free: list[int] = []
        self._next_slot = 0
        self._seq = 0

    def __len__(self) -> int:
        return len(self._heap)

    def _grow(self, need: int) -> None:
        cap = self._lb.size
        if self._next_slot + need <= cap:
            return
        new = max(2 * cap, self._next_slot + need)
        for name in ("_lo", "_hi"):
            arr = np.empty((new, self.dim))
            arr[:cap] = getattr(self, name)
            setattr(self, name, arr)
        for name in ("_lb", "_ub"):
            arr = np.empty(new)
            arr[:cap] = getattr(self, name)
            setattr(self, name, arr)

    def _slots(self, k: int) -> list[int]:
        take = self._free[-k:] if k else []
        if take:
            del self._free[-len(take):]
        rest = k - len(take)
        if rest:
            self._grow(rest)
            take = take + list(range(self._next_slot, self._next_slot + rest))
            self._next_slot += rest
        return take

    def push(self, box: IntervalBox, lb: float, ub: float = _INF) -> None:
        self.push_many(box.lo[None, :], box.hi[None, :], np.array([lb]), np.array([ub]))

    def push_many(self, lo, hi, lb, ub) -> None:
        k = len(lb)
        if k == 0:
            return
        slots = self._slots(k)
        idx = np.asarray(slots)
        self._lo[idx] = lo
        self._hi[idx] = hi
        self._lb[idx] = lb
        self._ub[idx] = ub
        heap = self._heap
        seq = self._seq
        for s, b in zip(slots, lb.tolist()):
            heapq.heappush(heap, (b, seq, s))
            seq += 1
        self._seq = seq

    def pop_many(self, k: int):
        """Remove up to ``k`` entries in (bound, insertion) order.

        Returns ``(lo, hi, lb, ub)`` arrays.
        """
        k = min(k, len(self._heap))
        slots = [heapq.heappop(self._heap)[2] for _ in range(k)]
        idx = np.asarray(slots, dtype=np.intp)
        out = (self._lo[idx].copy(), self._hi[idx].copy(), self._lb[idx].copy(), self._ub[idx].copy())
        self._free.extend(slots)
        return out

    def peek_bound(self) -> float:
        return self._heap[0][0] if self._heap else _INF

    def purge(self, threshold: float) -> int:
        """Drop every entry whose lower bound is ``>= threshold``."""
        keep, dropped = [], []
        for e in self._heap:
            (keep if e[0] < threshold else dropped).append(e)
        if dropped:
            self._free.extend(e[2] for e in dropped)
            heapq.heapify(keep)
            self._heap = keep
        return len(dropped)

    def live(self):
        """Arrays ``(lo, hi, lb)`` of all queued boxes (any order)."""
        idx = np.fromiter((e[2] for e in self._heap), dtype=np.intp, count=len(self._heap))
        return self._lo[idx], self._hi[idx], self._lb[idx]

    def min_bound(self) -> float:
        return min((e[0] for e in self._heap), default=_INF)


def choose_box(q: BoxQueue) -> tuple[IntervalBox, float]:
    """Remove and return the queued box with the smallest lower bound."""
    if len(q) == 0:
        raise IndexError("choose_box from an empty queue")
    lo, hi, lb, _ = q.pop_many(1)
    return IntervalBox(lo[0], hi[0]), float(lb[0])


def contract_box(b: IntervalBox, f_best: float, model, d: IVDataset) -> IntervalBox | None:
    """Return ``b`` if it may still hold a point better than ``f_best``, else ``None``."""
    if bound_objective(b, model, d).lo < f_best:
        return b
    return None


# ---------------------------------------------------------------------------
# main loop
# ---------------------------------------------------------------------------


@dataclass
class BnbState:
    """Snapshot handed to the ``run_bnb`` callback after every step."""

    f_upper: float
    incumbent: np.ndarray | None
    queue: BoxQueue
    solution_lo: list
    solution_hi: list
    solution_lb: list
    boxes_processed: int


def embed_sdm_in_ddm(theta_sdm, n2: float | None = None) -> np.ndarray:
    """DDM vector reproducing an SDM point: second diode switched off (``i02 = 0``)."""
    iph, i0, n, rs, rp = (float(x) for x in theta_sdm)
    return np.array([iph, i0, 0.0, n, n if n2 is None else n2, rs, rp])


def _local_descent(theta, model, d, bounds: ParamBounds):
    from scipy.optimize import least_squares

    lo, hi = bounds.lower, bounds.upper
    # least_squares needs strictly feasible starts and lo < hi
    free = hi > lo
    if not np.any(free):
        return None
    x0 = np.clip(theta, lo, hi)

    def fun(z):
        full = x0.copy()
        full[free] = z
        return residuals(full, model, d)

    try:
        res = least_squares(fun, x0[free], bounds=(lo[free], hi[free]), method="trf",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
    except (ValueError, FloatingPointError):
        return None
    out = x0.copy()
    out[free] = res.x
    return np.clip(out, lo, hi)


def run_bnb(model, d: IVDataset, bounds: ParamBounds, cfg: BnbConfig | None = None,
            incumbent=None, callback: Callable[[BnbState], None] | None = None) -> BnbResult:
    """Enclose the global minimum of the SSE over ``bounds``.

    ``incumbent`` optionally seeds the upper bound with a known feasible
    point (it must lie in ``bounds``). ``callback`` receives a
    :class:`BnbState` after every step; it is meant for instrumentation and
    must not modify the state.
    """
    cfg = cfg or BnbConfig()
    model = ModelKind.parse(model)
    bounds.check(model)
    t0 = time.perf_counter()
    n = len(d)
    dim = model.dimension
    root_lo, root_hi = bounds.lower, bounds.upper
    scale = bounds.width if cfg.bisect == "relative" else np.ones(dim)

    f_best = _INF
    x_best = None
    if incumbent is not None:
        x_best = np.asarray(incumbent, dtype=float).copy()
        if x_best.shape != (dim,) or not bounds.contains(x_best):
            raise ValueError("incumbent must be a point inside the search bounds")
        f_best = sse(x_best, model, d)

    else:
        # the centre of the search box is the first feasible point
        centre = 0.5 * root_lo + 0.5 * root_hi
        f_best = float(sse_batch(centre, model, d)[0])
        x_best = centre

    q = BoxQueue(dim)
    flo, fhi = bound_objective_batch(root_lo[None, :], root_hi[None, :], model, d)
    q.push_many(root_lo[None, :], root_hi[None, :], flo, fhi)
    sol_lo, sol_hi, sol_lb = [], [], []
    processed = 0
    terminated = "exhausted"
    purged_at = 1

    def improve(thetas, values):
        nonlocal f_best, x_best
        k = int(np.argmin(values))
        if values[k] < f_best:
            f_best = float(values[k])
            x_best = thetas[k].copy()
            return True
        return False

    while len(q):
        if processed >= cfg.max_boxes:
            terminated = "box_cap"
            break
        if time.perf_counter() - t0 > cfg.timeout:
            terminated = "timeout"
            break

        lo, hi, lb, ub = q.pop_many(min(cfg.batch_size, cfg.max_boxes - processed))
        alive = lb < f_best
        if not np.all(alive):
            lo, hi, lb, ub = lo[alive], hi[alive], lb[alive], ub[alive]
        if lb.size == 0:
            continue
        processed += lb.size

        # feasible points: exact box midpoints
        mids = np.clip(0.5 * lo + 0.5 * hi, root_lo, root_hi)
        if improve(mids, sse_batch(mids, model, d)) and cfg.local_descent:
            refined = _local_descent(x_best, model, d, bounds)
            if refined is not None:
                improve(refined[None, :], sse_batch(refined, model, d))

        # acceptance into the solution list
        w_x = np.max(hi - lo, axis=1)
        w_f = ub - lb
        small_f = (w_f <= cfg.eps_f) | (w_f <= cfg.eps_rel * abs(f_best))
        done = (w_x <= cfg.eps_x) & small_f

        # bisection (vectorised box_bisect with the configured scale)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(scale > 0, (hi - lo) / scale, 0.0)
        rel = np.where(np.any(rel > 0, axis=1, keepdims=True), rel, hi - lo)
        k = np.argmax(rel, axis=1)
        rows = np.arange(lb.size)
        a, b = lo[rows, k], hi[rows, k]
        m = 0.5 * a + 0.5 * b
        splittable = (a < m) & (m < b)
        done |= ~splittable

        if np.any(done):
            keep = done & (lb < f_best)
            sol_lo.extend(lo[keep])
            sol_hi.extend(hi[keep])
            sol_lb.extend(lb[keep].tolist())

        split = ~done
        if np.any(split):
            lo_s, hi_s, k_s, m_s = lo[split], hi[split], k[split], m[split]
            r = np.arange(lo_s.shape[0])
            left_hi = hi_s.copy()
            left_hi[r, k_s] = m_s
            right_lo = lo_s.copy()
            right_lo[r, k_s] = m_s
            # children interleaved left, right per parent to keep insertion order stable
            c_lo = np.empty((2 * r.size, dim))
            c_hi = np.empty((2 * r.size, dim))
            c_lo[0::2], c_hi[0::2] = lo_s, left_hi
            c_lo[1::2], c_hi[1::2] = right_lo, hi_s
            c_flo, c_fhi = bound_objective_batch(c_lo, c_hi, model, d)
            keep = c_flo < f_best
            if cfg.gradient_contractor and np.any(keep):
                idx = np.flatnonzero(keep)
                keep[idx[_monotone_discard(c_lo[idx], c_hi[idx], root_lo, root_hi, model, d)]] = False
            q.push_many(c_lo[keep], c_hi[keep], c_flo[keep], c_fhi[keep])

        # occasionally drop queue entries that the incumbent has overtaken
        if len(q) > 2 * purged_at and q.peek_bound() < f_best:
            q.purge(f_best)
            purged_at = max(len(q), 1)

        if callback is not None:
            callback(BnbState(f_best, x_best, q, sol_lo, sol_hi, sol_lb, processed))

    # post-processing: discard solution boxes the final incumbent rules out
    survivors = [j for j, b in enumerate(sol_lb) if b <= f_best]
    f_lower = min((sol_lb[j] for j in survivors), default=_INF)
    if terminated != "exhausted":
        f_lower = min(f_lower, q.min_bound())
    f_lower = max(min(f_lower, f_best), 0.0)
    return BnbResult(
        model=model,
        f_lower=f_lower,
        f_upper=f_best,
        rmse_lower=rmse_from_sse(f_lower, n),
        rmse_upper=rmse_from_sse(f_best, n),
        incumbent=x_best,
        solution_boxes=[IntervalBox(sol_lo[j], sol_hi[j]) for j in survivors],
        boxes_processed=processed,
        elapsed=time.perf_counter() - t0,
        terminated_by=terminated,
        n_points=n,
    )


def certify_epsilon(result: BnbResult, scale: str = "sse") -> float:
    """Optimality gap ``f_upper - f_lower`` on the SSE or RMSE scale.

    Every point of a surviving solution box is then a global minimiser up to
    this gap. For runs that stopped on a timeout or box cap the gap is still
    a valid bound but an :class:`UncertifiedWarning` is issued.
    """
    if scale not in ("sse", "rmse"):
        raise ValueError("scale must be 'sse' or 'rmse'")
    if not result.certified:
        warnings.warn(
            f"search stopped by {result.terminated_by}; the gap is an upper bound only",
            UncertifiedWarning,
            stacklevel=2,
        )
    return result.gap if scale == "sse" else result.rmse_gap
