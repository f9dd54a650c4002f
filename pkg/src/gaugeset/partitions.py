"""Gauges, tagged partitions of [0, 1] and a constructive Cousin partitioner."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

import numpy as np

DEFAULT_MAX_DEPTH = 60
ARGMAX_SAMPLES = 17


class DepthExceeded(RuntimeError):
    """Bisection went deeper than the allowed budget."""


class PartitionTooLarge(RuntimeError):
    """The partition would hold more items than the caller allows."""


def piece_index(breakpoints, t):
    """Index of the piece containing ``t``.

    Pieces are [0, b_0], (b_0, b_1], ..., (b_{m-1}, 1]: a point sitting on a
    breakpoint belongs to the piece on its left.  This rule is shared by step
    gauges, step functions and scalar weights.
    """
    return np.searchsorted(np.asarray(breakpoints, dtype=float), t, side="left")


def _check_breakpoints(breakpoints) -> np.ndarray:
    bp = np.array(breakpoints, dtype=float).reshape(-1)
    if bp.size and (np.any(bp <= 0.0) or np.any(bp >= 1.0)):
        raise ValueError("breakpoints must lie strictly inside (0, 1)")
    if np.any(np.diff(bp) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    bp.setflags(write=False)
    return bp


# ---------------------------------------------------------------- gauges

@dataclass(frozen=True)
class ConstantGauge:
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("a constant gauge must be positive")

    def __call__(self, t):
        return np.full(np.shape(t), self.c, dtype=float) if np.ndim(t) else self.c

    def describe(self) -> str:
        return f"Constant({self.c:.17g})"

    def scaled(self, f: float) -> "ConstantGauge":
        return ConstantGauge(self.c * f)


@dataclass(frozen=True, eq=False)
class StepGauge:
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = _check_breakpoints(self.breakpoints)
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size != bp.size + 1:
            raise ValueError("a step gauge needs one value per piece")
        if not np.all(vals > 0):
            raise ValueError("step gauge values must be positive")
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def __call__(self, t):
        out = self.values[piece_index(self.breakpoints, t)]
        return float(out) if np.ndim(out) == 0 else out

    def piece_left(self, t):
        """Left end of the piece containing ``t``."""
        edges = np.concatenate([[0.0], self.breakpoints])
        return edges[piece_index(self.breakpoints, t)]

    def describe(self) -> str:
        bp = ";".join(f"{b:.17g}" for b in self.breakpoints)
        vals = ";".join(f"{v:.17g}" for v in self.values)
        return f"Step([{bp}],[{vals}])"

    def scaled(self, f: float) -> "StepGauge":
        return StepGauge(self.breakpoints, self.values * f)


@dataclass(frozen=True)
class PowerFloorGauge:
    """delta(0) = floor and delta(t) = c * t**p for t > 0.

    The floor only acts at the origin.  A gauge bounded below near 0 admits
    Perron partitions with an item [L, 2L] tagged at L for arbitrarily small
    L, which defeats integrands that blow up like 1/t; the power law keeps the
    windows shrinking towards 0 while the origin itself keeps a fixed window.
    """

    c: float
    p: float
    floor: float

    def __post_init__(self):
        if not (self.c > 0 and self.p >= 1 and self.floor > 0):
            raise ValueError("PowerFloor needs c > 0, p >= 1, floor > 0")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t > 0, self.c * np.abs(t) ** self.p, self.floor)
        return float(out) if out.ndim == 0 else out

    def describe(self) -> str:
        return f"PowerFloor({self.c:.17g},{self.p:.17g},{self.floor:.17g})"

    def scaled(self, f: float) -> "PowerFloorGauge":
        return PowerFloorGauge(self.c * f, self.p, self.floor * f)


Gauge = Union[ConstantGauge, StepGauge, PowerFloorGauge]


def gauge_min_le(g1: Gauge, g2: Gauge, samples: int = 4097) -> bool:
    """Sampled check that g1 <= g2 pointwise (used by refinement tests)."""
    t = np.linspace(0.0, 1.0, samples)
    return bool(np.all(g1(t) <= g2(t)))


# ---------------------------------------------------------------- partitions

@dataclass(frozen=True)
class TaggedInterval:
    a: float
    b: float
    tag: float

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True, eq=False)
class TaggedPartition:
    """Tagged partition of [0, 1], stored column-wise.

    Items are sorted by left endpoint and abut exactly.  ``perron`` marks
    partitions whose tags lie in their own intervals.
    """

    a: np.ndarray
    b: np.ndarray
    tags: np.ndarray
    perron: bool = True

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(-1)
        b = np.array(self.b, dtype=float).reshape(-1)
        tags = np.array(self.tags, dtype=float).reshape(-1)
        if not (a.size == b.size == tags.size) or a.size == 0:
            raise ValueError("a partition needs matching, nonempty a/b/tag columns")
        if a[0] != 0.0 or b[-1] != 1.0:
            raise ValueError("a partition must cover [0, 1]")
        if np.any(b <= a):
            raise ValueError("every interval needs a < b")
        if np.any(a[1:] != b[:-1]):
            raise ValueError("intervals must abut without gaps or overlaps")
        if np.any(tags < 0.0) or np.any(tags > 1.0):
            raise ValueError("tags must lie in [0, 1]")
        if self.perron and (np.any(tags < a) or np.any(tags > b)):
            raise ValueError("Perron partition with a tag outside its interval")
        for arr in (a, b, tags):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "tags", tags)

    def __len__(self) -> int:
        return self.a.size

    def __iter__(self) -> Iterator[TaggedInterval]:
        for a, b, t in zip(self.a, self.b, self.tags):
            yield TaggedInterval(float(a), float(b), float(t))

    @property
    def lengths(self) -> np.ndarray:
        return self.b - self.a

    @property
    def mesh(self) -> float:
        return float(np.max(self.lengths))

    def with_tags(self, tags, perron: bool | None = None) -> "TaggedPartition":
        return TaggedPartition(self.a, self.b, tags, self.perron if perron is None else perron)

    @classmethod
    def from_items(cls, items: Sequence[TaggedInterval], perron: bool = True) -> "TaggedPartition":
        items = sorted(items, key=lambda it: it.a)
        return cls([it.a for it in items], [it.b for it in items], [it.tag for it in items], perron)

    def to_rows(self) -> list[tuple[float, float, float]]:
        return [(float(a), float(b), float(t)) for a, b, t in zip(self.a, self.b, self.tags)]


def is_delta_fine(p: TaggedPartition, gauge: Gauge) -> bool:
    """Every [a, b] sits strictly inside (tag - delta(tag), tag + delta(tag))."""
    d = gauge(p.tags)
    ok = np.all(p.tags - d < p.a) and np.all(p.b < p.tags + d)
    if p.perron:
        ok = ok and bool(np.all((p.a <= p.tags) & (p.tags <= p.b)))
    return bool(ok)


def uniform_partition(n: int, tag_rule: str = "mid") -> TaggedPartition:
    if n < 1:
        raise ValueError("n must be at least 1")
    edges = np.arange(n + 1, dtype=float) / n
    return partition_from_points(edges, tag_rule)


def partition_from_points(points, tag_rule: str = "mid") -> TaggedPartition:
    """Perron partition with the given endpoints (0 and 1 are added)."""
    pts = np.unique(np.concatenate([[0.0, 1.0], np.asarray(points, dtype=float).reshape(-1)]))
    if pts[0] < 0.0 or pts[-1] > 1.0:
        raise ValueError("points must lie in [0, 1]")
    a, b = pts[:-1], pts[1:]
    if tag_rule == "left":
        tags = a
    elif tag_rule == "right":
        tags = b
    elif tag_rule == "mid":
        tags = 0.5 * (a + b)
    else:
        raise ValueError(f"unknown tag rule {tag_rule!r}")
    return TaggedPartition(a, b, tags, True)


def _fits(tag, d, a, b, perron: bool):
    ok = (tag - d < a) & (b < tag + d)
    if perron:
        ok &= (a <= tag) & (tag <= b)
    return ok


def cousin_partition(
    gauge: Gauge,
    perron: bool = True,
    max_depth: int = DEFAULT_MAX_DEPTH,
    a: float = 0.0,
    b: float = 1.0,
) -> TaggedPartition:
    """Constructive Cousin lemma: a gauge-fine tagged partition of [a, b].

    Each pending interval tries the tags a, b, midpoint and, for free tags,
    the left end of the gauge piece containing it and the argmax of the gauge
    over 17 equispaced samples.  The first tag whose window strictly contains
    the interval is kept; otherwise the interval is bisected.  All intervals
    of one depth are handled together, which gives the same items as a
    depth-first worklist.

    Only the [0, 1] case returns a :class:`TaggedPartition`; subinterval
    covers are returned by :func:`cousin_items`.
    """
    if (a, b) != (0.0, 1.0):
        raise ValueError("use cousin_items for subintervals")
    ea, eb, et = cousin_items(gauge, perron, max_depth, a, b)
    return TaggedPartition(ea, eb, et, perron)


def cousin_items(gauge: Gauge, perron: bool, max_depth: int, a: float, b: float, max_items: int | None = None):
    """Arrays (a, b, tag) of a gauge-fine cover of [a, b], sorted by a."""
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    pa = np.array([a], dtype=float)
    pb = np.array([b], dtype=float)
    out_a, out_b, out_t = [], [], []
    depth = 0
    emitted = 0
    while pa.size:
        if max_items is not None and emitted + pa.size > max_items:
            raise PartitionTooLarge(f"more than {max_items} items needed for gauge {gauge.describe()}")
        if depth > max_depth:
            raise DepthExceeded(
                f"{pa.size} interval(s) still unresolved after {max_depth} bisections "
                f"(first: [{pa[0]:.17g}, {pb[0]:.17g}], gauge {gauge.describe()})"
            )
        mid = 0.5 * (pa + pb)
        chosen = np.full(pa.shape, np.nan)
        candidates = [pa, pb, mid]
        if not perron:
            if isinstance(gauge, StepGauge):
                left = gauge.piece_left(pa)
                same = piece_index(gauge.breakpoints, pa) == piece_index(gauge.breakpoints, pb)
                candidates.append(np.where(same, left, np.nan))
            s = np.linspace(0.0, 1.0, ARGMAX_SAMPLES)
            pts = pa[:, None] + (pb - pa)[:, None] * s[None, :]
            vals = np.asarray(gauge(pts.ravel()), dtype=float).reshape(pts.shape)
            candidates.append(pts[np.arange(pa.size), np.argmax(vals, axis=1)])
        for cand in candidates:
            todo = np.isnan(chosen) & ~np.isnan(cand)
            if not np.any(todo):
                continue
            c = cand[todo]
            ok = _fits(c, np.asarray(gauge(c), dtype=float), pa[todo], pb[todo], perron)
            idx = np.flatnonzero(todo)[ok]
            chosen[idx] = cand[idx]
        done = ~np.isnan(chosen)
        out_a.append(pa[done])
        out_b.append(pb[done])
        out_t.append(chosen[done])
        emitted += int(np.count_nonzero(done))
        rest = ~done
        ra, rb, rm = pa[rest], pb[rest], mid[rest]
        if np.any((rm <= ra) | (rm >= rb)):
            raise DepthExceeded("interval can no longer be bisected in floating point")
        pa = np.concatenate([ra, rm])
        pb = np.concatenate([rm, rb])
        depth += 1
    ea = np.concatenate(out_a)
    order = np.argsort(ea, kind="stable")
    return ea[order], np.concatenate(out_b)[order], np.concatenate(out_t)[order]


def adversarial_tags(
    p: TaggedPartition, score: Callable[[np.ndarray], np.ndarray], samples: int = ARGMAX_SAMPLES
) -> TaggedPartition:
    """Retag every item at the argmax of ``score`` over equispaced samples.

    Ties go to the smaller point.  Tags stay inside the intervals.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    s = np.linspace(0.0, 1.0, samples) if samples > 1 else np.zeros(1)
    tags = np.empty(len(p))
    chunk = max(1, 2_000_000 // samples)
    for start in range(0, len(p), chunk):
        sl = slice(start, start + chunk)
        pts = p.a[sl, None] + p.lengths[sl, None] * s[None, :]
        vals = np.asarray(score(pts.ravel()), dtype=float).reshape(pts.shape)
        tags[sl] = pts[np.arange(pts.shape[0]), np.argmax(vals, axis=1)]
    return TaggedPartition(p.a, p.b, np.clip(tags, p.a, p.b), p.perron)


# ---------------------------------------------------------------- measurable sets

@dataclass(frozen=True, eq=False)
class MeasurableSet:
    """Finite disjoint union of closed subintervals of [0, 1]."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = sorted((float(a), float(b)) for a, b in self.intervals if b > a)
        for a, b in ivs:
            if a < 0.0 or b > 1.0:
                raise ValueError("intervals must lie in [0, 1]")
        for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
            if a1 < b0:
                raise ValueError("intervals of a measurable set must be disjoint")
        object.__setattr__(self, "intervals", tuple(ivs))

    @classmethod
    def unit(cls) -> "MeasurableSet":
        return cls(((0.0, 1.0),))

    @classmethod
    def empty(cls) -> "MeasurableSet":
        return cls(())

    @property
    def measure(self) -> float:
        return math.fsum(b - a for a, b in self.intervals)

    def overlap(self, lo: float, hi: float) -> float:
        """Lebesgue measure of the intersection with [lo, hi]."""
        return math.fsum(max(0.0, min(b, hi) - max(a, lo)) for a, b in self.intervals)
