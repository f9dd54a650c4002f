"""Riemann sums, gauge-driven integration loops and exact step-function oracles."""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .convex_geometry import (
    DirectionGrid,
    Segment,
    SupportVector,
    Zonotope,
    embed,
    hausdorff_grid,
    hausdorff_segments,
    make_grid,
)
from .functions import DerivativePathological, DeterminedMF, StepVectorFunction, step_integral
from .partitions import (
    DEFAULT_MAX_DEPTH,
    ConstantGauge,
    Gauge,
    MeasurableSet,
    PartitionTooLarge,
    PowerFloorGauge,
    StepGauge,
    TaggedPartition,
    adversarial_tags,
    cousin_items,
)

DEFAULT_MAX_INTERVALS = 6_000_000
BANG_BANG_MAX_N = 20


class MissingPrimitiveValue(KeyError):
    pass


# ---------------------------------------------------------------- Riemann sums

def riemann_sum_vec(g, p: TaggedPartition) -> np.ndarray:
    """sum_i g(t_i) |I_i|, accumulated left to right."""
    terms = g.eval_many(p.tags) * p.lengths[:, None]
    return np.cumsum(terms, axis=0)[-1]


def riemann_sum_set(G: DeterminedMF, p: TaggedPartition) -> Zonotope:
    """sum_i G(t_i) |I_i| as the zonotope with generators g(t_i) |I_i|."""
    return Zonotope(G.g.eval_many(p.tags) * p.lengths[:, None], G.dim)


def support_in_order(z: Zonotope, grid: DirectionGrid, order: Sequence[int]) -> np.ndarray:
    """Support values of ``z`` summing the generators in the given order."""
    gens = z.generators[np.asarray(order, dtype=int)]
    terms = np.maximum(gens @ grid.directions.T, 0.0)
    return np.cumsum(terms, axis=0)[-1] if len(gens) else np.zeros(len(grid))


# ---------------------------------------------------------------- results

@dataclass(frozen=True)
class IterationRecord:
    gauge: str
    n_intervals: int
    succ_diff: float
    err_bound: float
    vec_diff: float = math.nan


@dataclass(frozen=True)
class IntegralResult:
    kind: str
    mode: str
    iterations: tuple[IterationRecord, ...]
    converged: bool
    error_estimate: float
    value: np.ndarray | None = None
    support: SupportVector | None = None
    zonotope: Zonotope | None = None
    note: str = ""

    CSV_COLUMNS = ("iter", "gauge", "n_intervals", "succ_diff", "err_bound")

    @property
    def status(self) -> str:
        return "converged" if self.converged else "NonConvergent"

    def table_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for i, rec in enumerate(self.iterations, start=1):
            w.writerow([i, rec.gauge, rec.n_intervals, _fmt(rec.succ_diff), _fmt(rec.err_bound)])
        return buf.getvalue()

    def record(self) -> dict:
        out = {
            "kind": self.kind,
            "mode": self.mode,
            "converged": self.converged,
            "status": self.status,
            "error_estimate": self.error_estimate,
            "iterations": [
                {
                    "gauge": r.gauge,
                    "n_intervals": r.n_intervals,
                    "succ_diff": None if math.isinf(r.succ_diff) else r.succ_diff,
                    "err_bound": r.err_bound,
                }
                for r in self.iterations
            ],
            "note": self.note,
        }
        if self.value is not None:
            out["value"] = [float(x) for x in self.value]
        if self.support is not None:
            out["support_grid"] = self.support.grid.label
            out["support_radius_bound"] = self.support.radius_bound
            out["support_max"] = float(np.max(self.support.values))
        if self.zonotope is not None:
            out["n_generators"] = self.zonotope.n_generators
        return out


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.17g}"


# ---------------------------------------------------------------- schedules

def constant_schedule(levels: int = 40) -> list[Gauge]:
    return [ConstantGauge(2.0 ** -k) for k in range(1, levels + 1)]


def power_floor_schedule(c: float = 0.1, p: float = 3.0, floor: float = 0.1, levels: int = 12) -> list[Gauge]:
    return [PowerFloorGauge(c * 2.0 ** -k, p, floor * 2.0 ** -k) for k in range(1, levels + 1)]


def step_schedule(levels: int = 40) -> list[Gauge]:
    """Measurable gauges: thirds of [0, 1] with values 2^-k, 2^-(k+1), 2^-k.

    The breakpoints are not dyadic, so Cousin bisection never puts a tag on
    a dyadic breakpoint of the integrand through a gauge jump.
    """
    bp = [1.0 / 3.0, 2.0 / 3.0]
    return [StepGauge(bp, [2.0 ** -k, 2.0 ** -(k + 1), 2.0 ** -k]) for k in range(1, levels + 1)]


def default_henstock_schedule(target) -> list[Gauge]:
    g = target.g if isinstance(target, DeterminedMF) else target
    if _is_singular(g):
        return power_floor_schedule()
    return constant_schedule()


def _is_singular(g) -> bool:
    if isinstance(g, DerivativePathological):
        return True
    inner = getattr(g, "g", None)
    if inner is not None:
        return _is_singular(inner)
    return any(_is_singular(t) for t in getattr(g, "terms", ()))


# ---------------------------------------------------------------- gauge loop

def _partition(gauge: Gauge, perron: bool, max_depth: int, max_intervals: int) -> TaggedPartition:
    a, b, t = cousin_items(gauge, perron, max_depth, 0.0, 1.0, max_items=max_intervals)
    return TaggedPartition(a, b, t, perron)


def gauge_integrate(
    target,
    tol: float,
    schedule: Iterable[Gauge],
    *,
    perron: bool,
    kind: str,
    grid: DirectionGrid | None = None,
    retag: Callable[[TaggedPartition], TaggedPartition] | None = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_intervals: int = DEFAULT_MAX_INTERVALS,
    min_iterations: int = 3,
) -> IntegralResult:
    """Cauchy loop over a gauge schedule.

    Each gauge yields one Cousin partition and one Riemann sum; the run
    converges once two consecutive successive differences drop below tol/2
    and at least ``min_iterations`` gauges have been tried.  Raising
    ``min_iterations`` guards against coarse partitions whose tags all miss
    a short piece of the integrand, which can make early sums agree.
    A DeterminedMF target is integrated in set mode, with differences
    measured by the grid Hausdorff distance.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    set_mode = isinstance(target, DeterminedMF)
    g = target.g if set_mode else target
    if set_mode and grid is None:
        grid = make_grid(target.dim)
    records: list[IterationRecord] = []
    prev_vec = prev_sv = None
    value = sv = zon = None
    converged = False
    note = "schedule exhausted"
    for gauge in schedule:
        try:
            p = _partition(gauge, perron, max_depth, max_intervals)
        except PartitionTooLarge as exc:
            note = f"interval budget exhausted: {exc}"
            break
        if retag is not None:
            p = retag(p)
        vec = riemann_sum_vec(g, p)
        vec_diff = math.inf if prev_vec is None else float(np.linalg.norm(vec - prev_vec))
        if set_mode:
            zon = riemann_sum_set(target, p).merged()
            sv = embed(zon, grid)
            if prev_sv is None:
                diff, err = math.inf, 0.0
            else:
                diff, err = hausdorff_grid(sv, prev_sv)
            prev_sv = sv
        else:
            diff, err = vec_diff, 0.0
        prev_vec = value = vec
        records.append(IterationRecord(gauge.describe(), len(p), diff, err, vec_diff))
        if len(records) >= max(3, min_iterations) and all(r.succ_diff < tol / 2 for r in records[-2:]):
            converged = True
            note = ""
            break
    if not records:
        raise PartitionTooLarge(note)
    last = records[-1]
    return IntegralResult(
        kind=kind,
        mode="set" if set_mode else "vector",
        iterations=tuple(records),
        converged=converged,
        error_estimate=last.succ_diff + last.err_bound,
        value=None if set_mode else value,
        support=sv,
        zonotope=zon,
        note=note,
    )


def adversarial_retag(g, samples: int = 17) -> Callable[[TaggedPartition], TaggedPartition]:
    """Retagger that moves each tag to the sampled argmax of the first coordinate's positive part."""
    def score(t):
        return np.maximum(g.eval_many(t)[:, 0], 0.0)

    return lambda p: adversarial_tags(p, score, samples)


def mcshane_integrate(target, tol: float, schedule: Iterable[Gauge] | None = None, **kw) -> IntegralResult:
    """Free-tag gauge integral (default schedule Constant(2^-k), k = 1..40)."""
    schedule = constant_schedule() if schedule is None else schedule
    return gauge_integrate(target, tol, schedule, perron=False, kind="mcshane", **kw)


def henstock_integrate(target, tol: float, schedule: Iterable[Gauge] | None = None, **kw) -> IntegralResult:
    """Perron-partition gauge integral.

    The default schedule is PowerFloor(0.1 * 2^-k, 3, 0.1 * 2^-k) for
    integrands with a 1/t singularity at 0 and Constant(2^-k) otherwise.
    """
    schedule = default_henstock_schedule(target) if schedule is None else schedule
    return gauge_integrate(target, tol, schedule, perron=True, kind="henstock", **kw)


def birkhoff_integrate(target, tol: float, schedule: Iterable[Gauge] | None = None, **kw) -> IntegralResult:
    """McShane loop restricted to measurable (step) gauges."""
    schedule = step_schedule() if schedule is None else list(schedule)
    if any(not isinstance(gauge, (StepGauge, ConstantGauge)) for gauge in schedule):
        raise ValueError("Birkhoff integration only accepts measurable step gauges")
    return gauge_integrate(target, tol, schedule, perron=False, kind="birkhoff", **kw)


# ---------------------------------------------------------------- step oracles

def _step_of(target) -> StepVectorFunction:
    g = target.g if isinstance(target, DeterminedMF) else target
    if not isinstance(g, StepVectorFunction):
        raise TypeError("exact oracles need a step integrand")
    return g


def _piece_measures(g: StepVectorFunction, E: MeasurableSet) -> np.ndarray:
    edges = g.edges
    return np.array([E.overlap(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])])


def pettis_step(target, E: MeasurableSet | None = None):
    """Exact integral over E of a step function (vector) or of its determined MF (zonotope)."""
    g = _step_of(target)
    E = MeasurableSet.unit() if E is None else E
    if isinstance(target, DeterminedMF):
        return Zonotope(g.values * _piece_measures(g, E)[:, None], g.dim)
    return step_integral(g, E)


def isg_zonotope(g: StepVectorFunction) -> Zonotope:
    """The set of all integrals of phi * g with phi measurable and [0, 1]-valued.

    For a step g with pieces (A_k, x_k), the integral of phi * g is
    sum_k (int_{A_k} phi) x_k with int_{A_k} phi ranging over [0, |A_k|].
    """
    return Zonotope(g.values * g.piece_lengths[:, None], g.dim)


def bochner_norm_integral(g: StepVectorFunction) -> float:
    return math.fsum(float(np.linalg.norm(x)) * w for x, w in zip(g.values, g.piece_lengths))


def bang_bang_max(vectors) -> tuple[float, tuple[int, ...]]:
    """max ||sum_i a_i v_i|| over a in [0, 1]^n, attained at a vertex.

    Vertices are enumerated in lexicographic order, so ties go to the smaller
    bit pattern.
    """
    v = np.asarray(vectors, dtype=float)
    if v.ndim == 1:
        v = v.reshape(-1, 1)
    n = v.shape[0]
    if n > BANG_BANG_MAX_N:
        raise ValueError(f"vertex enumeration is limited to n <= {BANG_BANG_MAX_N}")
    if n == 0:
        return 0.0, ()
    bits = np.array(list(itertools.product((0, 1), repeat=n)), dtype=float)
    norms = np.linalg.norm(bits @ v, axis=1)
    k = int(np.argmax(norms))
    return float(norms[k]), tuple(int(b) for b in bits[k])


# ---------------------------------------------------------------- variational defect

@dataclass(frozen=True, eq=False)
class IntervalPrimitive:
    """Additive interval function stored on cells between sorted breakpoints.

    The value on [p_i, p_j] is the Minkowski sum of the cell values between.
    """

    points: np.ndarray
    cells: tuple[Zonotope, ...]

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1)
        if pts.size < 2 or np.any(np.diff(pts) <= 0):
            raise ValueError("primitive breakpoints must be strictly increasing")
        if len(self.cells) != pts.size - 1:
            raise ValueError("one cell value per consecutive breakpoint pair")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "cells", tuple(self.cells))

    @classmethod
    def from_step(cls, g: StepVectorFunction, points) -> "IntervalPrimitive":
        pts = np.union1d(np.union1d([0.0, 1.0], g.breakpoints), np.asarray(points, dtype=float))
        G = DeterminedMF(g)
        cells = tuple(pettis_step(G, MeasurableSet(((lo, hi),))) for lo, hi in zip(pts[:-1], pts[1:]))
        return cls(pts, cells)

    def with_cell(self, index: int, value: Zonotope) -> "IntervalPrimitive":
        cells = list(self.cells)
        cells[index] = value
        return IntervalPrimitive(self.points, tuple(cells))

    def _index(self, x: float) -> int:
        i = int(np.searchsorted(self.points, x))
        if i >= self.points.size or self.points[i] != x:
            raise MissingPrimitiveValue(f"no primitive breakpoint at {x!r}")
        return i

    def value(self, a: float, b: float) -> Zonotope:
        i, j = self._index(a), self._index(b)
        if j <= i:
            raise ValueError("empty or reversed interval")
        out = self.cells[i]
        for z in self.cells[i + 1:j]:
            out = out + z
        return out


def variational_defect(
    G: DeterminedMF, prim: IntervalPrimitive, p: TaggedPartition, grid: DirectionGrid | None = None
) -> tuple[float, float]:
    """sum_j d_H(prim(I_j), G(t_j) |I_j|) and the summed grid error bound.

    Terms whose primitive value is a single segment use the exact segment
    distance and contribute no grid error.
    """
    grid = make_grid(G.dim) if grid is None else grid
    tags_vals = G.g.eval_many(p.tags)
    total, err = [], []
    for (a, b), x, length in zip(zip(p.a, p.b), tags_vals, p.lengths):
        pv = prim.value(float(a), float(b)).merged()
        term = x * length
        if pv.n_generators <= 1:
            y = pv.generators[0] if pv.n_generators else np.zeros(G.dim)
            total.append(hausdorff_segments(y, term))
            err.append(0.0)
        else:
            d, e = hausdorff_grid(embed(pv, grid), embed(Segment(term), grid))
            total.append(d)
            err.append(e)
    return math.fsum(total), math.fsum(err)


def oracle_distance(result: IntegralResult, g: StepVectorFunction) -> tuple[float, float]:
    """Distance from an integration result to the exact step oracle.

    Set mode: grid Hausdorff distance to IS_G and its error bound.
    Vector mode: Euclidean distance to the exact integral, error 0.
    """
    if result.mode == "set":
        oracle = embed(isg_zonotope(g), result.support.grid)
        return hausdorff_grid(result.support, oracle)
    return float(np.linalg.norm(result.value - step_integral(g))), 0.0

