"""Seeded invariant checks run by the ``check`` command.

Each check returns a :class:`CheckResult`; none of them needs more than a
second or two.  The checks compare library routines against independent
brute-force computations on small random instances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex_geometry import Segment, hausdorff_segments, make_grid, support_segment, support_zonotope
from .demos import random_gauge, random_step_function
from .functions import ScalarWeight, StepVectorFunction, determined, segment_gap, selection, step_integral
from .integrators import IntervalPrimitive, bang_bang_max, isg_zonotope, variational_defect
from .partitions import cousin_partition, is_delta_fine, partition_from_points


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    detail: str

    CSV_COLUMNS = ("check", "pass", "worst", "detail")

    def csv_row(self) -> list[str]:
        return [self.name, str(self.passed).lower(), f"{self.worst:.17g}", self.detail]


def check_support_identity(rng: np.random.Generator, trials: int = 2000) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        d = int(rng.choice([1, 2, 3, 8]))
        u, x = rng.normal(size=d), rng.normal(size=d)
        worst = max(worst, abs(support_segment(u, Segment(x)) - max(float(u @ x), 0.0)))
    return CheckResult("support_identity", worst <= 1e-12, worst, f"{trials} random (u, x)")


def _segment_distance_brute(x, y, samples: int = 401) -> float:
    s = np.linspace(0.0, 1.0, samples)
    px, py = s[:, None] * x, s[:, None] * y
    dist = np.linalg.norm(px[:, None, :] - py[None, :, :], axis=2)
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


def check_segment_hausdorff(rng: np.random.Generator, trials: int = 200) -> CheckResult:
    """Exact segment distance against dense sampling and the Lipschitz bound."""
    worst = 0.0
    ok = True
    for _ in range(trials):
        d = int(rng.integers(1, 4))
        x, y = rng.normal(size=d), rng.normal(size=d)
        exact = hausdorff_segments(x, y)
        ok &= exact <= float(np.linalg.norm(x - y)) + 1e-12
        # sampled distance is within half the sample spacing of the exact value
        gap = abs(exact - _segment_distance_brute(x, y))
        slack = (np.linalg.norm(x) + np.linalg.norm(y)) / 400
        ok &= gap <= slack
        worst = max(worst, gap)
    return CheckResult("segment_hausdorff", bool(ok), worst, f"{trials} pairs vs sampling")


def check_cousin_fineness(rng: np.random.Generator, trials: int = 50) -> CheckResult:
    bad = 0
    for i in range(trials):
        gauge = random_gauge(rng)
        p = cousin_partition(gauge, perron=bool(i % 2))
        bad += not is_delta_fine(p, gauge)
    return CheckResult("cousin_fineness", bad == 0, float(bad), f"{trials} random gauges")


def check_isg_membership(rng: np.random.Generator, trials: int = 10, weights: int = 200) -> CheckResult:
    """Integrals of random selections never leave IS_G."""
    worst = -math.inf
    for _ in range(trials):
        g = random_step_function(rng, max_pieces=5)
        z = isg_zonotope(g)
        grid = make_grid(g.dim, 64 if g.dim == 2 else None)
        zs = np.array([support_zonotope(u, z) for u in grid.directions])
        for _ in range(weights):
            m = int(rng.integers(0, 6))
            bp = np.sort(rng.choice(np.arange(1, 512), size=m, replace=False)) / 512.0
            w = ScalarWeight(bp, rng.uniform(0.0, 1.0, size=m + 1))
            point = step_integral(selection(w, g))
            worst = max(worst, float(np.max(grid.directions @ point - zs)))
    return CheckResult("isg_membership", worst <= 1e-9, worst, f"{trials}x{weights} selections")


def check_bang_bang(rng: np.random.Generator, trials: int = 30) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        n, d = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        v = rng.normal(size=(n, d))
        best, bits = bang_bang_max(v)
        a = rng.uniform(size=(2000, n))
        dense = float(np.max(np.linalg.norm(a @ v, axis=1)))
        worst = max(worst, dense - best)
        worst = max(worst, abs(best - float(np.linalg.norm(np.asarray(bits) @ v))))
    return CheckResult("bang_bang", worst <= 1e-9, worst, f"{trials} instances vs random interior points")


def check_segment_gap(rng: np.random.Generator, trials: int = 200) -> CheckResult:
    g = StepVectorFunction([0.25, 0.5, 0.75], rng.normal(size=(4, 3)))
    worst = -math.inf
    for _ in range(trials):
        t, t2 = rng.uniform(size=2)
        dh, norm = segment_gap(g, float(t), float(t2))
        worst = max(worst, dh - norm)
    return CheckResult("segment_gap", worst <= 1e-12, worst, f"{trials} pairs on a 4-piece step function")


def check_variational_defect(rng: np.random.Generator) -> CheckResult:
    bp = np.array([1, 2, 3, 4, 5]) / 6.0
    g = StepVectorFunction(bp, rng.normal(size=(6, 2)))
    points = np.union1d(np.linspace(0.0, 1.0, 1001), bp)
    prim = IntervalPrimitive.from_step(g, points)
    p = partition_from_points(points)
    defect, err = variational_defect(determined(g), prim, p)
    return CheckResult("variational_defect", defect + err < 1e-4, defect, f"grid error {err:.3g}")


CHECKS = (
    check_support_identity,
    check_segment_hausdorff,
    check_segment_gap,
    check_cousin_fineness,
    check_isg_membership,
    check_bang_bang,
    check_variational_defect,
)


def run_checks(seed: int) -> list[CheckResult]:
    """Every check gets its own generator derived from ``seed``."""
    seeds = np.random.SeedSequence(seed).spawn(len(CHECKS))
    return [check(np.random.default_rng(ss)) for check, ss in zip(CHECKS, seeds)]
