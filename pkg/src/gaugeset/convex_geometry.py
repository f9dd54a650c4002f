"""Convex compact subsets of R^d through their support functions.

Three concrete set types are supported: segments ``conv{0, x}``, zonotopes
``sum_k [0, 1] g_k`` anchored at the origin, and V-polytopes.  Every set can be
sampled on a :class:`DirectionGrid`, giving a :class:`SupportVector`; set
arithmetic then becomes pointwise arithmetic on the sampled values.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

MAX_DIM = 64
EXACT_NORM_MAX_GENERATORS = 16


class DimensionMismatch(ValueError):
    pass


class GridMismatch(ValueError):
    pass


def as_vector(x) -> np.ndarray:
    v = np.array(x, dtype=float).reshape(-1)
    if v.size < 1 or v.size > MAX_DIM:
        raise ValueError(f"vector dimension must be in [1, {MAX_DIM}], got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    v.setflags(write=False)
    return v


def _check_dim(u: np.ndarray, d: int) -> None:
    if u.shape[-1] != d:
        raise DimensionMismatch(f"dimension {u.shape[-1]} does not match {d}")


def positive_part(x):
    return np.maximum(x, 0.0)


@dataclass(frozen=True, eq=False)
class Segment:
    """The set conv{0, endpoint}."""

    endpoint: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "endpoint", as_vector(self.endpoint))

    @property
    def dim(self) -> int:
        return self.endpoint.size

    def __repr__(self):
        return f"Segment({self.endpoint.tolist()})"


@dataclass(frozen=True, eq=False)
class Zonotope:
    """Minkowski sum of the segments [0, 1] * g_k, one per row of ``generators``.

    An empty generator array represents {0}; ``dim`` must then be given.
    """

    generators: np.ndarray
    dim: int = field(default=-1)

    def __post_init__(self):
        g = np.array(self.generators, dtype=float)
        if g.size == 0:
            if self.dim < 1:
                raise ValueError("empty zonotope needs an explicit dimension")
            g = g.reshape(0, self.dim)
        else:
            if g.ndim == 1:
                g = g.reshape(1, -1)
            if self.dim not in (-1, g.shape[1]):
                raise DimensionMismatch(f"generators have dimension {g.shape[1]}, declared {self.dim}")
            if not np.all(np.isfinite(g)):
                raise ValueError("generator entries must be finite")
            if g.shape[1] > MAX_DIM:
                raise ValueError(f"dimension must be at most {MAX_DIM}")
        g.setflags(write=False)
        object.__setattr__(self, "generators", g)
        object.__setattr__(self, "dim", g.shape[1])

    @classmethod
    def origin(cls, dim: int) -> "Zonotope":
        return cls(np.zeros((0, dim)), dim)

    @property
    def n_generators(self) -> int:
        return self.generators.shape[0]

    def __add__(self, other: "Zonotope") -> "Zonotope":
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimension {other.dim} does not match {self.dim}")
        return Zonotope(np.vstack([self.generators, other.generators]), self.dim)

    def scaled(self, alpha: float) -> "Zonotope":
        if alpha < 0:
            raise ValueError("only nonnegative scalings keep the generator form")
        return Zonotope(alpha * self.generators, self.dim)

    def merged(self) -> "Zonotope":
        """Combine generators that are exactly equal and drop zero ones.

        Equal generators are positively collinear, so the support function is
        unchanged; this only shrinks the representation.
        """
        g = self.generators
        keep = np.any(g != 0.0, axis=1)
        g = g[keep]
        if g.shape[0] == 0:
            return Zonotope.origin(self.dim)
        uniq, inverse, counts = np.unique(g, axis=0, return_inverse=True, return_counts=True)
        return Zonotope(uniq * counts[:, None], self.dim)

    def __repr__(self):
        return f"Zonotope({self.generators.tolist()})"


@dataclass(frozen=True, eq=False)
class VPolytope:
    """Convex hull of a nonempty list of vertices."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.size == 0:
            raise ValueError("a V-polytope needs at least one vertex")
        if v.ndim == 1:
            v = v.reshape(1, -1)
        if not np.all(np.isfinite(v)):
            raise ValueError("vertex entries must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]


ConvexSet = Union[Segment, Zonotope, VPolytope]


# ---------------------------------------------------------------- support

def support_segment(u, s: Segment) -> float:
    u = np.asarray(u, dtype=float)
    _check_dim(u, s.dim)
    return float(max(float(np.dot(u, s.endpoint)), 0.0))


def support_zonotope(u, z: Zonotope) -> float:
    u = np.asarray(u, dtype=float)
    _check_dim(u, z.dim)
    # left-to-right sum for reproducibility
    total = 0.0
    for p in positive_part(z.generators @ u):
        total += float(p)
    return total


def support_polytope(u, p: VPolytope) -> float:
    u = np.asarray(u, dtype=float)
    _check_dim(u, p.dim)
    return float(np.max(p.vertices @ u))


def support(u, s: ConvexSet) -> float:
    if isinstance(s, Segment):
        return support_segment(u, s)
    if isinstance(s, Zonotope):
        return support_zonotope(u, s)
    if isinstance(s, VPolytope):
        return support_polytope(u, s)
    raise TypeError(f"unsupported set type {type(s).__name__}")


# ---------------------------------------------------------------- grids

@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """Unit directions sampling the dual unit sphere.

    ``angular_gap`` bounds the angle from any unit vector to its nearest grid
    direction.
    """

    directions: np.ndarray
    angular_gap: float
    label: str = ""

    def __post_init__(self):
        d = np.array(self.directions, dtype=float)
        if d.ndim != 2 or d.shape[0] == 0:
            raise ValueError("directions must be a nonempty 2-D array")
        norms = np.linalg.norm(d, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise ValueError("grid directions must be unit vectors")
        if d.shape[1] > 1 and not self.angular_gap > 0:
            raise ValueError("angular_gap must be positive")
        d.setflags(write=False)
        object.__setattr__(self, "directions", d)

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def __len__(self) -> int:
        return self.directions.shape[0]

    def same_as(self, other: "DirectionGrid") -> bool:
        return self is other or (
            self.directions.shape == other.directions.shape
            and self.angular_gap == other.angular_gap
            and np.array_equal(self.directions, other.directions)
        )

    @property
    def chord_error(self) -> float:
        """Largest Euclidean distance from a unit vector to the grid."""
        return 2.0 * math.sin(self.angular_gap / 2.0)


FIBONACCI_GAP_CONSTANT = 2.4
FIBONACCI_SAFETY = 1.5


def fibonacci_sphere(m: int, d: int) -> np.ndarray:
    """Deterministic quasi-uniform points on S^{d-1}.

    For d = 3 this is the classical golden-angle spiral.  For d > 3 the same
    spiral is generalised with one irrational rotation per extra angle and
    the points are mapped through hyperspherical coordinates.
    """
    i = np.arange(m, dtype=float) + 0.5
    if d == 3:
        z = 1.0 - 2.0 * i / m
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    # d > 3: Kronecker sequence in the cube, mapped by normalising Gaussians
    # through the inverse normal CDF (deterministic, no RNG state).
    from scipy.special import ndtri

    alphas = np.sqrt(np.array([p for p in _first_primes(d)], dtype=float)) % 1.0
    cube = (i[:, None] * alphas[None, :]) % 1.0
    pts = ndtri(np.clip(cube, 1e-12, 1 - 1e-12))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _first_primes(n: int) -> list[int]:
    out: list[int] = []
    k = 2
    while len(out) < n:
        if all(k % p for p in out):
            out.append(k)
        k += 1
    return out


def default_grid_size(d: int) -> int:
    if d == 1:
        return 2
    if d == 2:
        return 720
    return 2000


def make_grid(d: int, m: int | None = None) -> DirectionGrid:
    """Deterministic direction grid for R^d.

    d = 1 gives {+1, -1} (exact); d = 2 gives ``m`` equally spaced angles with
    gap pi/m; d >= 3 gives ``m`` Fibonacci points with gap 1.5 * 2.4 / sqrt(m),
    a heuristic estimate.
    """
    if d < 1 or d > MAX_DIM:
        raise ValueError(f"dimension must be in [1, {MAX_DIM}]")
    if d == 1:
        return DirectionGrid(np.array([[1.0], [-1.0]]), 0.0, "d1")
    m = default_grid_size(d) if m is None else int(m)
    if m < 3:
        raise ValueError("a grid needs at least 3 directions for d >= 2")
    if d == 2:
        theta = 2.0 * math.pi * np.arange(m) / m
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
        return DirectionGrid(dirs, math.pi / m, f"circle{m}")
    dirs = fibonacci_sphere(m, d)
    gap = min(math.pi, FIBONACCI_SAFETY * FIBONACCI_GAP_CONSTANT / math.sqrt(m))
    return DirectionGrid(dirs, gap, f"fib{m}")


# ---------------------------------------------------------------- embedding

@dataclass(frozen=True, eq=False)
class SupportVector:
    """A convex set's support function sampled on ``grid``."""

    grid: DirectionGrid
    values: np.ndarray
    radius_bound: float

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size != len(self.grid):
            raise ValueError("one support value per grid direction is required")
        if not np.all(np.isfinite(v)):
            raise ValueError("support values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def scaled(self, alpha: float) -> "SupportVector":
        if alpha < 0:
            raise ValueError("support vectors form a cone: alpha must be >= 0")
        return SupportVector(self.grid, alpha * self.values, alpha * self.radius_bound)


def _zonotope_support_values(gens: np.ndarray, dirs: np.ndarray, chunk: int = 4096) -> np.ndarray:
    out = np.zeros(dirs.shape[0])
    # fixed chunk order keeps the reduction reproducible
    for start in range(0, gens.shape[0], chunk):
        block = gens[start:start + chunk]
        out += positive_part(block @ dirs.T).sum(axis=0)
    return out


def embed(s: ConvexSet, grid: DirectionGrid) -> SupportVector:
    if s.dim != grid.dim:
        raise DimensionMismatch(f"set dimension {s.dim} does not match grid dimension {grid.dim}")
    dirs = grid.directions
    if isinstance(s, Segment):
        values = positive_part(dirs @ s.endpoint)
        radius = float(np.linalg.norm(s.endpoint))
    elif isinstance(s, Zonotope):
        values = _zonotope_support_values(s.generators, dirs)
        radius = float(np.sum(np.linalg.norm(s.generators, axis=1)))
    elif isinstance(s, VPolytope):
        values = np.max(s.vertices @ dirs.T, axis=0)
        radius = float(np.max(np.linalg.norm(s.vertices, axis=1)))
    else:
        raise TypeError(f"unsupported set type {type(s).__name__}")
    return SupportVector(grid, values, radius)


def _same_grid(a: SupportVector, b: SupportVector) -> None:
    if not a.grid.same_as(b.grid):
        raise GridMismatch("support vectors live on different direction grids")


def minkowski_add(a: SupportVector, b: SupportVector) -> SupportVector:
    _same_grid(a, b)
    return SupportVector(a.grid, a.values + b.values, a.radius_bound + b.radius_bound)


def convex_union(a: SupportVector, b: SupportVector) -> SupportVector:
    """Support vector of the closed convex hull of the union."""
    _same_grid(a, b)
    return SupportVector(a.grid, np.maximum(a.values, b.values), max(a.radius_bound, b.radius_bound))


def hausdorff_grid(a: SupportVector, b: SupportVector) -> tuple[float, float]:
    """Grid Hausdorff distance and an additive error bound.

    The true distance lies in ``[distance, distance + error_bound]``; the bound
    uses the Lipschitz estimate |s(u, A) - s(v, A)| <= |A| * ||u - v||.
    """
    _same_grid(a, b)
    distance = float(np.max(np.abs(a.values - b.values)))
    error_bound = (a.radius_bound + b.radius_bound) * a.grid.chord_error
    return distance, error_bound


# ---------------------------------------------------------------- exact distances

def point_segment_distance(p, x) -> float:
    """Euclidean distance from point ``p`` to conv{0, x}."""
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    xx = float(np.dot(x, x))
    if xx == 0.0:
        return float(np.linalg.norm(p))
    lam = min(max(float(np.dot(p, x)) / xx, 0.0), 1.0)
    return float(np.linalg.norm(p - lam * x))


def hausdorff_segments(x, y) -> float:
    """Exact Hausdorff distance between conv{0, x} and conv{0, y}.

    The distance to a convex set is convex along a segment, so each one-sided
    excess is attained at an endpoint; the shared endpoint 0 contributes 0.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.size != y.size:
        raise DimensionMismatch(f"dimension {x.size} does not match {y.size}")
    return max(point_segment_distance(x, y), point_segment_distance(y, x))


def set_norm(s: ConvexSet) -> float:
    """sup of ||x|| over the set.

    Exact for segments and polytopes.  For zonotopes the maximum sits at a
    vertex sum_{k in F} g_k, so it is found by subset enumeration when there
    are at most ``EXACT_NORM_MAX_GENERATORS`` distinct generators; otherwise
    the upper bound sum ||g_k|| is returned (see :func:`zonotope_norm_bounds`).
    """
    if isinstance(s, Segment):
        return float(np.linalg.norm(s.endpoint))
    if isinstance(s, VPolytope):
        return float(np.max(np.linalg.norm(s.vertices, axis=1)))
    if isinstance(s, Zonotope):
        z = s.merged()
        if z.n_generators == 0:
            return 0.0
        if z.n_generators <= EXACT_NORM_MAX_GENERATORS:
            return _zonotope_vertex_norm(z.generators)
        return float(np.sum(np.linalg.norm(z.generators, axis=1)))
    raise TypeError(f"unsupported set type {type(s).__name__}")


def _zonotope_vertex_norm(gens: np.ndarray) -> float:
    n = gens.shape[0]
    bits = np.array(list(itertools.product((0.0, 1.0), repeat=n)))
    return float(np.max(np.linalg.norm(bits @ gens, axis=1)))


def zonotope_norm_bounds(z: Zonotope, grid: DirectionGrid | None = None) -> tuple[float, float]:
    """(lower, upper) bounds on the set-norm of a zonotope.

    The lower bound is the largest grid support value (a norm of a point of
    the set is at least any unit-direction support value); the upper bound is
    sum ||g_k||.
    """
    upper = float(np.sum(np.linalg.norm(z.generators, axis=1))) if z.n_generators else 0.0
    grid = make_grid(z.dim) if grid is None else grid
    lower = float(np.max(embed(z, grid).values)) if z.n_generators else 0.0
    return lower, upper
