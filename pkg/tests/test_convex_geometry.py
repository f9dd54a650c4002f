import math

import numpy as np
import pytest

from gaugeset.convex_geometry import (
    DimensionMismatch,
    DirectionGrid,
    GridMismatch,
    Segment,
    SupportVector,
    VPolytope,
    Zonotope,
    convex_union,
    embed,
    hausdorff_grid,
    hausdorff_segments,
    make_grid,
    minkowski_add,
    set_norm,
    support,
    support_polytope,
    support_segment,
    support_zonotope,
    zonotope_norm_bounds,
)

AXES_2D = DirectionGrid(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]), math.pi / 4, "axes")


def brute_segment_distance(x, y, n=10_000):
    s = np.linspace(0.0, 1.0, n)
    px, py = s[:, None] * np.asarray(x, float), s[:, None] * np.asarray(y, float)
    # distance from each point of one segment to the other segment, computed by projection
    def to_seg(p, e):
        ee = float(e @ e)
        lam = np.clip(p @ e / ee, 0.0, 1.0) if ee > 0 else np.zeros(len(p))
        return np.linalg.norm(p - lam[:, None] * e, axis=1)
    return max(to_seg(px, np.asarray(y, float)).max(), to_seg(py, np.asarray(x, float)).max())


# ---------------------------------------------------------------- support functions

def test_support_segment_examples():
    assert support_segment([1, 0], Segment([-2, 5])) == 0.0
    assert support_segment([0, 1], Segment([-2, 5])) == 5.0
    a = np.linspace(0.0, 1.0, 1001)
    brute = np.max(a * (0.6 * 5 + 0.8 * 0))
    assert support_segment([0.6, 0.8], Segment([5, 0])) == pytest.approx(brute, abs=1e-12)


def test_support_zonotope_examples():
    z = Zonotope(np.array([[0.5, 0.0], [0.0, 1.0]]), 2)
    a, b = np.meshgrid(np.linspace(0, 1, 51), np.linspace(0, 1, 51))
    brute = np.max(a * 0.5 + b * 1.0)
    assert support_zonotope([1, 1], z) == pytest.approx(brute, abs=1e-12) == 1.5
    assert support_zonotope([0.3, -2.0], Zonotope.origin(2)) == 0.0
    assert support_zonotope([-1, 0], Zonotope(np.array([[1.0, 0.0]]), 2)) == 0.0


def test_support_polytope_examples():
    square = VPolytope(np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=float))
    assert support_polytope([1, 0], square) == 1.0
    assert support_polytope([1, 1], square) == 2.0
    p = VPolytope(np.array([[2.0, 0.0], [0.0, 2.0]]))
    s = np.linspace(0, 1, 10_001)
    hull = s[:, None] * np.array([2.0, 0.0]) + (1 - s)[:, None] * np.array([0.0, 2.0])
    assert support_polytope([0.6, 0.8], p) == pytest.approx(np.max(hull @ [0.6, 0.8]), abs=1e-12)


def test_support_dispatch_and_dimension_check():
    assert support([1.0, 1.0], Segment([1.0, 2.0])) == 3.0
    with pytest.raises(DimensionMismatch):
        support_segment([1.0, 0.0, 0.0], Segment([1.0, 2.0]))


def test_zonotope_merge_keeps_support():
    rng = np.random.default_rng(3)
    gens = rng.normal(size=(5, 2))
    z = Zonotope(np.vstack([gens, gens[:2]]), 2)
    m = z.merged()
    assert m.n_generators == 5
    for u in rng.normal(size=(20, 2)):
        assert support_zonotope(u, m) == pytest.approx(support_zonotope(u, z), abs=1e-12)


# ---------------------------------------------------------------- grids and embedding

@pytest.mark.parametrize("d", [1, 2, 3, 8])
def test_make_grid_unit_directions(d):
    grid = make_grid(d)
    assert grid.dim == d
    assert np.allclose(np.linalg.norm(grid.directions, axis=1), 1.0)


def test_grid_gap_bounds_nearest_direction_2d_3d():
    rng = np.random.default_rng(0)
    for d in (2, 3):
        grid = make_grid(d)
        u = rng.normal(size=(2000, d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        cos = np.clip(np.max(u @ grid.directions.T, axis=1), -1, 1)
        assert np.max(np.arccos(cos)) <= grid.angular_gap + 1e-12


def test_embed_examples():
    sv = embed(Segment([1.0, 0.0]), AXES_2D)
    assert np.array_equal(sv.values, [1.0, 0.0, 0.0, 0.0])
    assert np.array_equal(embed(Zonotope.origin(2), AXES_2D).values, np.zeros(4))
    assert embed(Segment([3.0, 4.0]), make_grid(2)).radius_bound == 5.0


def test_minkowski_add_matches_zonotope():
    grid = make_grid(2)
    x = np.array([0.3, -1.2])
    a = minkowski_add(embed(Segment(x), grid), embed(Segment(x), grid))
    assert np.allclose(a.values, embed(Zonotope(np.array([x, x]), 2), grid).values, atol=1e-12)
    b = minkowski_add(embed(Segment([1, 0]), grid), embed(Segment([0, 1]), grid))
    assert np.allclose(b.values, embed(Zonotope(np.eye(2), 2), grid).values, atol=1e-12)
    zero = embed(Zonotope.origin(2), grid)
    assert np.array_equal(minkowski_add(b, zero).values, b.values)


def test_grid_mismatch_rejected():
    a = embed(Segment([1.0, 0.0]), make_grid(2, 10))
    b = embed(Segment([1.0, 0.0]), make_grid(2, 12))
    with pytest.raises(GridMismatch):
        minkowski_add(a, b)
    with pytest.raises(GridMismatch):
        hausdorff_grid(a, b)


def test_convex_union_examples():
    grid = make_grid(2)
    a = embed(Segment([0.4, 0.7]), grid)
    assert np.array_equal(convex_union(a, a).values, a.values)
    assert np.array_equal(convex_union(embed(Zonotope.origin(2), grid), a).values, a.values)
    grid45 = DirectionGrid(np.array([[1.0, 1.0]]) / math.sqrt(2), math.pi, "diag")
    u = convex_union(embed(Segment([1, 0]), grid45), embed(Segment([0, 1]), grid45))
    s = np.linspace(0, 1, 1001)
    hull = np.vstack([s[:, None] * [1, 0], s[:, None] * [0, 1]])
    assert u.values[0] == pytest.approx(np.max(hull @ grid45.directions[0]), abs=1e-12)


# ---------------------------------------------------------------- distances

def test_hausdorff_grid_examples():
    grid = make_grid(1)
    d, err = hausdorff_grid(embed(Segment([1.0]), grid), embed(Segment([2.0]), grid))
    assert (d, err) == (1.0, 0.0)
    grid2 = make_grid(2)
    a, b = embed(Segment([1, 0]), grid2), embed(Segment([0, 1]), grid2)
    d, err = hausdorff_grid(a, b)
    assert abs(d - hausdorff_segments([1, 0], [0, 1])) <= err
    assert hausdorff_grid(a, a)[0] == 0.0


def test_hausdorff_segments_examples():
    assert hausdorff_segments([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert hausdorff_segments([2.0, 0.0], [1.0, 0.0]) == 1.0
    assert hausdorff_segments([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0, abs=1e-12)
    assert brute_segment_distance([1, 0], [0, 1]) == pytest.approx(1.0, abs=1e-6)


def test_hausdorff_segments_against_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(50):
        d = int(rng.integers(1, 4))
        x, y = rng.normal(size=d), rng.normal(size=d)
        assert hausdorff_segments(x, y) == pytest.approx(brute_segment_distance(x, y), abs=1e-3)


# ---------------------------------------------------------------- norms

def test_set_norm_examples():
    assert set_norm(Segment([3.0, 4.0])) == 5.0
    assert set_norm(Zonotope(np.array([[1.0, 0.0], [1.0, 0.0]]), 2)) == 2.0
    square = VPolytope(np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=float))
    assert set_norm(square) == pytest.approx(math.sqrt(2))


def test_zonotope_norm_bounds_bracket_exact_norm():
    rng = np.random.default_rng(5)
    z = Zonotope(rng.normal(size=(6, 2)), 2)
    lo, hi = zonotope_norm_bounds(z, make_grid(2))
    assert lo - 1e-12 <= set_norm(z) <= hi + 1e-12


def test_support_vector_scaling_rejects_negative():
    sv = SupportVector(make_grid(1), [1.0, 0.0], 1.0)
    assert np.array_equal(sv.scaled(2.0).values, [2.0, 0.0])
    with pytest.raises(ValueError):
        sv.scaled(-1.0)
