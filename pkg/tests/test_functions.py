import math

import numpy as np
import pytest

from gaugeset.convex_geometry import hausdorff_segments
from gaugeset.functions import (
    DerivativePathological,
    ScalarWeight,
    StepVectorFunction,
    determined,
    eval_g,
    segment_gap,
    scale_by_bounded,
    selection,
    step_integral,
)

TWO_PIECE = StepVectorFunction([0.5], [[1.0, 0.0], [0.0, 2.0]])


def test_step_left_piece_rule():
    assert np.array_equal(TWO_PIECE(0.5), [1.0, 0.0])
    assert np.array_equal(TWO_PIECE(0.50001), [0.0, 2.0])


def test_step_validation():
    with pytest.raises(ValueError):
        StepVectorFunction([0.5], [[1.0, 0.0]])
    with pytest.raises(ValueError):
        StepVectorFunction([0.6, 0.4], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        eval_g(TWO_PIECE, 1.5)


def test_derivative_pathological_values():
    g = DerivativePathological()
    assert g(0.0)[0] == 0.0
    expected = 2 * math.sin(1) - 2 * math.cos(1)
    assert g(1.0)[0] == pytest.approx(expected, abs=1e-12)
    h = 1e-7
    F = DerivativePathological.primitive
    assert (F(1.0) - F(1.0 - h)) / h == pytest.approx(expected, abs=1e-5)
    assert expected == pytest.approx(0.602, abs=1e-3)


def test_determined_examples():
    zero = determined(StepVectorFunction.constant([0.0, 0.0]))
    assert np.array_equal(zero(0.3).endpoint, [0.0, 0.0])
    G = determined(StepVectorFunction.constant([1.0, -2.0]))
    assert np.array_equal(G(0.1).endpoint, G(0.9).endpoint)


def test_determined_support_matches_segment():
    rng = np.random.default_rng(2)
    g = StepVectorFunction([0.3, 0.6], rng.normal(size=(3, 2)))
    G = determined(g)
    us = rng.normal(size=(1000, 2))
    ts = rng.uniform(size=1000)
    for u, t in zip(us[:50], ts[:50]):
        many = G.support_many(u, np.array([t]))[0]
        assert many == max(float(u @ g(t)), 0.0)


def test_selection_examples():
    g = StepVectorFunction.constant([2.0, 0.0])
    one = selection(ScalarWeight.constant(1.0), g)
    assert np.array_equal(one(0.4), [2.0, 0.0])
    zero = selection(ScalarWeight.constant(0.0), g)
    assert np.array_equal(step_integral(zero), [0.0, 0.0])
    half = selection(ScalarWeight([0.5], [1.0, 0.0]), g)
    assert np.allclose(step_integral(half), [1.0, 0.0])


def test_selection_rejects_non_unit_weights():
    with pytest.raises(ValueError):
        selection(ScalarWeight.bounded([], [-1.0], 1.0), TWO_PIECE)


def test_scale_by_bounded_examples():
    base = step_integral(TWO_PIECE)
    c = 0.3
    assert np.allclose(step_integral(scale_by_bounded(ScalarWeight.constant(c), TWO_PIECE)), c * base)
    neg = ScalarWeight.bounded([], [-1.0], 1.0)
    assert np.allclose(step_integral(scale_by_bounded(neg, TWO_PIECE)), -base)
    cancel = ScalarWeight.bounded([0.5], [1.0, -1.0], 1.0)
    assert np.allclose(step_integral(scale_by_bounded(cancel, StepVectorFunction.constant([1.0]))), [0.0])


def test_segment_gap_examples():
    assert segment_gap(TWO_PIECE, 0.3, 0.3) == (0.0, 0.0)
    collinear = StepVectorFunction([0.5], [[2.0, 0.0], [1.0, 0.0]])
    assert segment_gap(collinear, 0.25, 0.75) == (1.0, 1.0)
    orth = StepVectorFunction([0.5], [[1.0, 0.0], [0.0, 1.0]])
    dh, norm = segment_gap(orth, 0.25, 0.75)
    assert dh == pytest.approx(hausdorff_segments([1, 0], [0, 1]))
    assert norm == pytest.approx(math.sqrt(2))
    assert dh <= norm
