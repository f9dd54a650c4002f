import numpy as np
import pytest

from gaugeset.partitions import (
    ConstantGauge,
    DepthExceeded,
    MeasurableSet,
    PartitionTooLarge,
    PowerFloorGauge,
    StepGauge,
    TaggedPartition,
    adversarial_tags,
    cousin_items,
    cousin_partition,
    gauge_min_le,
    is_delta_fine,
    piece_index,
    uniform_partition,
)
from gaugeset.functions import DerivativePathological


def test_gauges_reject_nonpositive_values():
    with pytest.raises(ValueError):
        ConstantGauge(0.0)
    with pytest.raises(ValueError):
        StepGauge([0.5], [0.1, -0.1])
    with pytest.raises(ValueError):
        PowerFloorGauge(0.5, 1.0, 0.0)


def test_power_floor_uses_floor_only_at_zero():
    g = PowerFloorGauge(0.5, 1.0, 1e-6)
    assert g(0.0) == 1e-6
    assert g(0.5) == pytest.approx(0.25)
    assert g(1e-9) == pytest.approx(5e-10)


def test_piece_index_left_piece_rule():
    bp = np.array([0.5])
    assert piece_index(bp, 0.5) == 0
    assert piece_index(bp, 0.5000001) == 1


def test_gauge_min_le():
    assert gauge_min_le(ConstantGauge(0.1), ConstantGauge(0.2))
    assert not gauge_min_le(ConstantGauge(0.3), StepGauge([0.5], [0.5, 0.2]))


def test_is_delta_fine_examples():
    p = uniform_partition(2, "mid")
    assert is_delta_fine(p, ConstantGauge(0.6))
    assert not is_delta_fine(p, ConstantGauge(0.2))
    single = TaggedPartition([0.0], [1.0], [0.0])
    assert not is_delta_fine(single, PowerFloorGauge(0.5, 1.0, 1e-6))


def test_cousin_constant_gauge():
    p = cousin_partition(ConstantGauge(0.3))
    assert is_delta_fine(p, ConstantGauge(0.3))
    assert p.mesh <= 0.5


def test_cousin_step_gauge_right_piece_is_short():
    gauge = StepGauge([0.5], [0.5, 0.05])
    p = cousin_partition(gauge)
    assert is_delta_fine(p, gauge)
    # 0.5 itself belongs to the left piece, so only items with a > 0.5 or a tag in (0.5, 1] are short
    right = (p.a > 0.5) | (p.tags > 0.5)
    assert np.any(right)
    assert np.all(p.lengths[right] < 0.1)


def test_cousin_power_floor_tags_zero():
    gauge = PowerFloorGauge(0.5, 1.0, 1e-6)
    p = cousin_partition(gauge, perron=True)
    assert is_delta_fine(p, gauge)
    assert p.a[0] == 0.0 and p.tags[0] == 0.0


def test_cousin_free_tags_are_fine():
    gauge = StepGauge([0.25, 0.7], [0.01, 0.2, 0.003])
    p = cousin_partition(gauge, perron=False)
    assert not p.perron
    assert is_delta_fine(p, gauge)


def test_cousin_depth_and_size_limits():
    with pytest.raises(DepthExceeded):
        cousin_partition(ConstantGauge(1e-6), max_depth=5)
    with pytest.raises(PartitionTooLarge):
        cousin_items(ConstantGauge(1e-4), True, 60, 0.0, 1.0, max_items=100)


def test_cousin_items_subinterval_cover():
    a, b, t = cousin_items(ConstantGauge(0.01), True, 60, 0.2, 0.3)
    assert a[0] == 0.2 and b[-1] == 0.3
    assert np.array_equal(a[1:], b[:-1])


def test_uniform_partition_examples():
    p = uniform_partition(1, "mid")
    assert p.to_rows() == [(0.0, 1.0, 0.5)]
    assert np.array_equal(uniform_partition(4, "left").tags, [0.0, 0.25, 0.5, 0.75])
    assert is_delta_fine(uniform_partition(10, "mid"), ConstantGauge(0.11))


def test_partition_validation():
    with pytest.raises(ValueError):
        TaggedPartition([0.0, 0.6], [0.5, 1.0], [0.2, 0.7])
    with pytest.raises(ValueError):
        TaggedPartition([0.0, 0.5], [0.5, 1.0], [0.7, 0.7], perron=True)
    assert not TaggedPartition([0.0, 0.5], [0.5, 1.0], [0.7, 0.7], perron=False).perron


def test_adversarial_tags_examples():
    p = uniform_partition(4)
    assert np.array_equal(adversarial_tags(p, lambda t: np.ones_like(t)).tags, p.a)
    q = adversarial_tags(uniform_partition(2), lambda t: t)
    assert np.array_equal(q.tags, [0.5, 1.0])


def test_adversarial_tags_raise_positive_part_sum():
    g = DerivativePathological()
    score = lambda t: np.maximum(g.eval_many(t)[:, 0], 0.0)
    p = uniform_partition(1000)
    q = adversarial_tags(p, score)
    assert np.sum(score(q.tags) * q.lengths) > np.sum(score(p.tags) * p.lengths)


def test_measurable_set():
    E = MeasurableSet(((0.5, 0.75), (0.0, 0.25)))
    assert E.measure == 0.5
    assert E.overlap(0.2, 0.6) == pytest.approx(0.15)
    assert MeasurableSet.empty().measure == 0.0
    assert MeasurableSet.unit().measure == 1.0
