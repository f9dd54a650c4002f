import math

import numpy as np
import pytest

from gaugeset.demos import (
    adversarial_positive_sums,
    demo_e_over_t,
    demo_orthonormal_H,
    fresh_basis_norm,
    set_roundtrip_case,
    h_norms,
    positive_first_tag,
)
from gaugeset.functions import StepVectorFunction
from gaugeset.partitions import ConstantGauge, StepGauge, TaggedPartition, cousin_partition, is_delta_fine, uniform_partition


def test_fresh_basis_norm_merges_shared_tags():
    assert fresh_basis_norm([0.1, 0.2], [3.0, 4.0]) == 5.0
    assert fresh_basis_norm([0.1, 0.1], [3.0, 4.0]) == 7.0


def test_e_over_t_right_tags_first_term_is_one():
    p = uniform_partition(10, "right")
    coeffs = p.lengths / p.tags
    assert coeffs[0] == pytest.approx(1.0)
    assert fresh_basis_norm(p.tags, coeffs) >= 1.0


def test_positive_first_tag_keeps_fineness():
    gauge = StepGauge([0.1], [0.01, 0.3])
    p = cousin_partition(gauge, perron=True)
    q, how = positive_first_tag(p, gauge)
    assert q is not None and q.tags[0] > 0
    assert is_delta_fine(q, gauge)
    assert how


def test_demo_e_over_t_random_gauges():
    rep = demo_e_over_t(trials=100, seed=0)
    assert rep.passed
    assert all(r["norm"] >= 1.0 for r in rep.rows if r["status"] == "ok")
    assert rep.observed >= 1.0


def test_demo_e_over_t_fixed_step_gauge():
    rep = demo_e_over_t(trials=20, gauge=StepGauge([0.3], [0.02, 0.1]), seed=1)
    assert rep.passed


def test_orthonormal_H_small_example():
    rep = demo_orthonormal_H(4, uniform_partition(16))
    assert rep.observed == pytest.approx(0.25, abs=1e-15)
    assert rep.passed


def test_orthonormal_H_n100():
    rep = demo_orthonormal_H(100, uniform_partition(1000))
    assert rep.observed == pytest.approx(math.sqrt(1000 * 1e-6), rel=1e-12)
    assert rep.observed <= 0.1


def test_orthonormal_H_preconditions():
    with pytest.raises(ValueError):
        demo_orthonormal_H(4, uniform_partition(1))
    shared = TaggedPartition([0.0, 0.1, 0.2], [0.1, 0.2, 1.0], [0.1, 0.1, 0.5])
    with pytest.raises(ValueError):
        demo_orthonormal_H(1, shared)


def test_h_norms_straddling_partition_still_bounded():
    # intervals crossing a cell boundary break the cell formula but not the bound
    p = uniform_partition(7)
    direct, cells, straddle = h_norms(2, p)
    assert straddle > 0
    assert direct <= 1 / math.sqrt(2)


def test_adversarial_sums_bounded_for_constant():
    g = StepVectorFunction.constant([0.7])
    level, last, rows = adversarial_positive_sums(g, max_level=6)
    assert level is None
    assert all(r["positive_sum"] <= 0.7 + 1e-12 for r in rows)
    assert all(r["fine"] for r in rows)


def test_set_roundtrip_case_constant_exact():
    row = set_roundtrip_case(StepVectorFunction.constant([1.0, -1.0]))
    assert row["pass"]
    assert row["mcshane_dH"] <= row["mcshane_err_bound"] + 1e-6


def test_set_roundtrip_case_scalar_pm_one():
    row = set_roundtrip_case(StepVectorFunction([0.5], [1.0, -1.0]))
    assert row["pass"]
    assert row["mcshane_dH"] < 1e-6


def test_demo_report_serialization():
    rep = demo_orthonormal_H(4, uniform_partition(16))
    assert rep.csv_row()[0] == "orthonormal_H"
    assert rep.csv_row()[3] == "true"
    assert rep.text().startswith("[orthonormal_H] PASS")
    assert rep.rows_csv().splitlines()[0].startswith("n,")


def test_random_gauge_draws_are_reproducible():
    from gaugeset.demos import random_gauge
    a = [random_gauge(np.random.default_rng(5)).describe() for _ in range(2)]
    assert a[0] == a[1]
    assert isinstance(random_gauge(np.random.default_rng(0), kinds=("constant",)), ConstantGauge)
