import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qflow.analysis import (
    center_csv,
    center_distribution,
    center_histogram,
    center_index,
    chebyshev_error,
    error_series,
    errors_csv,
    l2_error,
    linf_error,
)
from qflow.channel_flow import FlowParams
from qflow.fixed_point import FixedPointFormat
from qflow.qubo import Qubo
from qflow.samplers import SampleSet, sample_exhaustive
from qflow.selection import Strategy

vectors = st.integers(1, 8).flatmap(
    lambda k: st.tuples(
        st.lists(st.floats(-1e6, 1e6), min_size=k, max_size=k),
        st.lists(st.floats(-1e6, 1e6), min_size=k, max_size=k),
    )
)


def test_l2_examples():
    assert l2_error([1, 2], [1, 2]) == 0.0
    assert l2_error([1, 0], [0, 0]) == 1.0
    assert l2_error([0.5, 0.5, 0.5], [0.1, 0.2, 0.3]) == pytest.approx(math.sqrt(0.29), rel=1e-15)


def test_linf_examples():
    assert linf_error([0, 2, 0], [0, 2, 0]) == 0.0
    assert linf_error([0, 2, 0], [0, 1, 0]) == 1.0
    q, c = [0, 3, 0, 3, 0], [0, 1, 2, 1, 0]
    assert linf_error(q, c) == 1.0
    assert chebyshev_error(q, c) == 2.0


def test_length_mismatch():
    with pytest.raises(ValueError):
        l2_error([1, 2], [1])


@given(vectors)
def test_metric_inequalities(pair):
    q, c = pair
    l2, cheb = l2_error(q, c), chebyshev_error(q, c)
    assert l2 >= cheb * (1 - 1e-12) >= 0
    assert linf_error(q, c) >= 0
    assert (l2 == 0) == (q == c)
    assert (linf_error(q, c) == 0) == (max(q) == max(c))


def test_center_index():
    assert center_index(5) == (2, True)
    assert center_index(9) == (4, True)
    assert center_index(6) == (2, False)


def test_zero_state_histogram():
    ss = SampleSet(np.zeros(1, np.uint64), np.zeros(1), np.array([10000]), 6)
    assert center_histogram(ss, FixedPointFormat(2), FlowParams(grid_points=5)) == [(0.0, 10000)]


def test_exhaustive_n2_has_four_bins():
    ss = sample_exhaustive(Qubo(np.linspace(-1, 1, 6)))
    hist = center_histogram(ss, FixedPointFormat(2), FlowParams(grid_points=5))
    assert hist == [(0.0, 16), (0.5, 16), (1.0, 16), (1.5, 16)]


def test_distribution_conserves_reads(rng):
    p = FlowParams(grid_points=6)
    sets = []
    for _ in range(2):
        codes = np.unique(rng.integers(0, 1 << 12, size=30)).astype(np.uint64)
        occ = rng.integers(1, 50, size=codes.size)
        sets.append(SampleSet(codes, np.zeros(codes.size), occ, 12))
    dist = center_distribution(sets, FixedPointFormat(3), p)
    assert dist.steps == (1, 2)
    assert dist.totals() == [s.num_reads for s in sets]
    assert not dist.exact_center and dist.grid_index == 2
    for hist in dist.histograms:
        values = [v for v, _ in hist]
        assert values == sorted(values)
        assert all(v / FixedPointFormat(3).resolution == int(v / FixedPointFormat(3).resolution) for v in values)


def test_center_reads_lower_middle_block():
    # Ngp=6 has interior grid indices 1..4; the center block is index 2
    fmt = FixedPointFormat(2)
    code = np.uint64(0b00_11_00_00)
    ss = SampleSet(np.array([code]), np.zeros(1), np.array([1]), 8)
    assert center_histogram(ss, fmt, FlowParams(grid_points=6)) == [(1.5, 1)]


def test_csv_layout():
    s1 = error_series([[0, 1, 0]], [[0, 0.5, 0]], "mean", 4, 3)
    s0 = error_series([[0, 2, 0]], [[0, 0.5, 0]], "lowest", 4, 3)
    text = errors_csv([s1, s0])
    assert text.splitlines() == [
        "step,strategy,n,Ngp,l2,linf,chebyshev",
        "1,lowest,4,3,1.5,1.5,1.5",
        "1,mean,4,3,0.5,0.5,0.5",
    ]
    ss = SampleSet(np.array([1, 0], np.uint64), np.zeros(2), np.array([2, 3]), 2)
    dist = center_distribution([ss], FixedPointFormat(2), FlowParams(grid_points=3))
    assert center_csv({Strategy.LOWEST: dist}).splitlines() == [
        "step,strategy,value,occurrences",
        "1,lowest,0.0,3",
        "1,lowest,0.5,2",
    ]


def test_error_series_fields():
    s = error_series([[0, 1, 0], [0, 1, 0]], [[0, 1, 0], [0, 2, 0]], Strategy.WMEAN, 2, 3)
    assert len(s) == 2
    assert s.l2.tolist() == [0.0, 1.0]
    assert s.strategy is Strategy.WMEAN
