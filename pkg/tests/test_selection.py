import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qflow.channel_flow import FlowParams, assemble_system, initial_profile
from qflow.exceptions import FormatError
from qflow.fixed_point import FixedPointFormat, decode_vector, expand_matrix, max_value
from qflow.qubo import build_qubo
from qflow.samplers import SampleSet, SamplerConfig, sample_annealing, sample_exhaustive
from qflow.selection import Strategy, mean_of_bits, parse_strategies, select, select_profile

from oracles import brute_force_lsq, channel_system

F2 = FixedPointFormat(2)


def make_set(codes, occ, m, energies=None):
    codes = np.asarray(codes, dtype=np.uint64)
    energies = np.arange(len(codes), dtype=float) if energies is None else energies
    return SampleSet(codes, energies, np.asarray(occ, dtype=np.int64), m)


def test_strategy_names():
    assert [s.value for s in Strategy] == ["lowest", "mean", "wmean"]
    assert parse_strategies("all") == tuple(Strategy)
    assert parse_strategies("wmean,lowest") == (Strategy.LOWEST, Strategy.WMEAN)
    with pytest.raises(ValueError):
        parse_strategies("median")


def test_single_entry_all_coincide():
    ss = make_set([0b1001], [7], 4)
    results = [select(ss, s, F2, 2).tolist() for s in Strategy]
    assert results == [[1.0, 0.5]] * 3


def test_two_state_means():
    ss = make_set([0b10, 0b01], [3, 1], 2)
    assert select(ss, "lowest", F2, 1).tolist() == [1.0]
    assert select(ss, "mean", F2, 1).tolist() == [0.75]
    assert select(ss, "wmean", F2, 1).tolist() == [0.875]


def test_dominant_zero_state():
    ss = make_set([0b00, 0b11], [9999, 1], 2)
    assert select(ss, "wmean", F2, 1)[0] == pytest.approx(0.00015, rel=1e-12)
    assert select(ss, "mean", F2, 1).tolist() == [0.75]


def test_errors():
    with pytest.raises(ValueError):
        select(SampleSet.empty(4), "lowest", F2, 2)
    with pytest.raises(FormatError):
        select(make_set([1], [1], 4), "mean", F2, 3)


def random_set(seed, m=12):
    rng = np.random.default_rng(seed)
    codes = np.unique(rng.integers(0, 1 << m, size=int(rng.integers(1, 60)))).astype(np.uint64)
    occ = rng.integers(1, 1000, size=codes.size)
    return make_set(codes, occ, m)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 12), (2, 6), (3, 4), (4, 3), (6, 2)]))
def test_decode_average_commutes(seed, shape):
    n, count = shape
    fmt = FixedPointFormat(n)
    ss = random_set(seed)
    decoded = np.array([decode_vector(s, fmt, count) for s in ss.states])
    for weighted, strategy in ((False, "mean"), (True, "wmean")):
        via_bits = mean_of_bits(ss, weighted).reshape(count, n) @ fmt.weights
        if weighted:
            via_values = ss.occurrences @ decoded / ss.num_reads
        else:
            via_values = decoded.mean(axis=0)
        got = select(ss, strategy, fmt, count)
        np.testing.assert_allclose(via_bits, via_values, rtol=0, atol=1e-12)
        np.testing.assert_allclose(got, via_values, rtol=0, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_weighted_mean_split_invariance(seed):
    ss = random_set(seed)
    k = int(ss.occurrences[0]) + 1
    # the same state listed twice with the count split between the entries
    codes = np.r_[ss.codes[:1], ss.codes]
    occ = np.r_[[k // 2], [k - k // 2], ss.occurrences[1:]]
    whole = make_set(ss.codes, np.r_[[k], ss.occurrences[1:]], 12)
    split = make_set(codes, occ, 12)
    assert select(split, "wmean", F2, 6).tolist() == select(whole, "wmean", F2, 6).tolist()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 50))
def test_equal_occurrences_means_agree(seed, k):
    ss = random_set(seed)
    flat = make_set(ss.codes, np.full(len(ss), k), 12)
    assert select(flat, "wmean", F2, 6).tolist() == select(flat, "mean", F2, 6).tolist()


def first_step_qubo(n):
    p = FlowParams(grid_points=5)
    sys_ = assemble_system(p, initial_profile(p))
    return p, build_qubo(expand_matrix(sys_.A, FixedPointFormat(n)), sys_.b)


def test_lowest_invariant_under_scaling():
    _, q = first_step_qubo(4)
    base = select(sample_exhaustive(q), "lowest", FixedPointFormat(4), 3)
    for factor in (1e-3, 0.7, 3.0, 1024.0):
        assert select(sample_exhaustive(q.scaled(factor)), "lowest", FixedPointFormat(4), 3).tolist() == base.tolist()


def test_profile_from_exhaustive_matches_oracle():
    p, q = first_step_qubo(4)
    prof = select_profile(sample_exhaustive(q), "lowest", FixedPointFormat(4), p, time_index=1)
    A, b = channel_system(5, [0.0] * 3)
    _, winners = brute_force_lsq(A, b, 4)
    assert prof.values[0] == prof.values[-1] == 0.0
    assert prof.interior.tolist() == decode_vector(winners[0], FixedPointFormat(4), 3).tolist()
    assert prof.interior.tolist() == [0.125, 0.125, 0.125]


@pytest.mark.parametrize("strategy", ["mean", "wmean"])
def test_means_stay_in_range(strategy):
    p, q = first_step_qubo(4)
    fmt = FixedPointFormat(4)
    ss = sample_annealing(q, SamplerConfig(num_reads=500, seed=2, sweeps=100))
    prof = select_profile(ss, strategy, fmt, p)
    assert prof.values[0] == prof.values[-1] == 0.0
    assert np.all(prof.interior >= 0) and np.all(prof.interior <= max_value(fmt))
