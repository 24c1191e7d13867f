"""Collapse a sample set into one real-valued solution."""

from __future__ import annotations

import enum
import math

import numpy as np

from . import _kernels
from .channel_flow import FlowParams, SolutionProfile
from .exceptions import FormatError
from .fixed_point import FixedPointFormat, decode_vector
from .samplers import SampleSet

__all__ = ["Strategy", "STRATEGIES", "parse_strategies", "select", "select_profile", "mean_of_bits"]


class Strategy(str, enum.Enum):
    """How a solution is read off a sample set.

    ``LOWEST`` decodes the minimum-energy state. ``MEAN`` averages the
    decoded distinct states with equal weight, ignoring how often each was
    read. ``WMEAN`` weights every state by its occurrence count.
    """

    LOWEST = "lowest"
    MEAN = "mean"
    WMEAN = "wmean"

    def __str__(self) -> str:
        return self.value


STRATEGIES = (Strategy.LOWEST, Strategy.MEAN, Strategy.WMEAN)


def parse_strategies(name: str) -> tuple[Strategy, ...]:
    """``'all'`` or a comma-separated list of strategy names."""
    if name == "all":
        return STRATEGIES
    chosen = {Strategy(part.strip()) for part in name.split(",") if part.strip()}
    if not chosen:
        raise ValueError("no strategy given")
    return tuple(s for s in STRATEGIES if s in chosen)


def _check(samples: SampleSet, fmt: FixedPointFormat, count: int) -> None:
    if len(samples) == 0:
        raise ValueError("cannot select from an empty sample set")
    if samples.num_variables != count * fmt.precision:
        raise FormatError(
            f"states have {samples.num_variables} bits, expected {count} x {fmt.precision}"
        )


def select(samples: SampleSet, strategy: Strategy | str, fmt: FixedPointFormat, count: int) -> np.ndarray:
    """Real vector of length ``count`` chosen from ``samples`` by ``strategy``.

    Means are accumulated over integer block codes, so the only rounding is
    the final division; the result is generally off the fixed-point lattice.
    """
    strategy = Strategy(strategy)
    _check(samples, fmt, count)
    if strategy is Strategy.LOWEST:
        return decode_vector(samples.state(0), fmt, count)

    m, n = samples.num_variables, fmt.precision
    if strategy is Strategy.MEAN:
        weights = np.broadcast_to(np.int64(1), samples.codes.shape)
        total = len(samples)
    else:
        weights = samples.occurrences
        total = samples.num_reads
    sums = _kernels.block_value_sums(samples.codes, weights, m, n, count)
    return np.array([math.ldexp(int(s) / total, fmt.radix_position - n) for s in sums])


def mean_of_bits(samples: SampleSet, weighted: bool) -> np.ndarray:
    """Average bit vector over the sample set (fractional bits)."""
    states = samples.states.astype(np.float64)
    if weighted:
        return samples.occurrences @ states / samples.num_reads
    return states.mean(axis=0)


def select_profile(
    samples: SampleSet,
    strategy: Strategy | str,
    fmt: FixedPointFormat,
    params: FlowParams,
    time_index: int = 0,
) -> SolutionProfile:
    """``select`` over the interior points with zero wall values attached."""
    interior = select(samples, strategy, fmt, params.interior_points)
    return SolutionProfile.from_interior(interior, time_index)
