"""Error metrics against the classical solution and center-point histograms."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .channel_flow import FlowParams
from .exceptions import FormatError
from .fixed_point import FixedPointFormat
from .samplers import SampleSet
from .selection import Strategy

__all__ = [
    "l2_error",
    "linf_error",
    "chebyshev_error",
    "ErrorRow",
    "ErrorSeries",
    "error_series",
    "center_index",
    "center_histogram",
    "CenterDistribution",
    "center_distribution",
    "errors_csv",
    "center_csv",
]


def _pair(q_sol, c_sol) -> tuple[np.ndarray, np.ndarray]:
    q = np.asarray(q_sol, dtype=np.float64).ravel()
    c = np.asarray(c_sol, dtype=np.float64).ravel()
    if q.shape != c.shape:
        raise ValueError(f"length mismatch: {q.size} vs {c.size}")
    return q, c


def l2_error(q_sol, c_sol) -> float:
    """Euclidean norm of the difference."""
    q, c = _pair(q_sol, c_sol)
    return float(np.linalg.norm(q - c))


def linf_error(q_sol, c_sol) -> float:
    """Absolute difference between the two maxima.

    For single-peaked profiles this tracks the error at the peak. It is not
    the max-norm of the difference; see ``chebyshev_error`` for that.
    """
    q, c = _pair(q_sol, c_sol)
    if q.size == 0:
        return 0.0
    return float(abs(np.max(q) - np.max(c)))


def chebyshev_error(q_sol, c_sol) -> float:
    """Largest absolute pointwise difference."""
    q, c = _pair(q_sol, c_sol)
    if q.size == 0:
        return 0.0
    return float(np.max(np.abs(q - c)))


@dataclass(frozen=True)
class ErrorRow:
    step: int
    l2: float
    linf: float
    chebyshev: float


@dataclass(frozen=True)
class ErrorSeries:
    """Per-step errors of one strategy's trajectory at one (Ngp, n)."""

    strategy: Strategy
    precision: int
    grid_points: int
    rows: tuple[ErrorRow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "rows", tuple(self.rows))
        for row in self.rows:
            if min(row.l2, row.linf, row.chebyshev) < 0 or not all(
                math.isfinite(x) for x in (row.l2, row.linf, row.chebyshev)
            ):
                raise ValueError(f"invalid error values at step {row.step}")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def l2(self) -> np.ndarray:
        return np.array([r.l2 for r in self.rows])

    @property
    def linf(self) -> np.ndarray:
        return np.array([r.linf for r in self.rows])

    @property
    def chebyshev(self) -> np.ndarray:
        return np.array([r.chebyshev for r in self.rows])


def error_series(
    quantum: Sequence[np.ndarray],
    classical: Sequence[np.ndarray],
    strategy: Strategy | str,
    precision: int,
    grid_points: int,
    first_step: int = 1,
) -> ErrorSeries:
    """Errors of matching full profiles (walls included), one row per step."""
    if len(quantum) != len(classical):
        raise ValueError("trajectories differ in length")
    rows = []
    for k, (q, c) in enumerate(zip(quantum, classical)):
        rows.append(ErrorRow(first_step + k, l2_error(q, c), linf_error(q, c), chebyshev_error(q, c)))
    return ErrorSeries(Strategy(strategy), precision, grid_points, tuple(rows))


def center_index(grid_points: int) -> tuple[int, bool]:
    """Grid index of the channel center and whether it lies exactly on the center.

    For an even number of points there is no center node and the lower of
    the two middle nodes is used.
    """
    if grid_points < 3:
        raise ValueError("grid_points must be >= 3")
    return (grid_points - 1) // 2, grid_points % 2 == 1


def center_histogram(samples: SampleSet, fmt: FixedPointFormat, params: FlowParams) -> list[tuple[float, int]]:
    """Occurrence-weighted histogram of the decoded center value, ascending."""
    count = params.interior_points
    n = fmt.precision
    if samples.num_variables != count * n:
        raise FormatError(f"states have {samples.num_variables} bits, expected {count} x {n}")
    grid_index, _ = center_index(params.grid_points)
    counts = _kernels.block_histogram(samples.codes, samples.occurrences, samples.num_variables, n, grid_index - 1)
    (levels,) = np.nonzero(counts)
    return [(math.ldexp(int(k), fmt.radix_position - n), int(counts[k])) for k in levels]


@dataclass(frozen=True)
class CenterDistribution:
    """Center-value histograms, one per time step."""

    grid_index: int
    exact_center: bool
    steps: tuple[int, ...] = ()
    histograms: tuple[tuple[tuple[float, int], ...], ...] = field(default=())

    def totals(self) -> list[int]:
        return [sum(c for _, c in h) for h in self.histograms]


def center_distribution(
    samples_per_step: Sequence[SampleSet],
    fmt: FixedPointFormat,
    params: FlowParams,
    first_step: int = 1,
) -> CenterDistribution:
    grid_index, exact = center_index(params.grid_points)
    hists = tuple(tuple(center_histogram(s, fmt, params)) for s in samples_per_step)
    steps = tuple(range(first_step, first_step + len(hists)))
    return CenterDistribution(grid_index, exact, steps, hists)


def _write(rows: list[list], header: list[str], path) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def errors_csv(series: Sequence[ErrorSeries], path=None) -> str:
    """``step, strategy, n, Ngp, l2, linf, chebyshev`` ordered by step then strategy."""
    rows = []
    for s in series:
        for r in s.rows:
            rows.append([r.step, s.strategy.value, s.precision, s.grid_points, repr(r.l2), repr(r.linf), repr(r.chebyshev)])
    order = {st: i for i, st in enumerate(Strategy)}
    rows.sort(key=lambda row: (row[0], order[Strategy(row[1])]))
    return _write(rows, ["step", "strategy", "n", "Ngp", "l2", "linf", "chebyshev"], path)


def center_csv(dists: dict[Strategy, CenterDistribution], path=None) -> str:
    """``step, strategy, value, occurrences`` ordered by step, strategy, then value."""
    rows = []
    for strategy, dist in dists.items():
        for step, hist in zip(dist.steps, dist.histograms):
            for value, occ in hist:
                rows.append([step, Strategy(strategy).value, value, occ])
    order = {st: i for i, st in enumerate(Strategy)}
    rows.sort(key=lambda row: (row[0], order[Strategy(row[1])], row[2]))
    rows = [[a, b, repr(float(c)), d] for a, b, c, d in rows]
    return _write(rows, ["step", "strategy", "value", "occurrences"], path)
