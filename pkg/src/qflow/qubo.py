"""Binary least squares as a QUBO.

Expanding ``||Ad q - b||**2`` and using ``q_j**2 == q_j`` for bits gives

    ||Ad q - b||**2 = sum_j v_j q_j + sum_{j<k} w_jk q_j q_k + ||b||**2

with ``v_j = sum_i Ad_ij (Ad_ij - 2 b_i)`` and ``w_jk = 2 sum_i Ad_ij Ad_ik``.
The constant is kept on the model as ``offset``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping

import numpy as np

from . import _kernels
from .exceptions import FormatError

__all__ = [
    "Qubo",
    "EnergyRecord",
    "COUPLING_CUTOFF",
    "build_qubo",
    "eval_energy",
    "logical_problem_size",
    "embeddable_hint",
    "DEFAULT_EMBEDDING_BUDGET",
    "dump_qubo",
    "load_qubo",
    "write_qubo",
    "read_qubo",
]

COUPLING_CUTOFF = 1e-15

# Largest logical size treated as embeddable. The reference hardware embedded
# 42 logical bits but found no embedding for 56.
DEFAULT_EMBEDDING_BUDGET = 54


@dataclass(frozen=True, eq=False)
class Qubo:
    """``f(q) = sum_j linear[j] q_j + sum_{j<k} quadratic[(j, k)] q_j q_k``.

    Indices are 0-based. ``offset`` is the constant dropped from the energy,
    so ``f(q) + offset`` is the squared residual for least-squares models.
    """

    linear: np.ndarray
    quadratic: Mapping[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        linear = np.array(self.linear, dtype=np.float64).ravel()
        linear.setflags(write=False)
        object.__setattr__(self, "linear", linear)
        m = linear.size
        quad = {}
        for (j, k), w in sorted(self.quadratic.items()):
            j, k = int(j), int(k)
            if not 0 <= j < k < m:
                raise ValueError(f"coupling key {(j, k)} is not strictly upper-triangular in {m} variables")
            quad[(j, k)] = float(w)
        object.__setattr__(self, "quadratic", quad)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def num_variables(self) -> int:
        return self.linear.size

    def __len__(self) -> int:
        return self.num_variables

    def __eq__(self, other):
        if not isinstance(other, Qubo):
            return NotImplemented
        return (
            np.array_equal(self.linear, other.linear)
            and self.quadratic == other.quadratic
            and self.offset == other.offset
        )

    __hash__ = None

    @cached_property
    def lower_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Row k lists the couplings (j, k) with j < k in ascending j."""
        return _csr(self.num_variables, [(k, j, w) for (j, k), w in self.quadratic.items()])

    @cached_property
    def adjacency_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric neighbour lists, both directions of every coupling."""
        entries = []
        for (j, k), w in self.quadratic.items():
            entries.append((j, k, w))
            entries.append((k, j, w))
        return _csr(self.num_variables, entries)

    @cached_property
    def fingerprint(self) -> bytes:
        """Byte string identifying the coefficients exactly."""
        keys = np.array(list(self.quadratic.keys()), dtype=np.int64).tobytes()
        vals = np.array(list(self.quadratic.values()), dtype=np.float64).tobytes()
        return b"|".join([self.linear.tobytes(), keys, vals, np.float64(self.offset).tobytes()])

    def to_dense(self) -> np.ndarray:
        """Upper-triangular matrix with ``linear`` on the diagonal."""
        Q = np.diag(self.linear.copy())
        for (j, k), w in self.quadratic.items():
            Q[j, k] = w
        return Q

    def scaled(self, factor: float) -> "Qubo":
        return Qubo(
            self.linear * factor,
            {key: w * factor for key, w in self.quadratic.items()},
            self.offset * factor,
        )

    def coefficient_scale(self) -> float:
        """Largest coefficient magnitude over linear and quadratic terms."""
        mags = [float(np.max(np.abs(self.linear)))] if self.num_variables else [0.0]
        if self.quadratic:
            mags.append(max(abs(w) for w in self.quadratic.values()))
        return max(mags)


def _csr(m, entries):
    entries = sorted(entries)
    indptr = np.zeros(m + 1, dtype=np.int64)
    indices = np.empty(len(entries), dtype=np.int64)
    data = np.empty(len(entries), dtype=np.float64)
    for p, (row, col, w) in enumerate(entries):
        indptr[row + 1] += 1
        indices[p] = col
        data[p] = w
    np.cumsum(indptr, out=indptr)
    return indptr, indices, data


@dataclass(frozen=True)
class EnergyRecord:
    state: np.ndarray
    energy: float


def build_qubo(Ad: np.ndarray, b: np.ndarray, cutoff: float = COUPLING_CUTOFF) -> Qubo:
    """QUBO whose energy plus offset equals ``||Ad q - b||**2``.

    Couplings with magnitude below ``cutoff`` are dropped.
    """
    Ad = np.asarray(Ad, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).ravel()
    if Ad.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {Ad.shape}")
    if Ad.shape[0] != b.size:
        raise ValueError(f"matrix has {Ad.shape[0]} rows but rhs has {b.size} entries")
    linear = np.sum(Ad * (Ad - 2.0 * b[:, None]), axis=0)
    gram = 2.0 * (Ad.T @ Ad)
    rows, cols = np.triu_indices(Ad.shape[1], k=1)
    vals = gram[rows, cols]
    keep = np.abs(vals) >= cutoff
    quadratic = {(int(j), int(k)): float(w) for j, k, w in zip(rows[keep], cols[keep], vals[keep])}
    return Qubo(linear, quadratic, float(b @ b))


def _check_state(qubo: Qubo, q) -> np.ndarray:
    arr = np.asarray(q)
    if arr.ndim != 1 or arr.size != qubo.num_variables:
        raise FormatError(f"state must have {qubo.num_variables} bits, got shape {arr.shape}")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise FormatError("state entries must be 0 or 1")
    return np.ascontiguousarray(arr, dtype=np.uint8)


def eval_energy(qubo: Qubo, q) -> float:
    """Energy ``f(q)`` of a single bit vector."""
    arr = _check_state(qubo, q)
    indptr, indices, data = qubo.lower_csr
    return float(_kernels.energy_bits(arr, qubo.linear, indptr, indices, data))


def energies_of_codes(qubo: Qubo, codes: np.ndarray) -> np.ndarray:
    """Exact energies of packed states (same arithmetic as ``eval_energy``)."""
    indptr, indices, data = qubo.lower_csr
    codes = np.ascontiguousarray(codes, dtype=np.uint64)
    return _kernels.energy_codes(codes, qubo.num_variables, qubo.linear, indptr, indices, data)


def logical_problem_size(grid_points: int, precision: int) -> int:
    """Binary variables needed for the interior unknowns, ``(Ngp - 2) * n``."""
    if grid_points < 3 or precision < 1:
        raise ValueError("need grid_points >= 3 and precision >= 1")
    return (grid_points - 2) * precision


def embeddable_hint(size: int, budget: int = DEFAULT_EMBEDDING_BUDGET) -> bool:
    """Crude stand-in for an embedding search: accept sizes up to ``budget``."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    return size <= budget


def dump_qubo(qubo: Qubo) -> str:
    """Plain-text triplet form: ``M offset`` then ``j j v_j`` and ``j k w_jk`` (1-based)."""
    lines = [f"{qubo.num_variables} {float(qubo.offset)!r}"]
    for j, v in enumerate(qubo.linear, start=1):
        lines.append(f"{j} {j} {float(v)!r}")
    for (j, k), w in qubo.quadratic.items():
        lines.append(f"{j + 1} {k + 1} {w!r}")
    return "\n".join(lines) + "\n"


def load_qubo(text: str) -> Qubo:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise FormatError("missing 'M offset' header")
    m = int(rows[0][0])
    offset = float(rows[0][1])
    linear = np.zeros(m)
    quadratic = {}
    for fields in rows[1:]:
        if len(fields) != 3:
            raise FormatError(f"expected 'j k value', got {' '.join(fields)!r}")
        j, k, value = int(fields[0]) - 1, int(fields[1]) - 1, float(fields[2])
        if not (0 <= j < m and 0 <= k < m):
            raise FormatError(f"index out of range in {' '.join(fields)!r}")
        if j == k:
            linear[j] = value
        else:
            quadratic[(min(j, k), max(j, k))] = value
    return Qubo(linear, quadratic, offset)


def write_qubo(qubo: Qubo, path) -> None:
    Path(path).write_text(dump_qubo(qubo))


def read_qubo(path) -> Qubo:
    return load_qubo(Path(path).read_text())
