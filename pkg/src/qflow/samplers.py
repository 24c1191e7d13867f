"""Sample sets and the backends that produce them.

Two backends stand in for an annealer read batch:

* ``sample_exhaustive`` lists every state once (a ground-truth oracle);
* ``sample_annealing`` runs independent single-flip Metropolis chains under a
  geometric cooling schedule and counts how often each final state occurs.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from . import _kernels
from .exceptions import CapacityError, ConfigurationError
from .qubo import Qubo, energies_of_codes

__all__ = [
    "EXHAUSTIVE_CAP",
    "MAX_VARIABLES",
    "SampleSet",
    "SamplerConfig",
    "sample_exhaustive",
    "sample_annealing",
    "exhaustive_minimum",
    "gray_code_minimum",
    "default_schedule",
    "merge",
    "read_seed",
]

EXHAUSTIVE_CAP = 26
# states are packed into uint64 codes
MAX_VARIABLES = 64

_CHUNK_DRAWS = 1 << 20


def _unpack(codes: np.ndarray, m: int) -> np.ndarray:
    shifts = np.arange(m - 1, -1, -1, dtype=np.uint64)
    return ((codes[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Distinct states with energies and occurrence counts.

    Entries are sorted by energy, ties by lexicographic state order. States
    are stored as packed codes; ``states`` unpacks them to a bit matrix.
    """

    codes: np.ndarray
    energies: np.ndarray
    occurrences: np.ndarray
    num_variables: int

    def __post_init__(self):
        for name, dtype in (("codes", np.uint64), ("energies", np.float64), ("occurrences", np.int64)):
            arr = np.asarray(getattr(self, name), dtype=dtype)
            # a stride-0 occurrences view (all reads counted once) is kept as is
            if not (arr.flags.c_contiguous or arr.strides == (0,)):
                arr = np.ascontiguousarray(arr)
            if arr.flags.writeable:
                arr = arr.view()
                arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.codes.shape == self.energies.shape == self.occurrences.shape):
            raise ValueError("codes, energies and occurrences must have equal length")
        if not 0 <= self.num_variables <= MAX_VARIABLES:
            raise CapacityError(f"sample sets hold at most {MAX_VARIABLES} variables")
        if np.any(self.occurrences <= 0):
            raise ValueError("occurrences must be positive")

    @classmethod
    def from_codes(cls, qubo: Qubo, codes: np.ndarray, occurrences: np.ndarray | None = None) -> "SampleSet":
        """Aggregate raw codes (duplicates allowed) into a sorted sample set."""
        codes = np.asarray(codes, dtype=np.uint64)
        if occurrences is None:
            occurrences = np.ones(codes.size, dtype=np.int64)
        uniq, inverse = np.unique(codes, return_inverse=True)
        counts = np.zeros(uniq.size, dtype=np.int64)
        np.add.at(counts, inverse.ravel(), np.asarray(occurrences, dtype=np.int64))
        energies = energies_of_codes(qubo, uniq)
        return cls._sorted(uniq, energies, counts, qubo.num_variables)

    @classmethod
    def empty(cls, num_variables: int) -> "SampleSet":
        return cls(np.zeros(0, np.uint64), np.zeros(0), np.zeros(0, np.int64), num_variables)

    @classmethod
    def _sorted(cls, codes, energies, occurrences, m):
        order = np.lexsort((codes, energies))
        return cls(codes[order], energies[order], occurrences[order], m)

    @property
    def num_reads(self) -> int:
        return int(self.occurrences.sum())

    @property
    def states(self) -> np.ndarray:
        """Bit matrix of shape ``(len(self), num_variables)``."""
        return _unpack(self.codes, self.num_variables)

    def state(self, i: int) -> np.ndarray:
        return _unpack(self.codes[i : i + 1], self.num_variables)[0]

    @property
    def lowest_energy(self) -> float:
        return float(self.energies[0])

    def __len__(self) -> int:
        return self.codes.size

    def __iter__(self) -> Iterator[tuple[np.ndarray, float, int]]:
        for i in range(len(self)):
            yield self.state(i), float(self.energies[i]), int(self.occurrences[i])

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (
            self.num_variables == other.num_variables
            and np.array_equal(self.codes, other.codes)
            and np.array_equal(self.energies, other.energies)
            and np.array_equal(self.occurrences, other.occurrences)
        )

    __hash__ = None

    def truncated(self, limit: int) -> "SampleSet":
        """The ``limit`` lowest-energy entries."""
        return SampleSet(self.codes[:limit], self.energies[:limit], self.occurrences[:limit], self.num_variables)

    def to_csv(self, path=None, limit: int | None = None) -> str:
        """CSV with columns ``energy, occurrences, state``; returns the text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["energy", "occurrences", "state"])
        n = len(self) if limit is None else min(limit, len(self))
        m = self.num_variables
        for i in range(n):
            bits = format(int(self.codes[i]), f"0{m}b") if m else ""
            writer.writerow([repr(float(self.energies[i])), int(self.occurrences[i]), bits])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source, num_variables: int | None = None) -> "SampleSet":
        """Parse the CSV written by ``to_csv`` (a path or the text itself)."""
        text = Path(source).read_text() if isinstance(source, Path) else str(source)
        rows = list(csv.DictReader(io.StringIO(text)))
        if num_variables is None:
            num_variables = len(rows[0]["state"]) if rows else 0
        codes = np.array([int(r["state"], 2) if r["state"] else 0 for r in rows], dtype=np.uint64)
        energies = np.array([float(r["energy"]) for r in rows])
        occ = np.array([int(r["occurrences"]) for r in rows], dtype=np.int64)
        return cls._sorted(codes, energies, occ, num_variables)


@dataclass(frozen=True)
class SamplerConfig:
    """Annealing read batch settings.

    ``t0``/``t1`` default to the largest coefficient magnitude and a final
    temperature small enough to freeze the least significant bits (see
    ``default_schedule``). ``first_read`` offsets the per-read seed index so
    that split batches can be merged back into the undivided batch.
    """

    num_reads: int = 10000
    seed: int = 0
    t0: float | None = None
    t1: float | None = None
    sweeps: int = 1000
    first_read: int = 0

    def __post_init__(self):
        if self.num_reads < 1:
            raise ConfigurationError("num_reads must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        if self.sweeps < 1:
            raise ConfigurationError("sweeps must be >= 1")
        if self.first_read < 0:
            raise ConfigurationError("first_read must be non-negative")
        if self.t0 is not None and not self.t0 > 0:
            raise ConfigurationError("t0 must be positive")
        if self.t1 is not None and not self.t1 > 0:
            raise ConfigurationError("t1 must be positive")
        if self.t0 is not None and self.t1 is not None and not self.t1 < self.t0:
            raise ConfigurationError("t1 must be below t0")


def default_schedule(qubo: Qubo) -> tuple[float, float]:
    """Initial and final temperatures for ``qubo``.

    The start temperature is the largest coefficient magnitude, where almost
    every flip is accepted. The end temperature is ``1e-3 * t0`` or half the
    smallest significant coefficient, whichever is lower, so that the least
    significant bits of a fixed-point block are frozen by the last sweep. It
    never drops below ``1e-9 * t0``.
    """
    t0 = qubo.coefficient_scale()
    if t0 == 0.0:
        return 1.0, 1e-3
    mags = np.abs(qubo.linear)
    if qubo.quadratic:
        mags = np.concatenate([mags, np.abs(np.fromiter(qubo.quadratic.values(), dtype=np.float64))])
    significant = mags[mags > 1e-12 * t0]
    t1 = min(1e-3 * t0, 0.5 * float(significant.min()))
    return t0, max(t1, 1e-9 * t0)


def read_seed(seed: int, read_index: int) -> np.random.SeedSequence:
    """Seed sequence of read ``read_index`` under master ``seed``."""
    return np.random.SeedSequence(seed, spawn_key=(read_index,))


def sample_exhaustive(qubo: Qubo, cap: int = EXHAUSTIVE_CAP) -> SampleSet:
    """Every state once, sorted by energy."""
    m = qubo.num_variables
    if m > cap:
        raise CapacityError(
            f"{m} variables exceed the exhaustive cap of {cap}; use the annealing sampler instead"
        )
    energies = np.empty(1 << m)
    indptr, indices, data = qubo.lower_csr
    _kernels.enumerate_energies(m, qubo.linear, indptr, indices, data, energies)
    keys = _kernels.energy_sort_keys(energies, m)
    keys.sort()
    sorted_energies = _kernels.resolve_key_groups(keys, energies, m)
    return SampleSet(keys, sorted_energies, np.broadcast_to(np.int64(1), keys.shape), m)


def exhaustive_minimum(qubo: Qubo, cap: int = 40) -> tuple[float, np.ndarray]:
    """Exact ground-state energy and the first minimizing state, in O(M) memory."""
    m = qubo.num_variables
    if m > cap:
        raise CapacityError(f"{m} variables exceed the enumeration cap of {cap}")
    if m == 0:
        return 0.0, np.zeros(0, dtype=np.uint8)
    indptr, indices, data = qubo.lower_csr
    best, code = _kernels.enumerate_minimum(m, qubo.linear, indptr, indices, data)
    return float(best), _unpack(np.array([code], dtype=np.uint64), m)[0]


def gray_code_minimum(qubo: Qubo, cap: int = 40) -> tuple[float, np.ndarray]:
    """Ground state found by a Gray-code walk, energy re-evaluated exactly.

    The walk's running energy accumulates rounding, so among states whose
    energies agree to within that drift it may return any one. Use
    ``exhaustive_minimum`` when the exact argmin matters.
    """
    m = qubo.num_variables
    if m > cap:
        raise CapacityError(f"{m} variables exceed the enumeration cap of {cap}")
    if m == 0:
        return 0.0, np.zeros(0, dtype=np.uint8)
    code = _kernels.gray_code_minimum(m, qubo.linear, *qubo.adjacency_csr)
    codes = np.array([code], dtype=np.uint64)
    return float(energies_of_codes(qubo, codes)[0]), _unpack(codes, m)[0]


def sample_annealing(qubo: Qubo, cfg: SamplerConfig = SamplerConfig()) -> SampleSet:
    """Independent simulated-annealing reads aggregated into a sample set.

    Each read starts from uniformly random bits and performs ``cfg.sweeps``
    sequential single-flip Metropolis sweeps, the temperature falling
    geometrically from ``t0`` to ``t1``. Read ``r`` draws all of its random
    numbers from ``read_seed(cfg.seed, cfg.first_read + r)``, so the result
    does not depend on how reads are batched.
    """
    m = qubo.num_variables
    if m > MAX_VARIABLES:
        raise CapacityError(f"{m} variables exceed the packed-state limit of {MAX_VARIABLES}")
    if m == 0:
        return SampleSet(np.zeros(1, np.uint64), np.zeros(1), np.array([cfg.num_reads]), 0)
    d0, d1 = default_schedule(qubo)
    t0 = d0 if cfg.t0 is None else cfg.t0
    t1 = d1 if cfg.t1 is None else cfg.t1
    if not t1 < t0:
        raise ConfigurationError(f"final temperature {t1} must be below initial temperature {t0}")
    betas = 1.0 / np.geomspace(t0, t1, cfg.sweeps)
    adj = qubo.adjacency_csr

    chunk = max(1, min(cfg.num_reads, _CHUNK_DRAWS // (cfg.sweeps * m)))
    codes = np.empty(cfg.num_reads, dtype=np.uint64)
    # one reused buffer: fresh large allocations cost more than the draws
    states_buf = np.empty((chunk, m), dtype=np.uint8)
    uniforms_buf = np.empty((chunk, cfg.sweeps, m))
    for start in range(0, cfg.num_reads, chunk):
        stop = min(start + chunk, cfg.num_reads)
        states = states_buf[: stop - start]
        uniforms = uniforms_buf[: stop - start]
        for r in range(start, stop):
            rng = np.random.default_rng(read_seed(cfg.seed, cfg.first_read + r))
            states[r - start] = rng.integers(0, 2, size=m, dtype=np.uint8)
            rng.random(out=uniforms[r - start])
        _kernels.anneal_batch(states, uniforms, betas, qubo.linear, *adj)
        codes[start:stop] = _kernels.pack_codes(states)
    return SampleSet.from_codes(qubo, codes)


def merge(a: SampleSet, b: SampleSet) -> SampleSet:
    """Union of two read batches over the same variables, occurrences summed."""
    if a.num_variables != b.num_variables:
        raise ValueError(f"cannot merge {a.num_variables}-bit and {b.num_variables}-bit sample sets")
    codes = np.concatenate([a.codes, b.codes])
    energies = np.concatenate([a.energies, b.energies])
    occ = np.concatenate([a.occurrences, b.occurrences])
    uniq, first, inverse = np.unique(codes, return_index=True, return_inverse=True)
    counts = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(counts, inverse.ravel(), occ)
    return SampleSet._sorted(uniq, energies[first], counts, a.num_variables)
