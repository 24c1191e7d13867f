"""Unsigned fixed-point encoding of reals as bit vectors.

A value is stored with ``precision`` bits ``q_1 .. q_n`` (most significant
first) and a radix position ``j0``::

    x = sum_{j=1..n} 2**(j0 - j) * q_j

so the representable values are the integer multiples of ``2**(j0 - n)``
between 0 and ``2**j0 * (1 - 2**-n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import EncodingRangeError, FormatError

__all__ = [
    "FixedPointFormat",
    "max_value",
    "decode_scalar",
    "encode_scalar",
    "decode_vector",
    "encode_vector",
    "expand_matrix",
]


@dataclass(frozen=True)
class FixedPointFormat:
    """Bit count and radix position of an unsigned fixed-point code."""

    precision: int
    radix_position: int = 1

    def __post_init__(self):
        if int(self.precision) != self.precision or self.precision < 1:
            raise FormatError(f"precision must be a positive integer, got {self.precision!r}")
        if int(self.radix_position) != self.radix_position:
            raise FormatError(f"radix_position must be an integer, got {self.radix_position!r}")

    @property
    def weights(self) -> np.ndarray:
        """Bit weights ``2**(j0 - j)`` for ``j = 1..n``, most significant first."""
        j = np.arange(1, self.precision + 1)
        return np.ldexp(1.0, self.radix_position - j)

    @property
    def resolution(self) -> float:
        """Weight of the least significant bit."""
        return math.ldexp(1.0, self.radix_position - self.precision)

    @property
    def max_value(self) -> float:
        return max_value(self)

    @property
    def levels(self) -> int:
        """Number of distinct representable values."""
        return 1 << self.precision


def max_value(fmt: FixedPointFormat) -> float:
    """Largest representable value, ``2**j0 * (1 - 2**-n)``."""
    return math.ldexp((1 << fmt.precision) - 1, fmt.radix_position - fmt.precision)


def _as_bits(bits: Sequence[int] | np.ndarray) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise FormatError(f"bit vector must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise FormatError("bit vector entries must be 0 or 1")
    return arr.astype(np.uint8)


def _block_integer(block: np.ndarray) -> int:
    value = 0
    for bit in block:
        value = (value << 1) | int(bit)
    return value


def decode_scalar(bits: Sequence[int] | np.ndarray, fmt: FixedPointFormat) -> float:
    """Real value of one ``precision``-bit block.

    >>> decode_scalar([1, 1], FixedPointFormat(2))
    1.5
    """
    arr = _as_bits(bits)
    if arr.size != fmt.precision:
        raise FormatError(f"expected {fmt.precision} bits, got {arr.size}")
    # integer code scaled by a power of two: exact in double precision
    return math.ldexp(_block_integer(arr), fmt.radix_position - fmt.precision)


def encode_scalar(x: float, fmt: FixedPointFormat, rounding: bool = False) -> np.ndarray:
    """Bit block of ``x`` in ``fmt``.

    By default the code is truncated: the result decodes to the largest
    representable value not above ``x``. With ``rounding=True`` the nearest
    representable value is taken instead (halves round up, saturating at the
    top code).

    Raises:
        EncodingRangeError: if ``x`` is negative, not finite, or above
            ``max_value(fmt)``.
    """
    x = float(x)
    top = max_value(fmt)
    if not math.isfinite(x) or x < 0.0 or x > top:
        raise EncodingRangeError(f"{x!r} is outside the representable range [0, {top!r}]")
    scaled = math.ldexp(x, fmt.precision - fmt.radix_position)
    code = math.floor(scaled + 0.5) if rounding else math.floor(scaled)
    code = min(int(code), (1 << fmt.precision) - 1)
    n = fmt.precision
    return np.array([(code >> (n - 1 - k)) & 1 for k in range(n)], dtype=np.uint8)


def decode_vector(q: Sequence[int] | np.ndarray, fmt: FixedPointFormat, count: int) -> np.ndarray:
    """Decode ``count`` consecutive blocks of ``q`` into a real vector."""
    arr = _as_bits(q)
    if arr.size != count * fmt.precision:
        raise FormatError(
            f"expected {count} x {fmt.precision} = {count * fmt.precision} bits, got {arr.size}"
        )
    if count == 0:
        return np.zeros(0)
    return arr.reshape(count, fmt.precision).astype(np.float64) @ fmt.weights


def encode_vector(u: Sequence[float] | np.ndarray, fmt: FixedPointFormat, rounding: bool = False) -> np.ndarray:
    """Concatenate ``encode_scalar`` over the entries of ``u``."""
    blocks = [encode_scalar(x, fmt, rounding=rounding) for x in np.asarray(u, dtype=float).ravel()]
    if not blocks:
        return np.zeros(0, dtype=np.uint8)
    return np.concatenate(blocks)


def expand_matrix(A: np.ndarray, fmt: FixedPointFormat) -> np.ndarray:
    """Replace every column of ``A`` by ``precision`` weighted copies.

    Column ``c`` of ``A`` becomes columns ``c*n .. c*n + n - 1`` of the
    result, scaled by the bit weights, so that ``A @ decode_vector(q) ==
    expand_matrix(A) @ q`` for every bit vector ``q``.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    m, k = A.shape
    expanded = A[:, :, None] * fmt.weights[None, None, :]
    if not np.all(np.isfinite(expanded)):
        raise OverflowError("expanded matrix overflows double precision")
    return expanded.reshape(m, k * fmt.precision)
