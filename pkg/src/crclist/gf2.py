"""Bit-block algebra over GF(2).

Bit blocks are plain ``uint8`` numpy arrays holding 0/1 symbols, index 0 being
the first transmitted bit. For the heavy kernels (enumeration, weight
counting) blocks are packed into ``uint64`` words, bit ``i`` living in word
``i // 64`` at position ``i % 64``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class DimensionError(ValueError):
    """Raised when operand lengths do not agree."""


class NonLinearEncoderError(ValueError):
    """Raised when an encoder handed to :func:`derive_generator` is not linear."""


def as_bits(b, length: int | None = None) -> np.ndarray:
    """Validate and convert ``b`` to a 1-D uint8 array of 0/1 symbols."""
    arr = np.asarray(b)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-D bit block, got shape {arr.shape}")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bit blocks may only contain 0 and 1")
    arr = arr.astype(np.uint8, copy=False)
    if length is not None and arr.size != length:
        raise DimensionError(f"expected {length} bits, got {arr.size}")
    return arr


def bits_from_str(s: str) -> np.ndarray:
    """``"1011"`` -> array([1, 0, 1, 1])."""
    s = s.replace(" ", "")
    return as_bits([int(c) for c in s])


def bits_to_str(b) -> str:
    return "".join(str(int(x)) for x in b)


def weight(b) -> int:
    """Hamming weight of a bit block."""
    return int(np.count_nonzero(as_bits(b)))


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack the last axis of a 0/1 array into little-endian uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    n_words = max(1, (n + 63) // 64)
    padded = np.zeros(bits.shape[:-1] + (n_words * 64,), dtype=np.uint8)
    padded[..., :n] = bits
    by = np.packbits(padded, axis=-1, bitorder="little")
    return by.view("<u8").astype(np.uint64, copy=False)


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    by = words.view(np.uint8)
    return np.unpackbits(by, axis=-1, bitorder="little")[..., :n]


def bits_to_int(b) -> int:
    """Read a bit block as an integer with bit 0 as the most significant bit."""
    v = 0
    for x in as_bits(b):
        v = (v << 1) | int(x)
    return v


def int_to_bits(v: int, length: int) -> np.ndarray:
    """Inverse of :func:`bits_to_int`."""
    if v < 0 or v >> length:
        raise ValueError(f"{v} does not fit in {length} bits")
    return np.array([(v >> (length - 1 - i)) & 1 for i in range(length)], dtype=np.uint8)


def bits_to_hex(b) -> str:
    """Hex rendering of a bit block, bit 0 first (most significant)."""
    b = as_bits(b)
    pad = (-b.size) % 4
    v = bits_to_int(np.concatenate([b, np.zeros(pad, np.uint8)]))
    return format(v, "0{}x".format((b.size + pad) // 4))


def hex_to_bits(s: str, length: int) -> np.ndarray:
    pad = (-length) % 4
    v = int(s, 16)
    return int_to_bits(v, length + pad)[:length]


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """``k x n`` generator matrix; row ``i`` is the codeword of unit message ``e_i``."""

    rows: np.ndarray
    packed: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.uint8)
        if rows.ndim != 2:
            raise DimensionError("generator rows must form a 2-D array")
        if rows.shape[0] > rows.shape[1]:
            raise DimensionError(f"k={rows.shape[0]} exceeds n={rows.shape[1]}")
        rows = rows.copy()
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        packed = pack_bits(rows)
        packed.setflags(write=False)
        object.__setattr__(self, "packed", packed)

    @property
    def k(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def encode(self, m) -> np.ndarray:
        return gf2_matvec(self, m)

    def __eq__(self, other):
        return isinstance(other, GeneratorMatrix) and np.array_equal(self.rows, other.rows)

    __hash__ = None


def gf2_matvec(G: GeneratorMatrix, m) -> np.ndarray:
    """Codeword ``m G`` over GF(2): XOR of the rows selected by ``m``."""
    m = as_bits(m)
    if m.size != G.k:
        raise DimensionError(f"message has {m.size} bits, generator expects {G.k}")
    if G.k == 0:
        return np.zeros(G.n, dtype=np.uint8)
    return (m.astype(np.int64) @ G.rows.astype(np.int64) & 1).astype(np.uint8)


def derive_generator(
    encoder: Callable[[np.ndarray], np.ndarray],
    k: int,
    n: int,
    *,
    n_checks: int = 100,
    seed: int = 0,
) -> GeneratorMatrix:
    """Build the generator matrix of a linear encoder by probing unit messages.

    The result is spot-checked against ``n_checks`` random messages; any
    disagreement means ``encoder`` is not linear over GF(2).
    """
    zero = as_bits(encoder(np.zeros(k, dtype=np.uint8)))
    if zero.size != n:
        raise DimensionError(f"encoder produced {zero.size} bits, expected {n}")
    if zero.any():
        raise NonLinearEncoderError("encoder maps the zero message to a nonzero word")
    rows = np.zeros((k, n), dtype=np.uint8)
    for i in range(k):
        e = np.zeros(k, dtype=np.uint8)
        e[i] = 1
        rows[i] = as_bits(encoder(e), n)
    G = GeneratorMatrix(rows)
    rng = np.random.default_rng(seed)
    for _ in range(n_checks):
        m = rng.integers(0, 2, k, dtype=np.uint8)
        if not np.array_equal(as_bits(encoder(m)), gf2_matvec(G, m)):
            raise NonLinearEncoderError("encoder is not additive over GF(2)")
    return G
