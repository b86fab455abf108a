"""CRC generator polynomials, systematic append and divisibility check.

Polynomials use the 5G hex notation: the leading ``x^m`` coefficient is the
most significant bit of the hex value. Division is MSB-first: bit 0 of a
message is its highest-degree coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import DimensionError, as_bits, bits_to_int, int_to_bits

# Table of CRCs listed by the 5G NR channel-coding specification.
NR_CRCS = {
    "CRC24A": ("0x1864CFB", 24),
    "CRC24B": ("0x1800063", 24),
    "CRC24C": ("0x1B2B117", 24),
    "CRC16": ("0x11021", 16),
    "CRC11": ("0xE21", 11),
    "CRC6": ("0x61", 6),
}


class MalformedPolynomialError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CrcPoly:
    """Degree-``width`` generator polynomial stored as an integer incl. leading term."""

    width: int
    value: int

    def __post_init__(self):
        if self.width < 1:
            raise MalformedPolynomialError("CRC width must be at least 1")
        if self.value >> self.width != 1:
            raise MalformedPolynomialError(
                f"{self.value:#x} is not a degree-{self.width} polynomial"
            )

    @property
    def coeffs(self) -> np.ndarray:
        """Coefficients from ``x^m`` down to ``x^0``."""
        return int_to_bits(self.value, self.width + 1)

    @property
    def hex(self) -> str:
        return f"0x{self.value:X}"

    def __str__(self):
        return self.hex


def parse_hex_poly(text: str, m: int) -> CrcPoly:
    try:
        value = int(str(text), 16)
    except ValueError as exc:
        raise MalformedPolynomialError(f"not a hex polynomial: {text!r}") from exc
    if value >> m != 1:
        raise MalformedPolynomialError(
            f"{text} does not have its leading x^{m} coefficient as the top bit"
        )
    return CrcPoly(m, value)


def poly_mod(v: int, g: CrcPoly) -> int:
    """Remainder of the polynomial with coefficient bits ``v`` modulo ``g``."""
    m = g.width
    gv = g.value
    top = v.bit_length() - 1
    while top >= m:
        v ^= gv << (top - m)
        top = v.bit_length() - 1
    return v


def crc_parity(msg, g: CrcPoly) -> np.ndarray:
    msg = as_bits(msg)
    return int_to_bits(poly_mod(bits_to_int(msg) << g.width, g), g.width)


def crc_append(msg, g: CrcPoly) -> np.ndarray:
    msg = as_bits(msg)
    if msg.size < 1:
        raise DimensionError("cannot protect an empty message")
    return np.concatenate([msg, crc_parity(msg, g)])


def crc_check(data, g: CrcPoly) -> bool:
    data = as_bits(data)
    if data.size <= g.width:
        raise DimensionError(
            f"data of {data.size} bits is too short for a width-{g.width} CRC"
        )
    return poly_mod(bits_to_int(data), g) == 0


def candidate_polys(m: int) -> list[CrcPoly]:
    """All ``2^(m-1)`` polynomials ``x^m + ... + 1`` in increasing hex order."""
    if m == 1:
        return [CrcPoly(1, 0b11)]
    return [CrcPoly(m, (1 << m) | (mid << 1) | 1) for mid in range(1 << (m - 1))]


def parities(values: np.ndarray, nbits: int, g: CrcPoly) -> np.ndarray:
    """CRC parity (``v * x^m mod g``) of many ``nbits``-bit messages at once."""
    v = np.asarray(values, dtype=np.uint64)
    rem = np.zeros_like(v)
    mask = np.uint64((1 << g.width) - 1)
    low = np.uint64(g.value & ((1 << g.width) - 1))
    one = np.uint64(1)
    for i in range(nbits - 1, -1, -1):
        fb = ((rem >> np.uint64(g.width - 1)) & one) ^ ((v >> np.uint64(i)) & one)
        rem = (rem << one) & mask
        rem ^= fb * low
    return rem


def passes_many(values: np.ndarray, nbits: int, g: CrcPoly) -> np.ndarray:
    """Boolean mask: which ``nbits``-bit data words are divisible by ``g``.

    Each word carries message and parity together, bit ``nbits-1`` being the
    highest-degree coefficient (that is, bit 0 of the block).
    """
    m = g.width
    msg = np.asarray(values, dtype=np.uint64) >> np.uint64(m)
    par = np.asarray(values, dtype=np.uint64) & np.uint64((1 << m) - 1)
    return parities(msg, nbits - m, g) == par
