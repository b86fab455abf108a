"""A complete code system: CRC outer code, inner TBCC or polar code, puncturing."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .convolutional import (
    REFERENCE_PUNCTURE,
    ConvCodeSpec,
    PuncturePattern,
    Trellis,
    apply_puncture,
    build_trellis,
    tb_encode,
)
from .crc import CrcPoly, crc_append, parse_hex_poly
from .gf2 import DimensionError, GeneratorMatrix, as_bits, derive_generator
from .polar import PolarCodeSpec, construct_frozen_set, load_reliability_sequence, polar_encode


@dataclass(frozen=True, eq=False)
class CodeSystem:
    """Message -> CRC -> inner code -> puncture.

    ``kind`` is ``"tbcc"`` (with ``conv``) or ``"polar"`` (with ``polar``).
    ``crc`` may be ``None`` for the bare inner code.
    """

    kind: str
    msg_len: int
    crc: CrcPoly | None = None
    conv: ConvCodeSpec | None = None
    polar: PolarCodeSpec | None = None
    puncture: PuncturePattern | None = None

    def __post_init__(self):
        if self.kind not in ("tbcc", "polar"):
            raise ValueError(f"unknown code kind {self.kind!r}")
        if self.kind == "tbcc" and self.conv is None:
            raise ValueError("a tbcc system needs a convolutional code")
        if self.kind == "polar":
            if self.polar is None:
                raise ValueError("a polar system needs a polar code")
            if self.polar.K != self.data_len:
                raise ValueError(
                    f"polar code carries {self.polar.K} bits but message+CRC is {self.data_len}"
                )
            if self.puncture is not None:
                raise ValueError("puncturing is only supported for tbcc systems")
        if self.msg_len < 1:
            raise ValueError("message length must be positive")
        if self.puncture is not None and self.puncture.pre_length != self.inner_n:
            raise ValueError(
                f"puncture pattern expects {self.puncture.pre_length} bits, inner code has {self.inner_n}"
            )

    @property
    def crc_width(self) -> int:
        return 0 if self.crc is None else self.crc.width

    @property
    def data_len(self) -> int:
        """Bits entering the inner encoder (message plus CRC)."""
        return self.msg_len + self.crc_width

    @property
    def inner_n(self) -> int:
        if self.kind == "tbcc":
            return self.data_len * self.conv.n_out
        return self.polar.N

    @property
    def n(self) -> int:
        return self.inner_n if self.puncture is None else self.puncture.post_length

    @property
    def rate(self) -> float:
        """Message bits per transmitted bit (CRC counted as overhead)."""
        return self.msg_len / self.n

    @cached_property
    def trellis(self) -> Trellis:
        if self.kind != "tbcc":
            raise AttributeError("polar systems have no trellis")
        return build_trellis(self.conv, self.data_len)

    def crc_word(self, msg) -> np.ndarray:
        msg = as_bits(msg, self.msg_len)
        return msg if self.crc is None else crc_append(msg, self.crc)

    def inner_encode(self, data) -> np.ndarray:
        data = as_bits(data, self.data_len)
        if self.kind == "tbcc":
            cw = tb_encode(data, self.conv)
            return cw if self.puncture is None else apply_puncture(cw, self.puncture)
        return polar_encode(data, self.polar)

    def encode(self, msg) -> np.ndarray:
        return self.inner_encode(self.crc_word(msg))

    def generator(self) -> GeneratorMatrix:
        """Generator of the full (message -> transmitted word) map."""
        return derive_generator(self.encode, self.msg_len, self.n)

    def inner_generator(self) -> GeneratorMatrix:
        return derive_generator(self.inner_encode, self.data_len, self.n)

    def with_crc(self, crc: CrcPoly | None) -> "CodeSystem":
        """Same inner code (and puncturing) protected by a different CRC of equal width."""
        if self.crc_width != (0 if crc is None else crc.width):
            raise DimensionError("replacement CRC must keep the inner dimension")
        return CodeSystem(self.kind, self.msg_len, crc, self.conv, self.polar, self.puncture)

    def with_puncture(self, puncture: PuncturePattern | None) -> "CodeSystem":
        return CodeSystem(self.kind, self.msg_len, self.crc, self.conv, self.polar, puncture)

    def describe(self) -> str:
        crc = "none" if self.crc is None else self.crc.hex
        return f"{self.kind} ({self.n},{self.msg_len}) crc={crc}"


def reference_tbcc_system(crc: str | None = "0xF69", punctured: bool = True, width: int = 11, k: int = 43) -> CodeSystem:
    """The memory-8 rate-1/12 CRC-TBCC over ``k`` trellis stages, optionally punctured.

    With ``crc=None`` this is the bare inner code with ``k`` message bits.
    """
    poly = None if crc is None else parse_hex_poly(crc, width)
    conv = ConvCodeSpec.reference_code()
    punc = PuncturePattern(REFERENCE_PUNCTURE, k * conv.n_out) if punctured else None
    return CodeSystem("tbcc", k - (width if poly else 0), poly, conv=conv, puncture=punc)


def reference_polar_system(crc: str | None = "0xD41", width: int = 11, K: int = 43, N: int = 512) -> CodeSystem:
    """CRC-polar system over the 5G-constructed ``(N, K)`` polar code."""
    poly = None if crc is None else parse_hex_poly(crc, width)
    spec = construct_frozen_set(load_reliability_sequence(), N, K)
    return CodeSystem("polar", K - (width if poly else 0), poly, polar=spec)
