"""Feedforward tail-biting convolutional codes, trellises and puncturing.

Tap polynomials are written in octal with the most significant bit acting on
the current input (``533`` = ``101011011``, taps g0..g8). The encoder state
before input ``u[t]`` is the integer ``u[t-1] u[t-2] ... u[t-v]`` read
most-significant first, so the register ``(u[t] << v) | state`` lines up bit for
bit with the octal tap value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gf2 import DimensionError, as_bits

REFERENCE_TAPS = ("533", "727", "765", "445", "715", "635", "563", "555", "737", "557", "677", "511")
REFERENCE_PUNCTURE = (47, 60, 129, 504)


class TailBitingError(ValueError):
    pass


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True)
class ConvCodeSpec:
    memory: int
    taps: tuple[int, ...]

    def __post_init__(self):
        v = self.memory
        if not 1 <= v <= 16:
            raise ValueError(f"memory must lie in [1, 16], got {v}")
        taps = tuple(int(t) for t in self.taps)
        if not taps:
            raise ValueError("need at least one generator polynomial")
        for t in taps:
            if t >> (v + 1):
                raise ValueError(f"tap {t:o} has more than {v + 1} coefficients")
            if not (t >> v) & 1 or not t & 1:
                raise ValueError(f"tap {t:o} must have g0 = g{v} = 1")
        object.__setattr__(self, "taps", taps)

    @classmethod
    def from_octal(cls, memory: int, taps: Sequence[str | int]) -> "ConvCodeSpec":
        return cls(memory, tuple(int(str(t), 8) for t in taps))

    @classmethod
    def reference_code(cls) -> "ConvCodeSpec":
        """The memory-8 rate-1/12 code used throughout the package defaults."""
        return cls.from_octal(8, REFERENCE_TAPS)

    @property
    def n_out(self) -> int:
        return len(self.taps)

    @property
    def num_states(self) -> int:
        return 1 << self.memory

    @property
    def octal(self) -> list[str]:
        return [format(t, "o") for t in self.taps]

    def branch_output(self, state: int, bit: int) -> int:
        """Output bits of one branch packed as an int, output 0 in the top bit."""
        reg = (bit << self.memory) | state
        out = 0
        for t in self.taps:
            out = (out << 1) | _parity(reg & t)
        return out

    def next_state(self, state: int, bit: int) -> int:
        return (bit << (self.memory - 1)) | (state >> 1)


def tb_start_state(msg, memory: int) -> int:
    """State preloaded for tail-biting: the last ``memory`` message bits."""
    msg = as_bits(msg)
    s = 0
    for i in range(1, memory + 1):
        s |= int(msg[-i]) << (memory - i)
    return s


def tb_encode(msg, spec: ConvCodeSpec) -> np.ndarray:
    msg = as_bits(msg)
    k, v, n_out = msg.size, spec.memory, spec.n_out
    if k < v:
        raise TailBitingError(f"message of {k} bits is shorter than memory {v}")
    taps = np.array([[(t >> (v - i)) & 1 for i in range(v + 1)] for t in spec.taps], dtype=np.int64)
    # window[t, i] = u[t - i mod k]
    idx = (np.arange(k)[:, None] - np.arange(v + 1)[None, :]) % k
    window = msg[idx].astype(np.int64)
    out = (window @ taps.T) & 1
    return out.reshape(-1).astype(np.uint8)


@dataclass(frozen=True)
class PuncturePattern:
    positions: tuple[int, ...]
    pre_length: int

    def __post_init__(self):
        pos = tuple(int(p) for p in self.positions)
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("puncture positions must be strictly increasing")
        if pos and (pos[0] < 0 or pos[-1] >= self.pre_length):
            raise ValueError("puncture position out of range")
        if len(pos) >= self.pre_length:
            raise ValueError("cannot puncture every position")
        object.__setattr__(self, "positions", pos)

    @property
    def post_length(self) -> int:
        return self.pre_length - len(self.positions)

    @property
    def keep_mask(self) -> np.ndarray:
        mask = np.ones(self.pre_length, dtype=bool)
        mask[list(self.positions)] = False
        return mask


def apply_puncture(cw, p: PuncturePattern) -> np.ndarray:
    cw = as_bits(cw)
    if cw.size != p.pre_length:
        raise DimensionError(f"codeword has {cw.size} bits, pattern expects {p.pre_length}")
    return cw[p.keep_mask]


def depuncture_llr(llrs, p: PuncturePattern) -> np.ndarray:
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.ndim != 1 or llrs.size != p.post_length:
        raise DimensionError(f"expected {p.post_length} LLRs, got {llrs.size}")
    out = np.zeros(p.pre_length, dtype=np.float64)
    out[p.keep_mask] = llrs
    return out


@dataclass(frozen=True, eq=False)
class Trellis:
    """Time-invariant trellis of a feedforward code unrolled over ``num_stages``.

    ``next_state[s, b]`` and ``outputs[s, b, j]`` describe the branch leaving
    state ``s`` on input ``b``. Each state ``ns`` is entered from
    ``prev_state[ns, 0/1]``, both on input ``ns >> (v - 1)``.
    """

    spec: ConvCodeSpec
    num_stages: int
    next_state: np.ndarray = field(repr=False)
    outputs: np.ndarray = field(repr=False)
    prev_state: np.ndarray = field(repr=False)

    @property
    def num_states(self) -> int:
        return self.spec.num_states

    @property
    def n_out(self) -> int:
        return self.spec.n_out

    @property
    def length(self) -> int:
        return self.num_stages * self.spec.n_out


def build_trellis(spec: ConvCodeSpec, num_stages: int) -> Trellis:
    S, v, n_out = spec.num_states, spec.memory, spec.n_out
    nxt = np.zeros((S, 2), dtype=np.int64)
    outs = np.zeros((S, 2, n_out), dtype=np.uint8)
    prev = np.zeros((S, 2), dtype=np.int64)
    for s in range(S):
        for b in (0, 1):
            nxt[s, b] = spec.next_state(s, b)
            word = spec.branch_output(s, b)
            outs[s, b] = [(word >> (n_out - 1 - j)) & 1 for j in range(n_out)]
    mask = S - 1
    for ns in range(S):
        base = (ns << 1) & mask
        prev[ns] = (base, base | 1)
    for a in (nxt, outs, prev):
        a.setflags(write=False)
    return Trellis(spec, num_stages, nxt, outs, prev)


def trellis_encode(msg, trellis: Trellis) -> np.ndarray:
    """Walk the trellis from the tail-biting start state; mirrors :func:`tb_encode`."""
    msg = as_bits(msg, trellis.num_stages)
    s = tb_start_state(msg, trellis.spec.memory)
    out = []
    for b in msg:
        out.append(trellis.outputs[s, b])
        s = trellis.next_state[s, b]
    if msg.size and s != tb_start_state(msg, trellis.spec.memory):
        raise TailBitingError("path did not return to its start state")
    return np.concatenate(out) if out else np.zeros(0, np.uint8)
