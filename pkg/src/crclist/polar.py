"""Polar transform, 5G frozen-set construction and encoding."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .gf2 import DimensionError, as_bits


def load_reliability_sequence(path: str | Path | None = None) -> np.ndarray:
    """Read a reliability sequence file: one index per line, least reliable first.

    Without ``path`` the bundled 1024-entry 5G NR sequence is returned.
    """
    if path is None:
        text = resources.files("crclist.data").joinpath("reliability_5g.txt").read_text()
    else:
        text = Path(path).read_text()
    seq = np.array([int(tok) for tok in text.split()], dtype=np.int64)
    if np.sort(seq).tolist() != list(range(seq.size)):
        raise ValueError("reliability sequence is not a permutation of 0..N-1")
    seq.setflags(write=False)
    return seq


@dataclass(frozen=True)
class PolarCodeSpec:
    N: int
    unfrozen: tuple[int, ...]

    def __post_init__(self):
        N = self.N
        if N < 1 or N & (N - 1):
            raise DimensionError(f"block length {N} is not a power of two")
        unf = tuple(sorted(int(i) for i in self.unfrozen))
        if len(set(unf)) != len(unf) or (unf and (unf[0] < 0 or unf[-1] >= N)):
            raise ValueError("unfrozen indices must be distinct and lie in [0, N)")
        object.__setattr__(self, "unfrozen", unf)

    @property
    def K(self) -> int:
        return len(self.unfrozen)

    @property
    def frozen_mask(self) -> np.ndarray:
        """True where the synthetic channel is frozen to zero."""
        mask = np.ones(self.N, dtype=bool)
        mask[list(self.unfrozen)] = False
        return mask


def construct_frozen_set(seq, N: int, K: int) -> PolarCodeSpec:
    seq = np.asarray(seq)
    if K > N:
        raise ValueError(f"K={K} exceeds N={N}")
    if N > seq.size:
        raise ValueError(f"sequence of length {seq.size} cannot build N={N}")
    restricted = seq[seq < N]
    unfrozen = restricted[restricted.size - K:] if K else restricted[:0]
    return PolarCodeSpec(N, tuple(int(i) for i in unfrozen))


def polar_transform(u) -> np.ndarray:
    """``u F^{(x)n}`` with kernel ``[[1, 0], [1, 1]]``, natural order."""
    x = as_bits(u).copy()
    N = x.size
    if N < 1 or N & (N - 1):
        raise DimensionError(f"length {N} is not a power of two")
    h = 1
    while h < N:
        x = x.reshape(-1, 2, h)
        x[:, 0, :] ^= x[:, 1, :]
        x = x.reshape(-1)
        h *= 2
    return x


def polar_encode(data, spec: PolarCodeSpec) -> np.ndarray:
    data = as_bits(data)
    if data.size != spec.K:
        raise DimensionError(f"expected {spec.K} data bits, got {data.size}")
    u = np.zeros(spec.N, dtype=np.uint8)
    u[list(spec.unfrozen)] = data
    return polar_transform(u)
