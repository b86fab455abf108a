"""Distance spectra: exhaustive Gray-order enumeration, bounded-weight
tail-biting trellis search, and the high-SNR list-decoding probe."""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import _spectrum_kernels as kern
from .convolutional import ConvCodeSpec, PuncturePattern, build_trellis, tb_encode, apply_puncture
from .gf2 import GeneratorMatrix, as_bits, bits_to_hex, int_to_bits, pack_bits
from .listdec import scl_decode
from .polar import PolarCodeSpec, polar_encode

logger = logging.getLogger(__name__)

MAX_ENUM_K = 34


class TractabilityError(RuntimeError):
    """Raised when an exhaustive enumeration exceeds the size guard."""


@dataclass(frozen=True, eq=False)
class WeightSpectrum:
    """Multiplicities ``A(d)`` for ``d = 0..n``.

    ``max_weight`` is the largest weight whose count is known to be exact;
    it equals ``n`` for a complete spectrum.
    """

    counts: np.ndarray
    k: int
    max_weight: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64).copy()
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def n(self) -> int:
        return self.counts.size - 1

    @property
    def complete(self) -> bool:
        return self.max_weight >= self.n

    def A(self, d: int) -> int:
        return int(self.counts[d]) if 0 <= d <= self.n else 0

    def as_dict(self, include_zero_counts: bool = False) -> dict[int, int]:
        idx = range(self.n + 1) if include_zero_counts else np.flatnonzero(self.counts)
        return {int(d): int(self.counts[d]) for d in idx if d <= self.max_weight}

    @property
    def d_min(self) -> int | None:
        nz = np.flatnonzero(self.counts[1 : self.max_weight + 1])
        return int(nz[0]) + 1 if nz.size else None

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        return (
            isinstance(other, WeightSpectrum)
            and self.k == other.k
            and self.max_weight == other.max_weight
            and np.array_equal(self.counts, other.counts)
        )

    __hash__ = None

    def truncated(self, max_weight: int) -> "WeightSpectrum":
        c = self.counts.copy()
        c[max_weight + 1 :] = 0
        return WeightSpectrum(c, self.k, min(max_weight, self.max_weight))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["d", "A"])
            for d, a in self.as_dict().items():
                w.writerow([d, a])

    @classmethod
    def from_csv(cls, path, n: int, k: int, max_weight: int | None = None) -> "WeightSpectrum":
        counts = np.zeros(n + 1, dtype=np.int64)
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                counts[int(row["d"])] = int(row["A"])
        return cls(counts, k, n if max_weight is None else max_weight)


@dataclass(frozen=True, eq=False)
class CodewordSet:
    """Low-weight codewords with the data words that produce them.

    ``data`` rows are the inner-encoder inputs; ``codewords`` rows are the
    corresponding (transmitted) words.
    """

    data: np.ndarray
    codewords: np.ndarray
    weight_bound: int

    @property
    def weights(self) -> np.ndarray:
        return self.codewords.sum(axis=1, dtype=np.int64)

    def __len__(self) -> int:
        return self.data.shape[0]

    def at_weight(self, d: int) -> "CodewordSet":
        sel = self.weights == d
        return CodewordSet(self.data[sel], self.codewords[sel], d)

    def up_to(self, d: int) -> "CodewordSet":
        sel = self.weights <= d
        return CodewordSet(self.data[sel], self.codewords[sel], min(d, self.weight_bound))

    def spectrum(self, k: int) -> WeightSpectrum:
        counts = np.bincount(self.weights, minlength=self.codewords.shape[1] + 1)
        counts[0] = 1
        return WeightSpectrum(counts, k, self.weight_bound)

    def write(self, path) -> None:
        """One ``hex_codeword weight`` pair per line, ordered by weight."""
        order = np.argsort(self.weights, kind="stable")
        with open(path, "w") as fh:
            for i in order:
                fh.write(f"{bits_to_hex(self.codewords[i])} {int(self.codewords[i].sum())}\n")


def _dedupe(data: np.ndarray, codewords: np.ndarray):
    _, idx = np.unique(np.packbits(codewords, axis=1), axis=0, return_index=True)
    idx.sort()
    return data[idx], codewords[idx]


# -- exhaustive enumeration ----------------------------------------------------


def _walk_chunk(args):
    packed, lo, hi, n, collect_max_w, cap = args
    hist = np.zeros(n + 1, dtype=np.int64)
    found = np.zeros(cap, dtype=np.int64)
    nf = kern.gray_walk(packed, lo, hi, hist, collect_max_w, found, 0)
    return hist, found[: min(nf, cap)], nf


def gray_enumerate(
    G: GeneratorMatrix,
    *,
    collect_max_weight: int = -1,
    collect_cap: int = 1 << 20,
    allow_large: bool = False,
    workers: int = 1,
    chunks: int | None = None,
    progress: Callable[[int, int], None] | None = None,
):
    """Walk all ``2^k`` messages in Gray order.

    Returns ``(spectrum, messages)`` where ``messages`` holds the row-selection
    integers (bit ``r`` = message bit ``r``) of every codeword with weight in
    ``1..collect_max_weight``.
    """
    k, n = G.k, G.n
    if k > MAX_ENUM_K and not allow_large:
        raise TractabilityError(f"2^{k} codewords exceeds the 2^{MAX_ENUM_K} guard")
    if k >= 63:
        raise TractabilityError("message index must fit in a signed 64-bit word")
    total = 1 << k
    if chunks is None:
        chunks = max(1, min(256, total >> 24))
    bounds = [total * i // chunks for i in range(chunks + 1)]
    packed = np.ascontiguousarray(G.packed) if k else np.zeros((0, 1), np.uint64)
    hist = np.zeros(n + 1, dtype=np.int64)
    found: list[np.ndarray] = []
    n_found = 0
    if k == 0:
        hist[0] = 1
        return WeightSpectrum(hist, 0, n), np.zeros(0, np.int64)
    jobs = [(packed, lo, hi, n, collect_max_weight, collect_cap) for lo, hi in zip(bounds, bounds[1:]) if hi > lo]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_walk_chunk, jobs))
    else:
        results = []
        for j, job in enumerate(jobs):
            results.append(_walk_chunk(job))
            if progress is not None:
                progress(j + 1, len(jobs))
    for h, f, nf in results:
        hist += h
        found.append(f)
        n_found += nf
    msgs = np.concatenate(found) if found else np.zeros(0, np.int64)
    if n_found > collect_cap:
        logger.warning("collected %d of %d low-weight messages", msgs.size, n_found)
    msgs = msgs[msgs != 0]
    return WeightSpectrum(hist, k, n), msgs


def full_spectrum_gray(G: GeneratorMatrix, *, allow_large: bool = False, workers: int = 1, progress=None) -> WeightSpectrum:
    """Exact weight distribution over all ``2^k`` codewords."""
    ws, _ = gray_enumerate(G, allow_large=allow_large, workers=workers, progress=progress)
    return ws


def messages_to_bits(msgs: Iterable[int], k: int) -> np.ndarray:
    """Row-selection integers -> message bit rows (bit ``r`` -> column ``r``)."""
    msgs = np.asarray(list(msgs) if not isinstance(msgs, np.ndarray) else msgs, dtype=np.int64)
    return ((msgs[:, None] >> np.arange(k)[None, :]) & 1).astype(np.uint8)


def naive_spectrum(G: GeneratorMatrix) -> WeightSpectrum:
    """Reference enumeration by direct re-encoding of every message."""
    k, n = G.k, G.n
    counts = np.zeros(n + 1, dtype=np.int64)
    rows = G.rows.astype(np.int64)
    for start in range(0, 1 << k, 4096):
        idx = np.arange(start, min(1 << k, start + 4096), dtype=np.int64)
        m = (idx[:, None] >> np.arange(k)[None, :]) & 1
        cw = (m @ rows) & 1
        counts += np.bincount(cw.sum(axis=1), minlength=n + 1)
    return WeightSpectrum(counts, k, n)


# -- tail-biting trellis search ------------------------------------------------


def _stage_weights(spec: ConvCodeSpec, k: int, puncture: PuncturePattern | None) -> tuple[np.ndarray, np.ndarray]:
    tr = build_trellis(spec, k)
    outs = tr.outputs.astype(np.int64)  # (S, 2, n_out)
    keep = np.ones(k * spec.n_out, dtype=np.int64) if puncture is None else puncture.keep_mask.astype(np.int64)
    keep = keep.reshape(k, spec.n_out)
    bw = np.einsum("sbj,tj->tsb", outs, keep)
    return np.ascontiguousarray(tr.next_state), np.ascontiguousarray(bw)


def bounded_weight_tb_search(
    spec: ConvCodeSpec,
    k: int,
    W: int,
    puncture: PuncturePattern | None = None,
    *,
    cap: int = 1 << 22,
):
    """All tail-biting codewords of weight ``<= W``.

    Returns ``(spectrum, codeword_set)``; the spectrum is exact for
    ``d <= W``. Codewords are counted once each even if the code maps
    several messages onto one word.
    """
    if W < 0:
        raise ValueError("weight cap must be non-negative")
    if k >= 63:
        raise ValueError("bounded search packs messages into 63 bits")
    nxt, bw = _stage_weights(spec, k, puncture)
    n = k * spec.n_out if puncture is None else puncture.post_length
    while True:
        hist = np.zeros(max(n, W) + 1, dtype=np.int64)
        msgs = np.zeros(cap, dtype=np.int64)
        wts = np.zeros(cap, dtype=np.int64)
        nf = kern.tb_bounded_search(nxt, bw, spec.memory, W, hist, msgs, wts, 0)
        if nf <= cap:
            break
        cap = nf
    msgs, wts = msgs[:nf], wts[:nf]
    hist = hist[: n + 1]
    nonzero = msgs != 0
    data = np.array([int_to_bits(int(m), k) for m in msgs[nonzero]], dtype=np.uint8).reshape(-1, k)
    if data.shape[0]:
        cws = np.array([tb_encode(d, spec) for d in data], dtype=np.uint8)
        if puncture is not None:
            cws = cws[:, puncture.keep_mask]
    else:
        cws = np.zeros((0, n), dtype=np.uint8)
    if hist[0] > 1:
        # a nonzero message maps to the zero word: count distinct codewords
        data, cws = _dedupe(data, cws)
        keep = cws.any(axis=1)
        data, cws = data[keep], cws[keep]
        hist = np.bincount(cws.sum(axis=1), minlength=n + 1).astype(np.int64)
        hist[0] = 1
    else:
        order = np.lexsort((msgs[nonzero], wts[nonzero]))
        data, cws = data[order], cws[order]
    spectrum = WeightSpectrum(hist, k, min(W, n))
    return spectrum, CodewordSet(data, cws, min(W, n))


# -- polar low-weight probe ------------------------------------------------------


def polar_low_weight_probe(spec: PolarCodeSpec, L: int, llr_magnitude: float = 1000.0) -> CodewordSet:
    """List-decode the noiseless all-zero word and keep every nonzero survivor.

    The heaviest weight class found is usually cut short by the list size, so
    the set's ``weight_bound`` is one below it.
    """
    rl = scl_decode(np.full(spec.N, float(llr_magnitude)), spec, L)
    data = rl.data
    cws = np.array([polar_encode(d, spec) for d in data], dtype=np.uint8).reshape(-1, spec.N)
    nz = cws.any(axis=1)
    data, cws = _dedupe(data[nz], cws[nz])
    order = np.argsort(cws.sum(axis=1), kind="stable")
    bound = int(cws.sum(axis=1).max()) - 1 if cws.shape[0] else 0
    return CodewordSet(data[order], cws[order], bound)


def cumulative_spectrum(ws: WeightSpectrum) -> np.ndarray:
    """``cum[d] = sum_{d' <= d} A(d')``."""
    return np.cumsum(ws.counts)
