"""Union bounds on frame error rate for BPSK over AWGN."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import erfc

from .spectrum import WeightSpectrum


@dataclass(frozen=True)
class BoundQuery:
    rate: float
    ebno_db: float
    d_max: int | None = None

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError(f"rate must lie in (0, 1], got {self.rate}")
        if self.d_max is not None and self.d_max < 0:
            raise ValueError("d_max must be non-negative")


def qfunc(x):
    """Gaussian tail probability."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def pairwise_error_prob(d, R: float, ebno_db: float):
    """Probability of mistaking a codeword for one at Hamming distance ``d``."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    snr = 10.0 ** (ebno_db / 10.0)
    out = qfunc(np.sqrt(2.0 * d * R * snr))
    return float(out) if out.ndim == 0 else out


def _terms(ws: WeightSpectrum, R: float, ebno_db: float) -> np.ndarray:
    d = np.arange(ws.counts.size)
    terms = ws.counts.astype(float) * pairwise_error_prob(d, R, ebno_db)
    terms[0] = 0.0
    return terms


def union_bound(ws: WeightSpectrum, R: float, ebno_db: float) -> float:
    """Sum of A(d) P2(d) over every nonzero weight. Can exceed one."""
    return float(_terms(ws, R, ebno_db).sum())


def truncated_union_bound(ws: WeightSpectrum, R: float, ebno_db: float, d_max: int) -> float:
    """Union bound restricted to weights ``1..d_max``."""
    if d_max > ws.max_weight:
        raise ValueError(f"spectrum is only known up to weight {ws.max_weight}")
    return float(_terms(ws, R, ebno_db)[: d_max + 1].sum())


def truncated_curve(ws: WeightSpectrum, R: float, ebno_db: float) -> np.ndarray:
    """Truncated bound for every ``d_max`` from 0 to the spectrum's known range."""
    return np.cumsum(_terms(ws, R, ebno_db)[: ws.max_weight + 1])


def bound_sweep(
    ws: WeightSpectrum, R: float, ebnos: Iterable[float], d_maxes: Sequence[int | None] = (None,)
) -> list[tuple[float, int | None, float]]:
    rows = []
    for eb in ebnos:
        for dm in d_maxes:
            b = union_bound(ws, R, eb) if dm is None else truncated_union_bound(ws, R, eb, dm)
            rows.append((float(eb), dm, b))
    return rows


def write_bound_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ebno_db", "d_max", "bound"])
        for eb, dm, b in rows:
            w.writerow([f"{eb:g}", "" if dm is None else dm, repr(b)])
