"""Code-design searches: distance-spectrum-optimal CRCs, puncture positions,
and randomized convolutional polynomial search."""

from __future__ import annotations

import csv
import heapq
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .convolutional import ConvCodeSpec, PuncturePattern, build_trellis
from .crc import CrcPoly, passes_many
from .spectrum import CodewordSet, WeightSpectrum, bounded_weight_tb_search, full_spectrum_gray
from .system import CodeSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CrcCandidateReport:
    poly: CrcPoly
    d_min: int | None
    A_dmin: int
    survived_filter: bool
    spectrum: WeightSpectrum | None = field(default=None, repr=False)
    exact: bool = False

    def rank_key(self):
        """Larger d_min first, then fewer words at d_min, then fewer at each
        following weight, finally the smaller hex value."""
        dmin = self.d_min if self.d_min is not None else 1 << 30
        tail: tuple = ()
        if self.spectrum is not None and self.d_min is not None:
            tail = tuple(int(a) for a in self.spectrum.counts[self.d_min : self.spectrum.max_weight + 1])
        else:
            tail = (self.A_dmin,)
        return (-dmin, tail, self.poly.value)


def _pack(data: np.ndarray) -> np.ndarray:
    k = data.shape[1]
    weights = np.uint64(1) << np.arange(k - 1, -1, -1, dtype=np.uint64)
    return (data.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def crc_passing(words: CodewordSet, g: CrcPoly) -> np.ndarray:
    """Mask of listed words whose data passes the CRC check."""
    if len(words) == 0:
        return np.zeros(0, dtype=bool)
    return passes_many(_pack(words.data), words.data.shape[1], g)


def crc_survivor_filter(low_weight: CodewordSet, candidates: Sequence[CrcPoly], data_len: int) -> list[CrcPoly]:
    """Candidates under which no listed data word passes the CRC check."""
    if len(low_weight) == 0:
        return list(candidates)
    if low_weight.data.shape[1] != data_len:
        raise ValueError(f"codeword set carries {low_weight.data.shape[1]}-bit data, expected {data_len}")
    vals = _pack(low_weight.data)
    return [g for g in candidates if not passes_many(vals, data_len, g).any()]


def crc_low_weight_profiles(low_weight: CodewordSet, candidates: Sequence[CrcPoly], n: int, k: int) -> list[CrcCandidateReport]:
    """Partial spectrum of each CRC-expurgated code, exact up to the set's weight bound."""
    vals = _pack(low_weight.data) if len(low_weight) else np.zeros(0, np.uint64)
    weights = low_weight.weights
    data_len = low_weight.data.shape[1] if len(low_weight) else 0
    reports = []
    for g in candidates:
        ok = passes_many(vals, data_len, g) if vals.size else np.zeros(0, bool)
        counts = np.bincount(weights[ok], minlength=n + 1)[: n + 1]
        counts[0] = 1
        ws = WeightSpectrum(counts, k, low_weight.weight_bound)
        d = ws.d_min
        reports.append(CrcCandidateReport(g, d, ws.A(d) if d else 0, not ok.any(), ws))
    return reports


def dso_crc_select(
    template: CodeSystem,
    candidates: Sequence[CrcPoly],
    *,
    survived: Sequence[bool] | None = None,
    workers: int = 1,
    progress: Callable[[int, int, CrcCandidateReport], None] | None = None,
) -> tuple[CrcCandidateReport, list[CrcCandidateReport]]:
    """Exhaustively enumerate each CRC-concatenated code and pick the best spectrum."""
    if not candidates:
        raise ValueError("no CRC candidates to evaluate")
    reports = []
    for i, g in enumerate(candidates):
        system = template.with_crc(g)
        ws = full_spectrum_gray(system.generator(), workers=workers)
        d = ws.d_min
        rep = CrcCandidateReport(
            g, d, ws.A(d) if d else 0, True if survived is None else bool(survived[i]), ws, exact=True
        )
        reports.append(rep)
        logger.info("%s: d_min=%s A=%s", g.hex, d, rep.A_dmin)
        if progress is not None:
            progress(i + 1, len(candidates), rep)
    best = min(reports, key=CrcCandidateReport.rank_key)
    return best, reports


def auto_filter_weight(profiles: Sequence[CrcCandidateReport], bound: int) -> int:
    """Largest weight ``w <= bound`` such that some candidate expurgates every listed word of weight ``<= w``."""
    best = max((p.d_min if p.d_min is not None else bound + 1) for p in profiles)
    return min(bound, best - 1)


def design_crc(
    template: CodeSystem,
    candidates: Sequence[CrcPoly],
    low_weight: CodewordSet,
    *,
    filter_weight: int | None = None,
    workers: int = 1,
    progress=None,
) -> tuple[CrcCandidateReport, list[CrcCandidateReport]]:
    """Filter with known low-weight inner codewords, then enumerate survivors exactly.

    Returns the winner and one report per candidate: exact for candidates that
    reached full enumeration, partial (low-weight profile) for the rest.
    """
    profiles = crc_low_weight_profiles(low_weight, candidates, template.n, template.msg_len)
    if filter_weight is None:
        filter_weight = auto_filter_weight(profiles, low_weight.weight_bound)
    survivors = crc_survivor_filter(low_weight.up_to(filter_weight), candidates, template.data_len)
    logger.info("filter weight %d leaves %d of %d candidates", filter_weight, len(survivors), len(candidates))
    if not survivors:
        raise ValueError("no candidate survives the low-weight filter")
    best, exact = dso_crc_select(template, survivors, workers=workers, progress=progress)
    by_poly = {r.poly: r for r in exact}
    merged = []
    for p in profiles:
        if p.poly in by_poly:
            merged.append(by_poly[p.poly])
        else:
            merged.append(CrcCandidateReport(p.poly, p.d_min, p.A_dmin, False, p.spectrum))
    return best, merged


def write_crc_report(reports: Sequence[CrcCandidateReport], best: CrcCandidateReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["poly_hex", "dmin", "A_dmin", "survived", "selected"])
        for r in reports:
            w.writerow([
                r.poly.hex,
                "" if r.d_min is None else r.d_min,
                r.A_dmin,
                int(r.survived_filter),
                int(r.poly == best.poly),
            ])


def optimize_puncture(min_weight_words: CodewordSet, count: int) -> PuncturePattern:
    """Puncture the ``count`` positions that are zero in the most listed codewords.

    Columns are taken greedily by zero count. Among equal counts the column
    that would strip a second one from the fewest already-hit codewords wins,
    then the lowest index.
    """
    if len(min_weight_words) == 0:
        raise ValueError("need at least one codeword to choose puncture positions")
    cw = min_weight_words.codewords.astype(np.int64)
    n = cw.shape[1]
    if not 0 <= count < n:
        raise ValueError(f"cannot puncture {count} of {n} positions")
    zeros = (cw == 0).sum(axis=0)
    hits = np.zeros(cw.shape[0], dtype=np.int64)
    free = np.ones(n, dtype=bool)
    chosen = []
    for _ in range(count):
        double = ((hits[:, None] + cw) >= 2).sum(axis=0)
        cols = np.flatnonzero(free)
        c = int(cols[np.lexsort((cols, double[cols], -zeros[cols]))[0]])
        chosen.append(c)
        free[c] = False
        hits += cw[:, c]
    return PuncturePattern(tuple(sorted(chosen)), n)


# -- convolutional code search -------------------------------------------------


@dataclass(frozen=True)
class ConvSearchRecord:
    """``d_free`` is the free distance of the unterminated code; ``counts`` are
    tail-biting multiplicities A(d_free..d_free+horizon) at the search length."""

    spec: ConvCodeSpec
    d_free: int
    counts: tuple[int, ...]
    tb_d_min: int

    def rank_key(self):
        return (-self.d_free, -self.tb_d_min, self.counts, self.spec.taps)


def free_distance(spec: ConvCodeSpec) -> int:
    """Least weight of a path that leaves the zero state and first returns to it."""
    S = spec.num_states
    w = np.array([[bin(spec.branch_output(s, b)).count("1") for b in (0, 1)] for s in range(S)])
    nxt = np.array([[spec.next_state(s, b) for b in (0, 1)] for s in range(S)])
    start = int(nxt[0, 1])
    dist = {start: int(w[0, 1])}
    heap = [(dist[start], start)]
    while heap:
        d, s = heapq.heappop(heap)
        if s == 0:
            return d
        if d > dist.get(s, 1 << 62):
            continue
        for b in (0, 1):
            t, nd = int(nxt[s, b]), d + int(w[s, b])
            if nd < dist.get(t, 1 << 62):
                dist[t] = nd
                heapq.heappush(heap, (nd, t))
    raise ValueError("no path returns to the zero state")


def tb_min_distance(spec: ConvCodeSpec, k: int) -> int:
    """Minimum weight over nonzero tail-biting codewords of length-``k`` messages."""
    tr = build_trellis(spec, k)
    S = spec.num_states
    w = tr.outputs.sum(axis=2).astype(np.int64)  # (S, 2)
    nxt = tr.next_state
    big = 1 << 40
    best = big
    for s0 in range(S):
        # cost[s, f]: least weight reaching s; f marks a nonzero input so far
        cost = np.full((S, 2), big, dtype=np.int64)
        cost[s0, 1 if s0 else 0] = 0
        for _ in range(k):
            new = np.full((S, 2), big, dtype=np.int64)
            for b in (0, 1):
                cand = cost + w[:, b][:, None]
                tgt = nxt[:, b]
                for f in (0, 1):
                    nf = f | b
                    np.minimum.at(new[:, nf], tgt, cand[:, f])
            cost = new
        best = min(best, int(cost[s0, 1]))
    return best


def evaluate_conv_code(spec: ConvCodeSpec, k: int, horizon: int = 3) -> ConvSearchRecord:
    d = free_distance(spec)
    ws, _ = bounded_weight_tb_search(spec, k, d + horizon)
    tb = ws.d_min if ws.d_min is not None else tb_min_distance(spec, k)
    return ConvSearchRecord(spec, d, tuple(ws.A(d + i) for i in range(horizon + 1)), tb)


def random_conv_search(
    memory: int,
    n_out: int,
    k: int,
    trials: int,
    horizon: int = 3,
    seed: int = 0,
    progress: Callable[[int, int], None] | None = None,
) -> list[ConvSearchRecord]:
    """Sample tap sets with ``g0 = gv = 1`` and rank by (d_free, A(d_free..d_free+horizon))."""
    if trials < 1:
        raise ValueError("need at least one trial")
    n_choices = 1 << (memory - 1)
    if n_out > n_choices:
        raise ValueError(f"only {n_choices} distinct polynomials exist for memory {memory}")
    rng = np.random.default_rng(seed)
    records = []
    for t in range(trials):
        mids = rng.choice(n_choices, size=n_out, replace=False)
        taps = tuple(int((1 << memory) | (int(m) << 1) | 1) if memory > 1 else 0b11 for m in mids)
        records.append(evaluate_conv_code(ConvCodeSpec(memory, taps), k, horizon))
        if progress is not None:
            progress(t + 1, trials)
    records.sort(key=ConvSearchRecord.rank_key)
    return records


def write_conv_report(records: Sequence[ConvSearchRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        horizon = len(records[0].counts) if records else 0
        w.writerow(["rank", "taps_octal", "d_free", "tb_dmin"] + [f"A_dfree_plus_{i}" for i in range(horizon)])
        for i, r in enumerate(records, 1):
            w.writerow([i, " ".join(r.spec.octal), r.d_free, r.tb_d_min, *r.counts])
