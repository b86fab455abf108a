"""BPSK over AWGN: Monte Carlo failure rates and decoder throughput."""

from __future__ import annotations

import csv
import gc
import json
import logging
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.stats import norm

from .listdec import CORRECT, ERASURE, UNDETECTED, ListConfig, ListDecoderCore, classify_outcome
from .system import CodeSystem

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "ebno_db", "trials", "correct", "undetected", "erasure",
    "tfr", "uer", "erasure_rate", "mean_final_L", "cw_per_sec",
]
_Z95 = float(norm.ppf(0.975))


def ebno_to_sigma(ebno_db: float, R: float) -> float:
    """Noise standard deviation per real dimension for unit-energy BPSK."""
    if R <= 0:
        raise ValueError("rate must be positive")
    return float(np.sqrt(1.0 / (2.0 * R * 10.0 ** (ebno_db / 10.0))))


@dataclass(frozen=True)
class ChannelParams:
    ebno_db: float
    R: float

    @property
    def sigma(self) -> float:
        return ebno_to_sigma(self.ebno_db, self.R)


def transmit(cw, ch: ChannelParams, rng: np.random.Generator, noiseless: bool = False) -> np.ndarray:
    """BPSK-modulate, add Gaussian noise and return LLRs (positive favors 0)."""
    s = 1.0 - 2.0 * np.asarray(cw, dtype=np.float64)
    if noiseless:
        return 2.0 * s
    sigma = ch.sigma
    y = s + sigma * rng.standard_normal(s.shape)
    return 2.0 * y / sigma**2


def trial_rng(seed: int, snr_index: int, trial: int) -> np.random.Generator:
    """Counter-based stream owned by one trial, independent of scheduling."""
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, int(snr_index)]
    return np.random.Generator(np.random.Philox(key=key, counter=[0, int(trial), 0, 0]))


def wilson_interval(k: int, n: int) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1 + _Z95**2 / n
    mid = (p + _Z95**2 / (2 * n)) / den
    rad = _Z95 * np.sqrt(p * (1 - p) / n + _Z95**2 / (4 * n * n)) / den
    return float(max(0.0, mid - rad)), float(min(1.0, mid + rad))


@dataclass
class PointResult:
    ebno_db: float
    trials: int = 0
    correct: int = 0
    undetected: int = 0
    erasure: int = 0
    sum_final_L: int = 0
    elapsed: float = 0.0
    budget_exhausted: bool = False

    def __post_init__(self):
        if self.correct + self.undetected + self.erasure != self.trials:
            raise ValueError("outcome counts do not add up to the trial count")

    @property
    def failures(self) -> int:
        return self.undetected + self.erasure

    @property
    def tfr(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    @property
    def uer(self) -> float:
        return self.undetected / self.trials if self.trials else 0.0

    @property
    def erasure_rate(self) -> float:
        return self.erasure / self.trials if self.trials else 0.0

    def interval(self, what: str = "tfr") -> tuple[float, float]:
        k = {"tfr": self.failures, "uer": self.undetected, "erasure_rate": self.erasure}[what]
        return wilson_interval(k, self.trials)

    @property
    def mean_final_L(self) -> float:
        return self.sum_final_L / self.trials if self.trials else 0.0

    @property
    def cw_per_sec(self) -> float:
        return self.trials / self.elapsed if self.elapsed > 0 else 0.0

    def merge(self, counts: np.ndarray, elapsed: float) -> None:
        c, u, e, sl = (int(x) for x in counts)
        self.trials += c + u + e
        self.correct += c
        self.undetected += u
        self.erasure += e
        self.sum_final_L += sl
        self.elapsed += elapsed

    def as_dict(self, timing: bool = True) -> dict:
        """Counts, rates and 95% intervals; ``timing=False`` drops the wall-clock fields."""
        out = {k: getattr(self, k) for k in ("ebno_db", "trials", "correct", "undetected", "erasure")}
        for k in ("tfr", "uer", "erasure_rate"):
            lo, hi = self.interval(k)
            out[k] = getattr(self, k)
            out[f"{k}_ci95"] = [lo, hi]
        out["mean_final_L"] = self.mean_final_L
        if timing:
            out["wall_time"] = self.elapsed
            out["cw_per_sec"] = self.cw_per_sec
        out["budget_exhausted"] = self.budget_exhausted
        return out


@dataclass
class SimReport:
    points: list[PointResult]
    meta: dict = field(default_factory=dict)

    def point(self, ebno_db: float) -> PointResult:
        for p in self.points:
            if np.isclose(p.ebno_db, ebno_db):
                return p
        raise KeyError(ebno_db)

    def to_dict(self, timing: bool = True) -> dict:
        return {"meta": self.meta, "points": [p.as_dict(timing) for p in self.points]}

    def to_json(self, path, timing: bool = True) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(timing), fh, indent=2)

    def to_csv(self, path, timing: bool = True) -> None:
        """Without ``timing`` the ``cw_per_sec`` cell is left empty so reruns are byte-identical."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for p in self.points:
                d = p.as_dict(timing)
                w.writerow([d.get(c, "") for c in CSV_COLUMNS])


_KIND_INDEX = {CORRECT: 0, UNDETECTED: 1, ERASURE: 2}


def _run_block(job):
    """Counts ``(correct, undetected, erasure, sum_final_L)`` per list size for trials ``lo..hi-1``."""
    system, cfg, stop, ebno_db, seed, snr_index, lo, hi, noiseless, sweep = job
    dec = ListDecoderCore(system, stop)
    ch = ChannelParams(ebno_db, system.rate)
    sizes = cfg.schedule() if sweep else [cfg.L_max]
    counts = np.zeros((len(sizes), 4), dtype=np.int64)
    t0 = time.perf_counter()
    for trial in range(lo, hi):
        rng = trial_rng(seed, snr_index, trial)
        msg = rng.integers(0, 2, system.msg_len, dtype=np.uint8)
        llr = transmit(system.encode(msg), ch, rng, noiseless)
        if sweep:
            sels = dec.decode_sweep(llr, cfg)
            picks = [sels[L] for L in sizes]
        else:
            picks = [dec.decode(llr, cfg)]
        for j, sel in enumerate(picks):
            data = None if sel.data is None else sel.data[: system.msg_len]
            counts[j, _KIND_INDEX[classify_outcome(data, msg)]] += 1
            counts[j, 3] += sel.final_L
    return counts, time.perf_counter() - t0


def _simulate_point(system, cfg, stop, ebno_db, snr_index, *, min_errors, max_trials, seed, workers,
                    block, noiseless, sweep, pool, progress, max_seconds=None):
    sizes = cfg.schedule() if sweep else [cfg.L_max]
    results = [PointResult(ebno_db) for _ in sizes]
    next_trial = 0
    done = False
    t_start = time.monotonic()
    while not done and next_trial < max_trials:
        if max_seconds is not None and time.monotonic() - t_start > max_seconds:
            for r in results:
                r.budget_exhausted = True
            logger.warning("%.2f dB: wall-clock budget spent after %d trials", ebno_db, next_trial)
            break
        jobs = []
        for _ in range(max(1, workers)):
            if next_trial >= max_trials:
                break
            hi = min(max_trials, next_trial + block)
            jobs.append((system, cfg, stop, ebno_db, seed, snr_index, next_trial, hi, noiseless, sweep))
            next_trial = hi
        outs = list(pool.map(_run_block, jobs)) if pool is not None else [_run_block(j) for j in jobs]
        # blocks are merged in trial order so the stopping point never depends on scheduling
        for counts, elapsed in outs:
            for r, c in zip(results, counts):
                r.merge(c, elapsed)
            if min(r.failures for r in results) >= min_errors:
                done = True
                break
        if progress is not None:
            progress(ebno_db, results[-1])
    return results


def run_montecarlo(
    system: CodeSystem,
    cfg: ListConfig,
    ebnos: Iterable[float],
    *,
    stop: str | None = None,
    min_errors: int = 100,
    max_trials: int = 10**8,
    seed: int = 0,
    workers: int = 1,
    block: int = 250,
    noiseless: bool = False,
    max_seconds: float | None = None,
    progress: Callable | None = None,
) -> SimReport:
    """Simulate each Eb/N0 until ``min_errors`` failures or ``max_trials`` trials.

    ``max_seconds`` is a per-point wall-clock guard; points it cuts short are
    flagged ``budget_exhausted`` and are not reproducible across machines.
    """
    if min_errors < 1:
        raise ValueError("min_errors must be at least 1")
    ebnos = [float(e) for e in ebnos]
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        points = [
            _simulate_point(system, cfg, stop, eb, i, min_errors=min_errors, max_trials=max_trials, seed=seed,
                            workers=workers, block=block, noiseless=noiseless, sweep=False, pool=pool,
                            progress=progress, max_seconds=max_seconds)[0]
            for i, eb in enumerate(ebnos)
        ]
    finally:
        if pool is not None:
            pool.shutdown()
    return SimReport(points, _meta(system, cfg, stop, seed, min_errors, max_trials))


def run_lmax_sweep(
    system: CodeSystem,
    cfg: ListConfig,
    ebno_db: float,
    *,
    stop: str | None = None,
    min_errors: int = 100,
    max_trials: int = 10**8,
    seed: int = 0,
    workers: int = 1,
    block: int = 250,
    max_seconds: float | None = None,
    progress: Callable | None = None,
) -> dict[int, PointResult]:
    """Outcomes of ``(L_min, L)`` decoding for every ``L`` in the schedule on shared noise.

    One adaptive pass at ``cfg.L_max`` records each round, which fixes the
    outcome for every smaller maximum list size. Runs until every list size
    has ``min_errors`` failures.
    """
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        res = _simulate_point(system, cfg, stop, float(ebno_db), 0, min_errors=min_errors, max_trials=max_trials,
                              seed=seed, workers=workers, block=block, noiseless=False, sweep=True, pool=pool,
                              progress=progress, max_seconds=max_seconds)
    finally:
        if pool is not None:
            pool.shutdown()
    return dict(zip(cfg.schedule(), res))


def _meta(system, cfg, stop, seed, min_errors, max_trials) -> dict:
    dec = ListDecoderCore(system, stop)
    return {
        "system": system.describe(),
        "decoder": dec.name,
        "stop_rule": dec.stop,
        "L_min": cfg.L_min,
        "L_max": cfg.L_max,
        "rate": system.rate,
        "seed": seed,
        "min_errors": min_errors,
        "max_trials": max_trials,
    }


def machine_descriptor() -> dict:
    return {
        "machine": platform.machine(),
        "processor": platform.processor() or platform.machine(),
        "cpus": os.cpu_count(),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def benchmark_throughput(
    system: CodeSystem,
    cfg: ListConfig,
    ebno_db: float,
    duration: float = 5.0,
    *,
    stop: str | None = None,
    seed: int = 0,
    batch: int = 200,
) -> dict:
    """Decoded codewords per second on fresh noisy frames (decode time only)."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    dec = ListDecoderCore(system, stop)
    ch = ChannelParams(ebno_db, system.rate)
    rng = np.random.default_rng(seed)

    def fresh():
        msgs = rng.integers(0, 2, (batch, system.msg_len), dtype=np.uint8)
        return [transmit(system.encode(m), ch, rng) for m in msgs]

    dec.decode(fresh()[0], cfg)  # compile outside the timed region
    count, elapsed = 0, 0.0
    gc_was_enabled = gc.isenabled()
    gc.disable()  # collector pauses depend on unrelated heap contents
    try:
        while elapsed < duration:
            frames = fresh()
            t0 = time.perf_counter()
            for llr in frames:
                dec.decode(llr, cfg)
            elapsed += time.perf_counter() - t0
            count += len(frames)
    finally:
        if gc_was_enabled:
            gc.enable()
    return {
        "decoder": dec.name,
        "stop_rule": dec.stop,
        "L_min": cfg.L_min,
        "L_max": cfg.L_max,
        "ebno_db": ebno_db,
        "count": count,
        "elapsed": elapsed,
        "cw_per_sec": count / elapsed,
        "machine": machine_descriptor(),
    }
