"""CRC-aided list decoders: SCL for polar codes, parallel LVA for TBCCs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ..convolutional import Trellis, depuncture_llr
from ..crc import CrcPoly, passes_many
from ..gf2 import DimensionError
from ..polar import PolarCodeSpec
from ..system import CodeSystem
from . import _lva_kernel as lvk
from ._scl_kernel import scl_kernel

CORRECT = "correct"
UNDETECTED = "undetected"
ERASURE = "erasure"


def _is_pow2(x: int) -> bool:
    return x >= 1 and not x & (x - 1)


@dataclass(frozen=True)
class ListConfig:
    L_min: int = 1
    L_max: int = 1024

    def __post_init__(self):
        if not (_is_pow2(self.L_min) and _is_pow2(self.L_max)):
            raise ValueError("list sizes must be powers of two")
        if self.L_min > self.L_max:
            raise ValueError(f"L_min={self.L_min} exceeds L_max={self.L_max}")

    def schedule(self) -> list[int]:
        sizes, L = [], self.L_min
        while L <= self.L_max:
            sizes.append(L)
            L *= 2
        return sizes


@dataclass(frozen=True)
class CandidatePath:
    data_bits: np.ndarray
    metric: float
    rank: int
    start_state: int | None = None
    end_state: int | None = None

    @property
    def tail_biting(self) -> bool:
        return self.start_state is None or self.start_state == self.end_state


@dataclass(frozen=True, eq=False)
class RankedList:
    """Candidates ordered by non-increasing ``metrics``.

    ``start_states``/``end_states`` are only present for trellis decoders.
    """

    data: np.ndarray
    metrics: np.ndarray
    L_used: int
    start_states: np.ndarray | None = None
    end_states: np.ndarray | None = None

    def __len__(self) -> int:
        return self.metrics.size

    def __getitem__(self, i) -> CandidatePath:
        st = None if self.start_states is None else int(self.start_states[i])
        en = None if self.end_states is None else int(self.end_states[i])
        return CandidatePath(self.data[i], float(self.metrics[i]), i + 1, st, en)

    def __iter__(self) -> Iterator[CandidatePath]:
        return (self[i] for i in range(len(self)))

    @property
    def tail_biting_mask(self) -> np.ndarray:
        if self.start_states is None:
            return np.ones(len(self), dtype=bool)
        return self.start_states == self.end_states


@dataclass(frozen=True)
class Selection:
    """Result of picking a candidate from a list; ``data is None`` means erasure."""

    data: np.ndarray | None
    rank: int | None
    final_L: int

    @property
    def erased(self) -> bool:
        return self.data is None


@dataclass(frozen=True)
class DecodeOutcome:
    kind: str
    selected: np.ndarray | None = field(default=None, repr=False)
    rank_selected: int | None = None
    final_L: int = 0

    def __post_init__(self):
        if self.kind not in (CORRECT, UNDETECTED, ERASURE):
            raise ValueError(f"unknown outcome kind {self.kind!r}")
        if (self.kind == ERASURE) != (self.selected is None):
            raise ValueError("erasure outcomes carry no selection and vice versa")


def _check_list_size(L: int):
    if not _is_pow2(L):
        raise ValueError(f"list size must be a power of two, got {L}")


# -- successive cancellation list ---------------------------------------------


def scl_decode(llrs, spec: PolarCodeSpec, L: int) -> RankedList:
    """SCL decoding of channel LLRs; metric is minus the min-sum path penalty."""
    _check_list_size(L)
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    if llrs.shape != (spec.N,):
        raise DimensionError(f"expected {spec.N} LLRs, got shape {llrs.shape}")
    data, pm = scl_kernel(llrs, spec.frozen_mask, L)
    return RankedList(data, -pm, L)


# -- list Viterbi ---------------------------------------------------------------


class _TrellisTables:
    """Branch output patterns grouped for table-driven metric evaluation."""

    def __init__(self, trellis: Trellis):
        out = trellis.outputs.astype(np.int64)  # (S, 2, n_out)
        n_out = out.shape[2]
        self.starts = np.append(np.arange(0, n_out, 6), n_out).astype(np.int64)
        G = self.starts.size - 1
        self.pats = np.zeros(out.shape[:2] + (G,), dtype=np.int64)
        for g in range(G):
            cols = out[:, :, self.starts[g] : self.starts[g + 1]]
            self.pats[:, :, g] = (cols << np.arange(cols.shape[2])).sum(axis=2)
        self.prev = np.ascontiguousarray(trellis.prev_state)
        self.memory = trellis.spec.memory
        self.T = trellis.num_stages

    def metrics(self, llrs) -> np.ndarray:
        return lvk.stage_metrics(llrs, self.T, self.pats, self.starts)


def _check_trellis_llrs(llrs, trellis: Trellis) -> np.ndarray:
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    if llrs.shape != (trellis.length,):
        raise DimensionError(f"expected {trellis.length} LLRs, got shape {llrs.shape}")
    return llrs


def wava_init_metrics(llrs, trellis: Trellis) -> np.ndarray:
    """Final state metrics of one Viterbi pass from uniform start metrics."""
    llrs = _check_trellis_llrs(llrs, trellis)
    tabs = _TrellisTables(trellis)
    return lvk.viterbi_pass(tabs.metrics(llrs), tabs.prev, tabs.memory, np.zeros(trellis.num_states))


class _LvaRun:
    """Raw output of one list Viterbi pass, kept for lazy tracebacks."""

    def __init__(self, bm, trellis: Trellis, L: int, init, prev=None):
        self.trellis = trellis
        self.prev = np.ascontiguousarray(trellis.prev_state) if prev is None else prev
        self.L = L
        self.init = np.ascontiguousarray(init, dtype=np.float64)
        met, cnt, start, back, offset = lvk.list_viterbi(bm, self.prev, trellis.spec.memory, self.init, L)
        self.met, self.cnt, self.back, self.offset = met, cnt, back, offset
        self.corr, self.end, self.rank, self.start = lvk.ranked_entries(met, cnt, start, offset, self.init)

    def select(self, crc: CrcPoly | None, tb_required: bool = True):
        out = np.zeros(self.trellis.num_stages, dtype=np.int64)
        gval, width = (-1, 0) if crc is None else (crc.value, crc.width)
        i = lvk.select_first(
            self.corr, self.end, self.rank, self.start, self.back, self.prev,
            self.trellis.spec.memory, gval, width, tb_required, out,
        )
        return i, out.astype(np.uint8)

    def unseen_bound(self) -> float:
        return lvk.unseen_bound(self.met, self.cnt, self.offset, self.init, self.L)

    def ranked_list(self) -> RankedList:
        T = self.trellis.num_stages
        data = np.zeros((self.corr.size, T), dtype=np.uint8)
        out = np.zeros(T, dtype=np.int64)
        for i in range(self.corr.size):
            lvk.traceback(self.back, self.prev, self.trellis.spec.memory, self.end[i], self.rank[i], out)
            data[i] = out
        return RankedList(data, self.corr.copy(), self.L, self.start.copy(), self.end.copy())


def lva_decode(llrs, trellis: Trellis, L: int, init_metrics=None) -> RankedList:
    """Parallel list Viterbi keeping ``L`` paths per state at every stage.

    ``llrs`` must already be depunctured. Survivors of all end states are
    merged and ranked by correlation with ``init_metrics`` removed, so the
    ranking reflects likelihood alone; the initial metrics only steer which
    paths survive.
    """
    if L < 1:
        raise ValueError("list size must be positive")
    llrs = _check_trellis_llrs(llrs, trellis)
    init = np.zeros(trellis.num_states) if init_metrics is None else init_metrics
    return _LvaRun(_TrellisTables(trellis).metrics(llrs), trellis, L, init).ranked_list()


# -- selection ----------------------------------------------------------------


def _pack_rows(data: np.ndarray) -> np.ndarray:
    k = data.shape[1]
    weights = (np.uint64(1) << np.arange(k - 1, -1, -1, dtype=np.uint64))
    return (data.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def crc_select(ranked: RankedList, g: CrcPoly | None, tb_required: bool = False) -> Selection:
    """Best-ranked entry that passes the CRC (and tail-biting when required)."""
    ok = ranked.tail_biting_mask if tb_required else np.ones(len(ranked), dtype=bool)
    if g is not None and len(ranked):
        k = ranked.data.shape[1]
        if k <= 64:
            ok &= passes_many(_pack_rows(ranked.data), k, g)
        else:
            from ..crc import crc_check

            ok &= np.array([crc_check(row, g) for row in ranked.data], dtype=bool)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return Selection(None, None, ranked.L_used)
    i = int(hits[0])
    return Selection(ranked.data[i].copy(), i + 1, ranked.L_used)


# -- adaptive wrapper -----------------------------------------------------------


class ListDecoderCore:
    """Reusable decoder for one :class:`CodeSystem`.

    ``stop`` controls when an adaptive round may end early: ``"first"`` accepts
    the first CRC-passing candidate (the plain doubling rule), ``"certified"``
    (LVA only) additionally requires that no path dropped from the lists could
    rank above it, which makes the adaptive choice identical to decoding at
    ``L_max`` directly. The default is ``"certified"`` for trellis codes and
    ``"first"`` otherwise.
    """

    def __init__(self, system: CodeSystem, stop: str | None = None):
        if stop is None:
            stop = "certified" if system.kind == "tbcc" else "first"
        if stop not in ("first", "certified"):
            raise ValueError(f"unknown stop rule {stop!r}")
        if stop == "certified" and system.kind != "tbcc":
            raise ValueError("the certified stop rule needs a trellis decoder")
        self.system = system
        self.stop = stop
        if system.kind == "tbcc":
            self.trellis = system.trellis
            self.tables = _TrellisTables(self.trellis)
        else:
            self.frozen = system.polar.frozen_mask

    @property
    def name(self) -> str:
        return "lva" if self.system.kind == "tbcc" else "scl"

    def _inner_llrs(self, llrs) -> np.ndarray:
        llrs = np.asarray(llrs, dtype=np.float64)
        if llrs.shape != (self.system.n,):
            raise DimensionError(f"expected {self.system.n} LLRs, got shape {llrs.shape}")
        if self.system.puncture is not None:
            llrs = depuncture_llr(llrs, self.system.puncture)
        return np.ascontiguousarray(llrs)

    def rounds(self, llrs, cfg: ListConfig):
        """Yield ``(L, data, rank, final)`` for each list size tried.

        ``data`` is the first passing candidate of that round (or None);
        ``final`` says the stop rule would accept it before ``L_max``. The
        generator ends after the first final round, so a run at a large
        ``L_max`` also describes every smaller ``L_max`` of the same schedule.
        """
        llrs = self._inner_llrs(llrs)
        crc = self.system.crc
        if self.system.kind == "tbcc":
            tabs = self.tables
            bm = tabs.metrics(llrs)
            init = lvk.viterbi_pass(bm, tabs.prev, tabs.memory, np.zeros(self.trellis.num_states))
            for L in cfg.schedule():
                run = _LvaRun(bm, self.trellis, L, init, tabs.prev)
                i, data = run.select(crc, tb_required=True)
                if i < 0:
                    yield L, None, None, False
                    continue
                final = self.stop == "first" or run.corr[i] > run.unseen_bound()
                yield L, data, i + 1, final
                if final:
                    return
            return
        for L in cfg.schedule():
            data, pm = scl_kernel(llrs, self.frozen, L)
            sel = crc_select(RankedList(data, -pm, L), crc)
            yield L, sel.data, sel.rank, not sel.erased
            if not sel.erased:
                return

    def decode(self, llrs, cfg: ListConfig) -> Selection:
        for L, data, rank, final in self.rounds(llrs, cfg):
            if final or L == cfg.L_max:
                return Selection(data, rank, L)
        raise AssertionError("unreachable")

    def decode_sweep(self, llrs, cfg: ListConfig) -> dict[int, Selection]:
        """Selections for every ``L_max`` in ``cfg``'s schedule from one pass."""
        trace = list(self.rounds(llrs, cfg))
        out = {}
        for lmax in cfg.schedule():
            for L, data, rank, final in trace:
                if final or L == lmax:
                    out[lmax] = Selection(data, rank, L)
                    break
        return out

    def decode_fixed(self, llrs, L: int) -> RankedList:
        """Full ranked list at a single list size (no CRC selection)."""
        llrs = self._inner_llrs(llrs)
        if self.system.kind == "tbcc":
            init = wava_init_metrics(llrs, self.trellis)
            return lva_decode(llrs, self.trellis, L, init)
        return scl_decode(llrs, self.system.polar, L)


def adaptive_decode(llrs, system: CodeSystem, cfg: ListConfig, stop: str | None = None) -> Selection:
    """Double the list size from ``L_min`` until a candidate passes or ``L_max`` is spent."""
    return ListDecoderCore(system, stop).decode(llrs, cfg)


def classify_outcome(selected, transmitted) -> str:
    if selected is None:
        return ERASURE
    return CORRECT if np.array_equal(np.asarray(selected), np.asarray(transmitted)) else UNDETECTED


def outcome_from_selection(sel: Selection, transmitted) -> DecodeOutcome:
    kind = classify_outcome(sel.data, transmitted)
    return DecodeOutcome(kind, sel.data, sel.rank, sel.final_L)
