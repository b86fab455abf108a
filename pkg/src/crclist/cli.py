"""Command-line front end.

Exit status: 0 success, 1 internal error, 2 configuration or usage error,
3 refused by a tractability guard.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, design, simulation
from . import config as cfgmod
from .crc import candidate_polys, parse_hex_poly
from .gf2 import bits_from_str, bits_to_str, hex_to_bits
from .listdec import ListConfig, ListDecoderCore
from .system import CodeSystem
from .spectrum import (
    CodewordSet,
    TractabilityError,
    WeightSpectrum,
    bounded_weight_tb_search,
    gray_enumerate,
    messages_to_bits,
    polar_low_weight_probe,
)

logger = logging.getLogger("crclist")

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# -- helpers ----------------------------------------------------------------------


def _list_config(args, loaded) -> ListConfig:
    base = loaded.list_config or ListConfig()
    return ListConfig(args.L_min or base.L_min, args.L_max or base.L_max)


def _stop(args, loaded):
    return args.stop or loaded.stop


def _inner_view(system, apply_crc: bool, apply_puncture: bool):
    s = system if apply_puncture else system.with_puncture(None)
    if not apply_crc and s.crc is not None:
        s = CodeSystem(s.kind, s.data_len, None, s.conv, s.polar, s.puncture)
    return s


def _crc_filter(words: CodewordSet, system) -> CodewordSet:
    """Keep the listed inner words whose data passes the system's CRC."""
    if system.crc is None or len(words) == 0:
        return words
    ok = design.crc_passing(words, system.crc)
    return CodewordSet(words.data[ok], words.codewords[ok], words.weight_bound)


def _write_spectrum(ws: WeightSpectrum, path) -> None:
    ws.to_csv(path)
    logger.info("wrote %s (d_min=%s)", path, ws.d_min)


def _read_codewords(path, n: int) -> CodewordSet:
    cws = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if parts:
                cws.append(hex_to_bits(parts[0], n))
    if not cws:
        raise UsageError(f"{path}: no codewords")
    arr = np.array(cws, dtype=np.uint8)
    return CodewordSet(np.zeros((arr.shape[0], 0), np.uint8), arr, int(arr.sum(axis=1).max()))


def _ebno_list(values) -> list[float]:
    return [float(v) for v in values]


# -- commands ---------------------------------------------------------------------


def cmd_spectrum(args) -> int:
    loaded = cfgmod.load(args.config)
    if args.mode == "full":
        G = loaded.full_generator()
        ws, msgs = gray_enumerate(
            G, collect_max_weight=args.collect_weight, allow_large=args.allow_large, workers=args.workers
        )
        _write_spectrum(ws, args.out)
        if args.codewords:
            bits = messages_to_bits(msgs, G.k)
            cws = (bits.astype(np.int64) @ G.rows.astype(np.int64)) & 1
            CodewordSet(bits, cws.astype(np.uint8), args.collect_weight).write(args.codewords)
        return EXIT_OK
    system = loaded.require_system()
    inner = _inner_view(system, args.apply_crc, args.apply_puncture)
    if args.mode == "partial":
        if system.kind != "tbcc":
            raise UsageError("partial mode runs a trellis search and needs a tbcc config")
        if args.weight is None:
            raise UsageError("partial mode needs --weight")
        _, words = bounded_weight_tb_search(inner.conv, inner.data_len, args.weight, inner.puncture)
    else:
        if system.kind != "polar":
            raise UsageError("probe mode needs a polar config")
        words = polar_low_weight_probe(inner.polar, args.list_size)
    words = _crc_filter(words, inner)
    ws = words.spectrum(inner.msg_len)
    _write_spectrum(ws, args.out)
    if args.codewords:
        words.write(args.codewords)
    return EXIT_OK


def _low_weight_set(system, args) -> CodewordSet:
    bare = _inner_view(system, False, True)
    if system.kind == "polar":
        return polar_low_weight_probe(bare.polar, args.probe_list_size)
    _, words = bounded_weight_tb_search(bare.conv, bare.data_len, args.low_weight, bare.puncture)
    return words


def cmd_design(args) -> int:
    if args.what == "conv-search":
        recs = design.random_conv_search(args.memory, args.n_out, args.k, args.trials, args.horizon, args.seed)
        design.write_conv_report(recs, args.out)
        best = recs[0]
        print(f"best taps {' '.join(best.spec.octal)} d_free={best.d_free} A={list(best.counts)}")
        return EXIT_OK
    loaded = cfgmod.load(args.config)
    system = loaded.require_system()
    if args.what == "crc-search":
        if system.crc is None:
            raise UsageError("crc-search needs a config with a CRC (its width sets the candidates)")
        if args.candidates:
            cands = [parse_hex_poly(h, system.crc_width) for h in args.candidates]
        else:
            cands = candidate_polys(system.crc_width)
        low = _low_weight_set(system, args)
        best, reports = design.design_crc(system, cands, low, filter_weight=args.filter_weight, workers=args.workers)
        design.write_crc_report(reports, best, args.out)
        n_surv = sum(r.survived_filter for r in reports)
        print(f"{n_surv} of {len(reports)} candidates survived; best {best.poly.hex} d_min={best.d_min} A={best.A_dmin}")
        return EXIT_OK
    # puncture
    if system.kind != "tbcc":
        raise UsageError("puncture design needs a tbcc config")
    base = system.with_puncture(None)
    if args.words:
        words = _read_codewords(args.words, base.n)
        words = words.at_weight(int(words.weights.min()))
    else:
        G = base.generator()
        d = gray_enumerate(G, workers=args.workers)[0].d_min
        _, msgs = gray_enumerate(G, collect_max_weight=d, workers=args.workers)
        bits = messages_to_bits(msgs, base.msg_len)
        cws = np.array([base.encode(b) for b in bits], dtype=np.uint8)
        words = CodewordSet(np.array([base.crc_word(b) for b in bits]), cws, d)
    pat = design.optimize_puncture(words, args.count)
    zeros = (words.codewords == 0).sum(axis=0)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["position", "zeros", "selected"])
        for i in range(base.n):
            w.writerow([i, int(zeros[i]), int(i in pat.positions)])
    print("puncture positions", " ".join(str(p) for p in pat.positions))
    return EXIT_OK


def _load_spectrum(args, loaded) -> WeightSpectrum:
    if args.spectrum:
        if loaded.system is None:
            n, k = loaded.generator.n, loaded.generator.k
        else:
            n, k = loaded.system.n, loaded.system.msg_len
        return WeightSpectrum.from_csv(args.spectrum, n, k)
    ws, _ = gray_enumerate(loaded.full_generator(), allow_large=args.allow_large, workers=args.workers)
    return ws


def cmd_bounds(args) -> int:
    loaded = cfgmod.load(args.config)
    ws = _load_spectrum(args, loaded)
    rate = args.rate if args.rate else ws.k / ws.n
    d_maxes = [None] if not args.d_max else [int(d) for d in args.d_max]
    if args.all_d_max:
        d_maxes = list(range(ws.d_min or 0, ws.max_weight + 1)) + [None]
    rows = analysis.bound_sweep(ws, rate, _ebno_list(args.ebno), d_maxes)
    analysis.write_bound_csv(rows, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    loaded = cfgmod.load(args.config)
    system = loaded.require_system()
    cfg = _list_config(args, loaded)
    seed = loaded.seed if args.seed is None else args.seed
    stop = _stop(args, loaded)
    out = Path(args.out)
    if args.lmax_sweep:
        if len(args.ebno) != 1:
            raise UsageError("--lmax-sweep takes a single --ebno value")
        res = simulation.run_lmax_sweep(
            system, cfg, float(args.ebno[0]), stop=stop, min_errors=args.min_errors,
            max_trials=args.max_trials, seed=seed, workers=args.workers, max_seconds=args.max_seconds,
        )
        with open(out.with_suffix(".csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["L_max"] + simulation.CSV_COLUMNS)
            for L, p in res.items():
                d = p.as_dict(args.timing)
                w.writerow([L] + [d.get(c, "") for c in simulation.CSV_COLUMNS])
        with open(out.with_suffix(".json"), "w") as fh:
            json.dump({str(L): p.as_dict(args.timing) for L, p in res.items()}, fh, indent=2)
        return EXIT_OK
    rep = simulation.run_montecarlo(
        system, cfg, _ebno_list(args.ebno), stop=stop, min_errors=args.min_errors,
        max_trials=args.max_trials, seed=seed, workers=args.workers, noiseless=args.noiseless,
        max_seconds=args.max_seconds,
    )
    rep.to_json(out.with_suffix(".json"), args.timing)
    rep.to_csv(out.with_suffix(".csv"), args.timing)
    for p in rep.points:
        print(f"{p.ebno_db:g} dB: trials={p.trials} tfr={p.tfr:.3e} uer={p.uer:.3e} erasure={p.erasure_rate:.3e}")
    return EXIT_OK


def cmd_bench(args) -> int:
    loaded = cfgmod.load(args.config)
    system = loaded.require_system()
    res = simulation.benchmark_throughput(
        system, _list_config(args, loaded), float(args.ebno), args.duration, stop=_stop(args, loaded),
        seed=loaded.seed if args.seed is None else args.seed,
    )
    text = json.dumps(res, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(f"{res['decoder']} ({res['L_min']},{res['L_max']}): {res['cw_per_sec']:.1f} codewords/s")
    return EXIT_OK


def cmd_encode(args) -> int:
    loaded = cfgmod.load(args.config)
    if loaded.system is None:
        k = loaded.generator.k
        msg = bits_from_str(args.message) if args.message else hex_to_bits(args.hex, k)
        print(bits_to_str(loaded.generator.encode(msg)))
        return EXIT_OK
    system = loaded.system
    msg = bits_from_str(args.message) if args.message else hex_to_bits(args.hex, system.msg_len)
    if msg.size != system.msg_len:
        raise UsageError(f"message must have {system.msg_len} bits, got {msg.size}")
    print(bits_to_str(system.encode(msg)))
    return EXIT_OK


def cmd_decode(args) -> int:
    loaded = cfgmod.load(args.config)
    system = loaded.require_system()
    if args.llr_file:
        llr = np.loadtxt(args.llr_file, dtype=np.float64, ndmin=1).ravel()
    else:
        bits = bits_from_str(args.received)
        llr = 1.0 - 2.0 * bits.astype(np.float64)
    dec = ListDecoderCore(system, _stop(args, loaded))
    sel = dec.decode(llr, _list_config(args, loaded))
    result = {
        "erased": sel.data is None,
        "message": None if sel.data is None else bits_to_str(sel.data[: system.msg_len]),
        "rank": sel.rank,
        "final_L": sel.final_L,
    }
    print(json.dumps(result))
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def _pow2(text: str) -> int:
    v = int(text)
    if v < 1 or v & (v - 1):
        raise argparse.ArgumentTypeError(f"{text} is not a positive power of two")
    return v


def _add_decoder_flags(p):
    p.add_argument("--L-min", dest="L_min", type=_pow2, help="smallest list size (overrides config)")
    p.add_argument("--L-max", dest="L_max", type=_pow2, help="largest list size (overrides config)")
    p.add_argument("--stop", choices=["first", "certified"], help="adaptive stop rule (overrides config)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crclist", description="CRC-aided list decoding toolkit")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    cfg_help = "JSON config file or preset name (" + ", ".join(cfgmod.preset_names()) + ")"

    p = sub.add_parser("spectrum", help="weight spectrum of a code")
    p.add_argument("config", help=cfg_help)
    p.add_argument("--mode", choices=["full", "partial", "probe"], default="full",
                   help="full: 2^k enumeration of the whole system; partial: tail-biting search up to --weight; "
                        "probe: polar list probe with --list-size")
    p.add_argument("--weight", type=int, help="weight cap for partial mode")
    p.add_argument("--list-size", type=_pow2, default=32768, help="list size for probe mode")
    p.add_argument("--apply-crc", action="store_true", help="partial/probe: keep only CRC-passing words")
    p.add_argument("--apply-puncture", action="store_true", help="partial: search the punctured code")
    p.add_argument("--collect-weight", type=int, default=-1, help="full mode: keep messages up to this weight")
    p.add_argument("--codewords", help="also write the listed codewords (hex weight per line)")
    p.add_argument("--allow-large", action="store_true", help="lift the 2^34 enumeration guard")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--out", required=True, help="output CSV (d,A)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("design", help="CRC, puncture and convolutional code searches")
    dsub = p.add_subparsers(dest="what", required=True)
    q = dsub.add_parser("crc-search", help="distance-spectrum-optimal CRC search")
    q.add_argument("config", help=cfg_help)
    q.add_argument("--candidates", nargs="+", help="hex polynomials (default: every one of the config's width)")
    q.add_argument("--filter-weight", type=int, help="low-weight filter cut (default: automatic)")
    q.add_argument("--probe-list-size", type=_pow2, default=32768, help="polar: list size of the low-weight probe")
    q.add_argument("--low-weight", type=int, default=140, help="tbcc: weight cap of the low-weight search")
    q.add_argument("--workers", type=int, default=1, help="worker processes per enumeration")
    q.add_argument("--out", required=True, help="report CSV")
    q.set_defaults(func=cmd_design)
    q = dsub.add_parser("puncture", help="choose puncture positions from minimum-weight codewords")
    q.add_argument("config", help=cfg_help)
    q.add_argument("--count", type=int, default=4, help="number of positions to puncture")
    q.add_argument("--words", help="codeword file (hex weight per line); default: enumerate the unpunctured system")
    q.add_argument("--workers", type=int, default=1, help="worker processes")
    q.add_argument("--out", required=True, help="report CSV")
    q.set_defaults(func=cmd_design)
    q = dsub.add_parser("conv-search", help="random convolutional polynomial search")
    q.add_argument("--memory", type=int, required=True)
    q.add_argument("--n-out", type=int, required=True)
    q.add_argument("--k", type=int, required=True, help="tail-biting message length")
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--horizon", type=int, default=3, help="count A(d_free) .. A(d_free+horizon)")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True, help="report CSV")
    q.set_defaults(func=cmd_design)

    p = sub.add_parser("bounds", help="union and truncated union bounds")
    p.add_argument("config", help=cfg_help)
    p.add_argument("--spectrum", help="spectrum CSV (default: enumerate the config's code)")
    p.add_argument("--ebno", nargs="+", required=True, help="Eb/N0 values in dB")
    p.add_argument("--d-max", nargs="+", help="truncation weights (default: full bound)")
    p.add_argument("--all-d-max", action="store_true", help="every d_max from d_min to the known range")
    p.add_argument("--rate", type=float, help="information rate (default k/n)")
    p.add_argument("--allow-large", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output CSV (ebno_db,d_max,bound)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="Monte Carlo failure rates over AWGN")
    p.add_argument("config", help=cfg_help)
    p.add_argument("--ebno", nargs="+", required=True, help="Eb/N0 values in dB")
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--max-trials", type=int, default=10**8)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--noiseless", action="store_true", help="skip the noise (smoke test)")
    p.add_argument("--lmax-sweep", action="store_true", help="report every L_max of the schedule from one run")
    p.add_argument("--max-seconds", type=float, help="wall-clock guard per Eb/N0 point")
    p.add_argument("--timing", action="store_true", help="include wall time and codewords/s (output no longer reproducible)")
    _add_decoder_flags(p)
    p.add_argument("--out", required=True, help="output prefix; writes .json and .csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="decoder throughput")
    p.add_argument("config", help=cfg_help)
    p.add_argument("--ebno", type=float, default=3.0)
    p.add_argument("--duration", type=float, default=5.0, help="seconds of decoding")
    p.add_argument("--seed", type=int)
    _add_decoder_flags(p)
    p.add_argument("--out", help="JSON result file")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("encode", help="encode one message")
    p.add_argument("config", help=cfg_help)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--message", help="message as a 0/1 string")
    g.add_argument("--hex", help="message as hex")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode one received word")
    p.add_argument("config", help=cfg_help)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--llr-file", help="whitespace-separated LLRs (positive favors 0)")
    g.add_argument("--received", help="hard-decision word as a 0/1 string")
    _add_decoder_flags(p)
    p.set_defaults(func=cmd_decode)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except TractabilityError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (cfgmod.ConfigError, UsageError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
