import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crclist.convolutional import ConvCodeSpec, PuncturePattern, apply_puncture, tb_encode
from crclist.crc import CrcPoly
from crclist.gf2 import GeneratorMatrix, bits_from_str, derive_generator
from crclist.polar import construct_frozen_set, load_reliability_sequence, polar_encode
from crclist.spectrum import (
    CodewordSet,
    TractabilityError,
    WeightSpectrum,
    bounded_weight_tb_search,
    cumulative_spectrum,
    full_spectrum_gray,
    gray_enumerate,
    messages_to_bits,
    naive_spectrum,
    polar_low_weight_probe,
)
from crclist.system import CodeSystem


def gm(*rows):
    return GeneratorMatrix([bits_from_str(r) for r in rows])


def random_generator(rng, k, n):
    return GeneratorMatrix(rng.integers(0, 2, (k, n), dtype=np.uint8))


def test_small_examples():
    assert full_spectrum_gray(gm("111")).as_dict() == {0: 1, 3: 1}
    assert full_spectrum_gray(gm("110", "011")).as_dict() == {0: 1, 2: 3}


def test_spectrum_csv_round_trip(tmp_path):
    ws = full_spectrum_gray(gm("110", "011"))
    ws.to_csv(tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text().splitlines() == ["d,A", "0,1", "2,3"]
    assert WeightSpectrum.from_csv(tmp_path / "s.csv", 3, 2) == ws


@pytest.mark.parametrize("k,n", [(1, 7), (5, 20), (9, 64), (12, 100), (16, 130)])
def test_gray_matches_naive(k, n):
    G = random_generator(np.random.default_rng(k), k, n)
    ws = full_spectrum_gray(G)
    assert ws == naive_spectrum(G)
    assert ws.total == 2**k and ws.A(0) == 1 and ws.complete


def test_gray_partitioning_and_collection():
    G = random_generator(np.random.default_rng(9), 14, 60)
    a, msgs = gray_enumerate(G, collect_max_weight=22)
    b, msgs4 = gray_enumerate(G, collect_max_weight=22, chunks=7)
    assert a == b and sorted(msgs) == sorted(msgs4)
    words = (messages_to_bits(msgs, G.k).astype(np.int64) @ G.rows.astype(np.int64)) % 2
    w = words.sum(axis=1)
    assert np.all((w >= 1) & (w <= 22))
    assert len(msgs) == sum(a.A(d) for d in range(1, 23))


def test_enumeration_guard():
    G = GeneratorMatrix(np.eye(40, 41, dtype=np.uint8))
    with pytest.raises(TractabilityError):
        full_spectrum_gray(G)


def test_bounded_search_below_free_distance_is_trivial():
    ws, cws = bounded_weight_tb_search(ConvCodeSpec.from_octal(2, ["7", "5"]), 10, 3)
    assert ws.as_dict() == {0: 1} and len(cws) == 0


@pytest.mark.parametrize(
    "memory,taps,k",
    [(2, ["7", "5"], 8), (2, ["7", "5"], 12), (3, ["15", "17"], 9), (3, ["13", "17", "15"], 11), (2, ["7", "5", "7"], 6)],
)
def test_bounded_search_with_full_range_equals_enumeration(memory, taps, k):
    spec = ConvCodeSpec.from_octal(memory, taps)
    n = k * spec.n_out
    ws, cws = bounded_weight_tb_search(spec, k, n)
    G = derive_generator(lambda m: tb_encode(m, spec), k, n)
    full = naive_spectrum(G)
    if full.A(0) == 1:
        assert ws == full
    else:
        # a nonzero message hits the zero word: count distinct codewords
        distinct = {tuple(G.encode(np.array(b, np.uint8))) for b in itertools.product((0, 1), repeat=k)}
        hist = np.bincount([sum(c) for c in distinct], minlength=n + 1)
        assert ws.counts.tolist() == hist.tolist()
    assert len(cws) == ws.total - 1
    assert np.array_equal(cws.weights, np.sort(cws.weights))
    for d, c in zip(cws.data, cws.codewords):
        assert np.array_equal(tb_encode(d, spec), c)


def test_bounded_search_punctured_matches_enumeration():
    spec = ConvCodeSpec.from_octal(3, ["15", "17"])
    k = 10
    p = PuncturePattern((1, 6, 13), k * 2)
    ws, cws = bounded_weight_tb_search(spec, k, 9, p)
    full = naive_spectrum(derive_generator(lambda m: apply_puncture(tb_encode(m, spec), p), k, p.post_length))
    assert ws == full.truncated(9)
    assert cws.weight_bound == 9 and np.all(cws.weights <= 9)


def test_probe_list_size_one_is_empty():
    spec = construct_frozen_set(load_reliability_sequence(), 64, 12)
    assert len(polar_low_weight_probe(spec, 1)) == 0


def test_probe_matches_brute_force_below_cap():
    spec = construct_frozen_set(load_reliability_sequence(), 16, 5)
    probe = polar_low_weight_probe(spec, 32)
    cap = probe.weight_bound
    words = {tuple(polar_encode(np.array(b, np.uint8), spec)) for b in itertools.product((0, 1), repeat=5)}
    expected = sorted(w for w in words if 0 < sum(w) <= cap)
    got = sorted(tuple(c) for c in probe.up_to(cap).codewords)
    assert got == expected
    assert len({c.tobytes() for c in probe.codewords}) == len(probe)


def test_codeword_set_helpers(tmp_path):
    cws = CodewordSet(np.eye(3, dtype=np.uint8), np.array([[1, 1, 0, 0], [1, 1, 1, 0], [0, 0, 1, 1]], np.uint8), 3)
    assert cws.weights.tolist() == [2, 3, 2]
    assert len(cws.at_weight(2)) == 2 and len(cws.up_to(2)) == 2
    assert cws.spectrum(3).as_dict() == {0: 1, 2: 2, 3: 1}
    cws.write(tmp_path / "w.txt")
    assert (tmp_path / "w.txt").read_text().split() == ["c", "2", "3", "2", "e", "3"]


def test_cumulative():
    ws = full_spectrum_gray(gm("111"))
    cum = cumulative_spectrum(ws)
    assert cum[2] == 1 and cum[3] == 2
    G = random_generator(np.random.default_rng(3), 10, 40)
    assert cumulative_spectrum(full_spectrum_gray(G))[-1] == 2**10


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 4))
def test_crc_expurgation_never_adds_codewords(seed, width):
    rng = np.random.default_rng(seed)
    value = (1 << width) | int(rng.integers(0, 1 << (width - 1))) << 1 | 1 if width > 1 else 0b11
    crc = CrcPoly(width, value)
    conv = ConvCodeSpec.from_octal(2, ["7", "5"])
    msg_len = 10 - width
    system = CodeSystem("tbcc", msg_len, crc, conv=conv)
    outer = naive_spectrum(system.generator())
    inner = naive_spectrum(system.inner_generator())
    assert np.all(outer.counts <= inner.counts)
