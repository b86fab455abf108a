import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crclist.gf2 import (
    DimensionError,
    GeneratorMatrix,
    NonLinearEncoderError,
    bits_from_str,
    bits_to_hex,
    bits_to_int,
    derive_generator,
    gf2_matvec,
    hex_to_bits,
    int_to_bits,
    pack_bits,
    unpack_bits,
    weight,
)
from crclist.system import reference_tbcc_system

bit_lists = st.lists(st.integers(0, 1), min_size=1, max_size=200)


def test_weight_examples():
    assert weight(np.zeros(512, np.uint8)) == 0
    assert weight(np.ones(8, np.uint8)) == 8
    assert weight(bits_from_str("1011")) == 3


def test_weight_rejects_non_bits():
    with pytest.raises(ValueError):
        weight([0, 2, 1])


@given(st.integers(1, 150).flatmap(lambda n: st.tuples(st.lists(st.integers(0, 1), min_size=n, max_size=n),
                                                     st.lists(st.integers(0, 1), min_size=n, max_size=n))))
def test_weight_triangle(pair):
    a, b = (np.array(x, np.uint8) for x in pair)
    assert weight(a ^ b) <= weight(a) + weight(b)


def test_matvec_examples():
    G = GeneratorMatrix([bits_from_str("110"), bits_from_str("011")])
    assert gf2_matvec(G, [1, 1]).tolist() == [1, 0, 1]
    assert gf2_matvec(G, [0, 0]).tolist() == [0, 0, 0]
    assert gf2_matvec(G, [0, 1]).tolist() == [0, 1, 1]


def test_matvec_dimension_check():
    G = GeneratorMatrix([bits_from_str("110")])
    with pytest.raises(DimensionError):
        gf2_matvec(G, [1, 0])


@settings(max_examples=50)
@given(st.integers(0, 2**20), st.integers(0, 2**20), st.integers(0, 1000))
def test_matvec_linear(a, b, seed):
    rows = np.random.default_rng(seed).integers(0, 2, (21, 40))
    G = GeneratorMatrix(rows)
    m1, m2 = int_to_bits(a, 21), int_to_bits(b, 21)
    assert np.array_equal(gf2_matvec(G, m1 ^ m2), gf2_matvec(G, m1) ^ gf2_matvec(G, m2))


def test_derive_generator_trivial_codes():
    rep = derive_generator(lambda m: np.repeat(m, 3), 1, 3)
    assert rep.rows.tolist() == [[1, 1, 1]]
    ident = derive_generator(lambda m: m.copy(), 4, 4)
    assert np.array_equal(ident.rows, np.eye(4, dtype=np.uint8))


def test_derive_generator_rejects_affine_and_nonlinear():
    with pytest.raises(NonLinearEncoderError):
        derive_generator(lambda m: m ^ 1, 3, 3)
    with pytest.raises(NonLinearEncoderError):
        derive_generator(lambda m: np.array([m[0] & m[1], m[1], m[2]], np.uint8), 3, 3)


def test_derive_generator_full_tbcc_pipeline():
    system = reference_tbcc_system()
    G = system.generator()
    assert (G.k, G.n) == (32, 512)
    rng = np.random.default_rng(7)
    for _ in range(100):
        m = rng.integers(0, 2, 32, dtype=np.uint8)
        assert np.array_equal(G.encode(m), system.encode(m))


def test_derive_generator_round_trip_many():
    rng = np.random.default_rng(1)
    H = rng.integers(0, 2, (12, 30)).astype(np.uint8)
    enc = lambda m: (m.astype(int) @ H & 1).astype(np.uint8)  # noqa: E731
    G = derive_generator(enc, 12, 30)
    for _ in range(1000):
        m = rng.integers(0, 2, 12, dtype=np.uint8)
        assert np.array_equal(enc(m), gf2_matvec(G, m))


@given(bit_lists)
def test_pack_unpack_round_trip(bits):
    b = np.array(bits, np.uint8)
    assert np.array_equal(unpack_bits(pack_bits(b), b.size), b)


def test_packed_popcount_matches_weight():
    b = np.random.default_rng(0).integers(0, 2, 515).astype(np.uint8)
    words = pack_bits(b)
    assert sum(bin(int(w)).count("1") for w in words) == weight(b)


@given(bit_lists)
def test_int_and_hex_round_trip(bits):
    b = np.array(bits, np.uint8)
    assert np.array_equal(int_to_bits(bits_to_int(b), b.size), b)
    assert np.array_equal(hex_to_bits(bits_to_hex(b), b.size), b)


def test_bit_zero_is_most_significant():
    assert bits_to_int([1, 0, 0]) == 4
    assert bits_to_hex(bits_from_str("1000")) == "8"
