from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpa_rm.errors import LengthMismatchError, ParameterError
from rpa_rm.oracle import all_codewords
from rpa_rm.rm_code import (
    RmCode,
    algebraic_normal_form,
    counter_message,
    encode,
    enumerate_codewords,
    is_codeword,
    min_distance,
    monomials,
    parse_bits,
    point_bits,
    point_index,
    random_messages,
    to_bits_string,
    to_hex,
)


@pytest.mark.parametrize("m,r", [(1, 0), (1, 1), (3, 1), (4, 2), (5, 3), (8, 3)])
def test_dimensions(m, r):
    code = RmCode(m, r)
    assert code.n == 2**m
    assert code.k == sum(comb(m, i) for i in range(r + 1))
    assert len(monomials(m, r)) == code.k


@pytest.mark.parametrize("m,r", [(3, -1), (3, 4), (30, 1), (25, 0)])
def test_bad_parameters(m, r):
    with pytest.raises(ParameterError):
        RmCode(m, r)


def test_monomial_order():
    assert monomials(3, 2) == ((), (1,), (2,), (3,), (1, 2), (1, 3), (2, 3))


def test_point_index_msb_first():
    assert point_index((1, 0, 0)) == 4
    assert point_bits(4, 3) == (1, 0, 0)
    assert all(point_index(point_bits(i, 5)) == i for i in range(32))


def test_small_encodings():
    code = RmCode(2, 1)
    # basis 1, x1, x2 evaluated at points 00, 01, 10, 11
    assert to_bits_string(encode(code, [1, 0, 0])) == "1111"
    assert to_bits_string(encode(code, [0, 1, 0])) == "0011"
    assert to_bits_string(encode(code, [0, 0, 1])) == "0101"


def test_encode_matches_generator_matrix(rng):
    code = RmCode(5, 2)
    from rpa_rm.oracle import _generator_rows

    G = _generator_rows(5, 2)
    msgs = random_messages(code, rng, 50)
    assert np.array_equal(encode(code, msgs), msgs @ G % 2)


def test_encode_length_mismatch():
    with pytest.raises(LengthMismatchError):
        encode(RmCode(3, 1), [1, 0, 1])


@given(st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
@settings(max_examples=60, deadline=None)
def test_linearity(a, b):
    code = RmCode(6, 2)
    k = code.k
    ma = np.array([(a >> i) & 1 for i in range(k)], dtype=np.uint8)
    mb = np.array([(b >> (i % 16)) & 1 for i in range(k)], dtype=np.uint8)
    assert np.array_equal(encode(code, ma ^ mb), encode(code, ma) ^ encode(code, mb))


def test_anf_recovers_degree(rng):
    code = RmCode(6, 2)
    cw = encode(code, random_messages(code, rng))
    assert is_codeword(code, cw)
    assert is_codeword(RmCode(6, 3), cw)
    cw[0] ^= 1
    assert not is_codeword(code, cw)
    # A single point indicator has full degree.
    e = np.zeros(8, dtype=np.uint8)
    e[3] = 1
    assert algebraic_normal_form(e)[7] == 1


@pytest.mark.parametrize("m,r", [(3, 1), (4, 2), (5, 2), (4, 0), (4, 4)])
def test_min_distance_exhaustive(m, r):
    code = RmCode(m, r)
    assert min_distance(code) == 2 ** (m - r)
    assert min_distance(code, verify=True) == 2 ** (m - r)


def test_enumeration_matches_oracle():
    code = RmCode(4, 2)
    fast = np.array(list(enumerate_codewords(code, chunk=300)))
    assert np.array_equal(fast, all_codewords(code))
    assert len({to_bits_string(c) for c in fast}) == 2**code.k


def test_counter_order_for_first_order_codes():
    code = RmCode(3, 1)
    # counter = 2*s + complement flag, s over the linear part
    assert to_bits_string(encode(code, counter_message(code, 0))) == "00000000"
    assert to_bits_string(encode(code, counter_message(code, 1))) == "11111111"
    assert to_bits_string(encode(code, counter_message(code, 2))) == "01010101"


def test_hex_and_bits_roundtrip(rng):
    bits = rng.integers(0, 2, 11).astype(np.uint8)
    assert np.array_equal(parse_bits(to_bits_string(bits), 11), bits)
    assert np.array_equal(parse_bits(to_hex(bits), 11), bits)
    assert to_hex([1, 0, 1, 1, 1]) == "b8"
    assert np.array_equal(parse_bits("0xb8", 5), [1, 0, 1, 1, 1])


@pytest.mark.parametrize("text", ["0101", "b9", "zz", ""])
def test_parse_bits_rejects(text):
    with pytest.raises((LengthMismatchError, ParameterError)):
        parse_bits(text, 5)
