from fractions import Fraction

import numpy as np
import pytest

from majscope import build
from majscope.lbdemo import (
    BITMAP_TAU,
    DecodeError,
    QueryLog,
    decode_bitmap,
    decode_perms,
    encode_bitmap,
    encode_perms,
    encoding_counter,
    oracle_counter,
    threshold_sane,
)

EXAMPLE = [1, 5, 3, 9, 2, 4, 6, 8, 7]


def test_example_layout():
    code = encode_perms([EXAMPLE])
    assert code.k == 3 and code.m == 1 and code.tau == Fraction(1, 8) and code.n == 108
    rows = code.array.reshape(9, 12).tolist()
    sent = [-1, -2, -3, -4, -5, -6]
    tails = [[1, 5, 3]] * 3 + [[9, 2, 4]] * 3 + [[6, 8, 7]] * 3
    heads = [[1, 2, 3], [4, 5, 6], [7, 8, 9]] * 3
    assert rows == [h + sent + t for h, t in zip(heads, tails)]


def test_k1_layout():
    arr = encode_perms([[1, 2, 3]]).array.tolist()
    assert len(arr) == 36
    assert arr[:12] == [1, -1, -2, 1, 2, -1, -2, 1, 3, -1, -2, 1]


def test_rejects_non_permutations():
    for bad in ([1, 2, 2], [1, 2, 4], [0, 1, 2]):
        with pytest.raises(ValueError):
            encode_perms([bad])


def test_golden_trace():
    code = encode_perms([EXAMPLE])
    log = QueryLog()
    assert decode_perms(code, oracle_counter(code.array, code.tau), log) == [EXAMPLE]
    e = log.entries
    # x_1 = 1 from C[1,10] and C[2,10]; x_2 is absent from row one (C[1,11] only sees x_1)
    assert e[:3] == [(1, 10, 1), (2, 10, 0), (1, 11, 1)]
    start = e.index((1, 12, 2))
    assert e[start : start + 3] == [(1, 12, 2), (2, 12, 1), (3, 12, 1)]


def test_identity_k1():
    code = encode_perms([[1, 2, 3]])
    assert decode_perms((1, 1), oracle_counter(code.array, code.tau)) == [[1, 2, 3]]


@pytest.mark.parametrize("k", [1, 2, 3, 5, 8])
def test_round_trips(k):
    rng = np.random.default_rng(k)
    for m in (1, 2, 4):
        for _ in range(4):
            perms = [(rng.permutation(3 * k) + 1).tolist() for _ in range(m)]
            code = encode_perms(perms)
            assert decode_perms((k, m), oracle_counter(code.array, code.tau)) == perms
            enc = build(code.array, code.tau)
            assert decode_perms((k, m), encoding_counter(enc)) == perms


def test_decoder_never_reads_the_array():
    code = encode_perms([EXAMPLE, EXAMPLE[::-1]])
    reads = []

    def counter(i, j):
        reads.append((i, j))
        return oracle_counter(code.array, code.tau)(i, j)

    assert decode_perms((code.k, code.m), counter) == [EXAMPLE, EXAMPLE[::-1]]
    assert reads and all(1 <= i <= j <= code.n for i, j in reads)


def test_inconsistent_counter():
    with pytest.raises(DecodeError):
        decode_perms((2, 1), lambda i, j: 0)
    with pytest.raises(DecodeError):
        decode_perms((2, 1), lambda i, j: 3)


def test_threshold_sanity():
    assert all(threshold_sane(k) for k in range(1, 30))


def test_bitmaps():
    assert encode_bitmap([1, 0, 1]).tolist() == [1, 1, 1, 1, 1, 2, 3, 4, 1, 1, 1, 1]
    rng = np.random.default_rng(0)
    for length in (1, 5, 64, 128):
        bits = rng.integers(0, 2, length).tolist()
        A = encode_bitmap(bits)
        assert decode_bitmap(oracle_counter(A, BITMAP_TAU), length) == bits
        assert decode_bitmap(encoding_counter(build(A, BITMAP_TAU)), length) == bits
    zeros = encode_bitmap([0] * 8)
    assert decode_bitmap(oracle_counter(zeros, BITMAP_TAU), 8) == [0] * 8
