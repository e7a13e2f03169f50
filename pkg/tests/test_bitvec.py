import numpy as np
import pytest
from hypothesis import given, strategies as st

from majscope._bits import FormatError, Reader, Writer
from majscope.bitvec import PlainBitvec, SparseBitvec, plain_build, sparse_build


def naive(bits):
    cum = np.concatenate([[0], np.cumsum(bits)])
    return cum, np.flatnonzero(bits) + 1, np.flatnonzero(np.asarray(bits) == 0) + 1


def test_running_example_cover_has_five_ones():
    assert plain_build([1, 0, 1, 0, 1, 1, 1]).rank(7) == 5


def test_empty_plain():
    bv = plain_build([])
    assert bv.rank(0) == 0 and len(bv) == 0
    with pytest.raises(IndexError):
        bv.select(1)


@pytest.mark.parametrize("density", [1 / 2, 1 / 16, 1 / 256])
def test_plain_matches_linear_scan(density):
    rng = np.random.default_rng(int(1 / density))
    for _ in range(20):
        bits = (rng.random(int(rng.integers(1, 4097))) < density).astype(np.uint8)
        bv = PlainBitvec(bits)
        cum, ones, zeros = naive(bits)
        assert [bv.rank(i) for i in range(len(bits) + 1)] == cum.tolist()
        assert [bv.select(j) for j in range(1, len(ones) + 1)] == ones.tolist()
        assert [bv.select0(j) for j in range(1, len(zeros) + 1)] == zeros.tolist()
        assert [bv[i] for i in range(1, len(bits) + 1)] == bits.tolist()


@given(st.lists(st.booleans(), max_size=1500))
def test_plain_rank_select_inverse(bits):
    bv = PlainBitvec(bits)
    for j in range(1, bv.ones + 1):
        assert bv.rank(bv.select(j)) == j
    for j in range(1, bv.zeros + 1):
        assert bv.rank0(bv.select0(j)) == j
    for i in range(len(bits) + 1):
        if bv.rank(i):
            assert bv.select(bv.rank(i)) <= i


def test_sparse_examples():
    v = sparse_build(12, [2, 5, 11])
    assert v.select(2) == 5
    assert v.rank(6) == 2 and v.rank(0) == 0 and v.rank(12) == 3
    m3 = sparse_build(7, [1, 2, 4, 5])
    H = m3.high
    recon = [((H.select(j) - j) << m3.b | int(m3.low[j - 1])) + 1 for j in range(1, 5)]
    assert recon == [1, 2, 4, 5]
    one = sparse_build(1, [1])
    assert one.select(1) == 1 and one.rank(1) == 1


def test_sparse_rejects_bad_positions():
    for bad in ([3, 2], [0, 1], [1, 13], [2, 2]):
        with pytest.raises(ValueError):
            sparse_build(12, bad)


@given(st.integers(1, 3000).flatmap(lambda m: st.tuples(st.just(m), st.sets(st.integers(1, m), max_size=300))))
def test_sparse_round_trip(case):
    m, pos = case
    pos = sorted(pos)
    v = SparseBitvec(m, pos)
    assert [v.select(j) for j in range(1, len(pos) + 1)] == pos
    assert v.positions().tolist() == pos
    bits = np.zeros(m, dtype=np.uint8)
    bits[np.asarray(pos, dtype=np.int64) - 1] = 1
    cum = np.concatenate([[0], np.cumsum(bits)])
    assert np.array_equal(v.rank_many(np.arange(m + 1)), cum)
    assert all(v.rank(i) == cum[i] for i in range(0, m + 1, max(1, m // 50)))
    w = Writer()
    v.write(w)
    back = SparseBitvec.read(Reader(w.getvalue()))
    assert back.positions().tolist() == pos


def test_sparse_space_bound():
    rng = np.random.default_rng(2)
    for _ in range(50):
        m = int(rng.integers(1, 100_000))
        k = int(rng.integers(1, min(m, 2000) + 1))
        v = SparseBitvec(m, np.sort(rng.choice(m, k, replace=False)) + 1)
        assert len(v.high) <= 2 * k + 1
        assert v.size_in_bits() <= k * (v.b + 2) + 1
        assert v.b == max(1, int(np.ceil(np.log2(m / k)))) or m / k <= 2


def test_select_strictly_increasing_and_rank_monotone():
    rng = np.random.default_rng(3)
    pos = np.unique(rng.integers(1, 5000, 400))
    v = SparseBitvec(5000, pos)
    sel = v.select_many(np.arange(1, len(pos) + 1))
    assert np.all(np.diff(sel) > 0)
    assert np.all(np.diff(v.rank_many(np.arange(5001))) >= 0)


def test_plain_serialization_and_truncation():
    bv = PlainBitvec([1, 0, 1, 1, 0, 0, 1] * 30)
    w = Writer()
    bv.write(w)
    data = w.getvalue()
    back = PlainBitvec.read(Reader(data))
    assert back.bits().tolist() == bv.bits().tolist()
    with pytest.raises(FormatError):
        PlainBitvec.read(Reader(data[:-3]))
    with pytest.raises(FormatError):
        PlainBitvec.read(Reader(b"XXXX" + data[4:]))
