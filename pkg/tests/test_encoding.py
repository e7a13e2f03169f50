import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from _grid import RUNNING, answer_as_dict
from majscope import InvalidThreshold, RangeError, ThresholdTooLow, build, oracle_query
from majscope.encoding import pair_bound
from majscope.runbv import SparseRunBitvec

HALF = Fraction(1, 2)


def cover_runs(pair):
    bits = pair.cover.bits().tolist() + [0]
    runs, start = [], None
    for k, b in enumerate(bits, start=1):
        if b and start is None:
            start = k
        if not b and start is not None:
            runs.append((start, k - 1))
            start = None
    return runs


def occ_bits(pair):
    bits = np.zeros(pair.occ.m, dtype=int)
    bits[pair.occ.positions() - 1] = 1
    return bits.tolist()


def test_running_example_pairs():
    enc = build(RUNNING, HALF)
    got = {(p.level, tuple(cover_runs(p)), tuple(occ_bits(p))) for p in enc.pairs}
    assert got == {
        (0, ((1, 1), (3, 3), (5, 7)), (1, 1, 0, 1, 1)),
        (1, ((1, 6),), (0, 1, 0, 1, 1, 0)),
    }
    assert isinstance(enc.levels[0][0].cover, SparseRunBitvec)


def test_running_example_queries():
    enc = build(RUNNING, HALF)
    ans = enc.query(5, 7, HALF)
    assert len(ans.hits) == 1
    hit = ans.hits[0]
    assert ans.report(hit, 1) == 6 and ans.report(hit, 2) == 7 and hit.count == 2
    with pytest.raises(IndexError):
        ans.report(hit, 3)
    assert enc.query(1, 7, HALF).hits == []
    assert answer_as_dict(RUNNING, enc.query(2, 5)) == {3: [2, 4, 5]}


def test_all_equal_array():
    enc = build([7, 7, 7, 7], HALF)
    assert len(enc.pairs) == 1
    p = enc.pairs[0]
    assert cover_runs(p) == [(1, 4)] and occ_bits(p) == [1, 1, 1, 1]


def test_singletons_always_answer():
    A = np.random.default_rng(0).integers(0, 9, 120)
    enc = build(A, Fraction(1, 5))
    for i in range(1, 121):
        for tp in (Fraction(1, 5), Fraction(1, 2), Fraction(9, 10)):
            ans = enc.query(i, i, tp)
            assert ans.positions() == [i]


@pytest.mark.parametrize("tau", [Fraction(1, 2), Fraction(1, 3), Fraction(2, 7), Fraction(1, 8)])
def test_exhaustive_against_oracle(tau):
    rng = np.random.default_rng(tau.denominator)
    for sigma in (2, 4, 30):
        A = rng.integers(0, sigma, 60).tolist()
        enc = build(A, tau)
        for i in range(1, 61):
            for j in range(i, 61):
                for tp in (tau, (1 + tau) / 2):
                    ans = enc.query(i, j, tp)
                    got = answer_as_dict(A, ans)
                    assert got == oracle_query(A, i, j, tp)
                    assert len(got) == len(ans.hits)  # no value reported twice
                    assert all(h.count * tp.denominator > tp.numerator * (j - i + 1) for h in ans.hits)
                    assert ans.probes == len(enc.pairs) <= pair_bound(60, tau)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=80), st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(3, 7)]))
def test_property_against_oracle(A, tau):
    enc = build(A, tau)
    n = len(A)
    for i in range(1, n + 1, max(1, n // 9)):
        for j in range(i, n + 1, max(1, n // 11)):
            assert answer_as_dict(A, enc.query(i, j, tau)) == oracle_query(A, i, j, tau)


def test_batch_equals_scalar():
    A = np.random.default_rng(2).integers(0, 6, 400)
    enc = build(A, Fraction(1, 4))
    rng = np.random.default_rng(3)
    I = rng.integers(1, 401, 500)
    J = np.minimum(I + rng.integers(0, 80, 500), 400)
    batch = enc.query_many(I, J, Fraction(1, 3)).per_range(len(I))
    for k in range(len(I)):
        ans = enc.query(int(I[k]), int(J[k]), Fraction(1, 3))
        assert sorted(batch[k]) == sorted((ans.report(h), h.count) for h in ans.hits)


def test_occurrence_reporting_matches_oracle():
    A = np.random.default_rng(4).integers(0, 3, 300).tolist()
    enc = build(A, Fraction(1, 3))
    rng = np.random.default_rng(5)
    for _ in range(300):
        i, j = sorted(rng.integers(1, 301, 2).tolist())
        ans = enc.query(i, j)
        for h in ans.hits:
            positions = [ans.report(h, t) for t in range(1, h.count + 1)]
            assert positions == ans.occurrences(h) == oracle_query(A, i, j, enc.tau)[A[positions[0] - 1]]


def test_errors():
    enc = build(RUNNING, Fraction(1, 3))
    for i, j in ((0, 3), (3, 8), (5, 4)):
        with pytest.raises(RangeError):
            enc.query(i, j)
    with pytest.raises(ThresholdTooLow):
        enc.query(1, 3, Fraction(1, 4))
    with pytest.raises(InvalidThreshold):
        enc.query(1, 3, Fraction(1, 1))
    with pytest.raises(InvalidThreshold):
        build(RUNNING, 0.5)
    with pytest.raises(InvalidThreshold):
        build(RUNNING, "3/2")


def test_empty_array():
    enc = build([], HALF)
    assert enc.n == 0 and enc.pairs == []
    with pytest.raises(RangeError):
        enc.query(1, 1)


def test_pair_invariants():
    rng = np.random.default_rng(6)
    for tau in (Fraction(1, 2), Fraction(1, 8), Fraction(1, 17)):
        A = rng.integers(0, 12, 1500)
        enc = build(A, tau)
        assert sum(p.occ.n for p in enc.pairs) == 1500
        for p in enc.pairs:
            assert p.occ.m == p.cover.ones
        assert len(enc.pairs) <= pair_bound(1500, tau)


def test_space_constant_grid():
    # one constant C must bound bits / (n (lg(1/tau) + 1)) across sizes and thresholds
    rng = np.random.default_rng(8)
    ratios = []
    for e in (10, 12, 14, 17):
        for inv in (2, 8, 64):
            n = 1 << e
            enc = build(rng.integers(0, inv, n), Fraction(1, inv))
            ratios.append(enc.size_in_bits() / (n * (math.log2(inv) + 1)))
    # small n at tau=1/64 is dominated by fixed per-pair section headers
    assert max(ratios) <= 32


def test_stats_report():
    st_ = build(RUNNING, HALF).stats()
    assert st_["pairs"] == 2 and st_["occ_ones"] == 7 and st_["cover_ones"] == 11
    assert set(st_["levels"]) == {0, 1}
    assert st_["total_bits"] == st_["bits_per_element"] * 7
