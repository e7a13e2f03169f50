from fractions import Fraction

import numpy as np
import pytest

from _grid import RUNNING
from majscope import RangeError, oracle_batch, oracle_count, oracle_query
from majscope.lbdemo import encode_perms
from majscope.oracle import check_oracle_size, oracle_cap

HALF = Fraction(1, 2)


def test_examples():
    assert oracle_query(RUNNING, 2, 5, HALF) == {3: [2, 4, 5]}
    assert oracle_query(RUNNING, 4, 4, HALF) == {3: [4]}
    assert oracle_query(RUNNING, 1, 7, HALF) == {}
    assert oracle_count(RUNNING, 6, 6, Fraction(9, 10)) == 1


def test_lower_bound_example_counts():
    A = encode_perms([[1, 5, 3, 9, 2, 4, 6, 8, 7]]).array.tolist()
    assert len(A) == 108
    assert oracle_count(A, 1, 10, Fraction(1, 8)) == 1
    assert oracle_count(A, 2, 10, Fraction(1, 8)) == 0


def test_range_errors():
    for i, j in ((0, 1), (2, 8), (4, 3)):
        with pytest.raises(RangeError):
            oracle_query(RUNNING, i, j, HALF)


def test_batch_agrees_with_scan():
    rng = np.random.default_rng(0)
    for tau in (Fraction(1, 2), Fraction(2, 9)):
        A = rng.integers(0, 6, 120).tolist()
        I, J = np.triu_indices(120)
        I, J = I + 1, J + 1
        r, p, c = oracle_batch(A, I, J, tau)
        rows = {}
        for k, pos, cnt in zip(r.tolist(), p.tolist(), c.tolist()):
            rows.setdefault(k, []).append((pos, cnt))
        for k in range(0, len(I), 37):
            want = sorted((ps[0], len(ps)) for ps in oracle_query(A, int(I[k]), int(J[k]), tau).values())
            assert rows.get(k, []) == want


def test_size_cap(monkeypatch):
    assert oracle_cap() == 4096
    monkeypatch.setenv("MAJSCOPE_ORACLE_CAP", "10")
    with pytest.raises(ValueError):
        check_oracle_size(11)
    check_oracle_size(10)
