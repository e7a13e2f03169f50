"""Brute-force range majority answers, the ground truth for differential tests."""

from __future__ import annotations

import os
from collections import defaultdict

import numpy as np

from .errors import RangeError
from .rational import as_threshold, exceeds

DEFAULT_ORACLE_CAP = 4096


def oracle_cap() -> int:
    """Largest n for quadratic sweeps; MAJSCOPE_ORACLE_CAP overrides the default."""
    raw = os.environ.get("MAJSCOPE_ORACLE_CAP")
    return int(raw) if raw else DEFAULT_ORACLE_CAP


def check_oracle_size(n: int):
    cap = oracle_cap()
    if n > cap:
        raise ValueError(f"array of length {n} exceeds the oracle cap {cap}")


def _check_range(n: int, i: int, j: int):
    if not 1 <= i <= j <= n:
        raise RangeError(f"range [{i}, {j}] outside [1, {n}]")


def oracle_query(A, i: int, j: int, tau) -> dict:
    """Map each tau-majority of A[i..j] to the sorted list of its positions there."""
    tau = as_threshold(tau)
    _check_range(len(A), i, j)
    where: dict = defaultdict(list)
    for p in range(i, j + 1):
        where[A[p - 1]].append(p)
    length = j - i + 1
    return {v: ps for v, ps in where.items() if exceeds(len(ps), length, tau)}


def oracle_count(A, i: int, j: int, tau) -> int:
    return len(oracle_query(A, i, j, tau))


def oracle_batch(A, I, J, tau) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All majorities for many ranges at once, from per-value prefix counts.

    Returns ``(range_index, leftmost_position, count)`` sorted by range index
    and then position.  Independent of ``oracle_query`` (it never scans a
    range), which makes the two useful for checking each other.
    """
    tau = as_threshold(tau)
    I = np.asarray(I, dtype=np.int64)
    J = np.asarray(J, dtype=np.int64)
    lengths = J - I + 1
    groups: dict = defaultdict(list)
    for p, v in enumerate(A, start=1):
        groups[v].append(p)
    out_r, out_p, out_c = [], [], []
    for plist in groups.values():
        P = np.asarray(plist, dtype=np.int64)
        first = np.searchsorted(P, I, side="left")
        count = np.searchsorted(P, J, side="right") - first
        ok = np.flatnonzero(exceeds(count, lengths, tau))
        if len(ok):
            out_r.append(ok)
            out_p.append(P[first[ok]])
            out_c.append(count[ok])
    if not out_r:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    r, p, c = (np.concatenate(x) for x in (out_r, out_p, out_c))
    order = np.lexsort((p, r))
    return r[order], p[order], c[order]
