"""Maximal majority segments per symbol.

For a symbol x, a window [i, j] is a majority window when x occurs more than
tau * (j - i + 1) times in it.  The segments of x are the maximal runs of
positions covered by at least one majority window; they are what the
coalesced bitmaps store.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple

import numpy as np

from .oracle import check_oracle_size
from .rational import as_threshold

# numpy takes over the linear scans once a subproblem is this large
_VECTOR_CUTOFF = 192


class Segment(NamedTuple):
    lo: int
    hi: int
    symbol: Any = None

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class SymbolOccurrences:
    symbol: Any
    positions: np.ndarray  # strictly increasing, 1-based

    def __len__(self):
        return len(self.positions)


def group_occurrences(A) -> list[SymbolOccurrences]:
    """Positions of every distinct value, groups ordered by first occurrence."""
    arr = A if isinstance(A, np.ndarray) else None
    if arr is not None and arr.dtype.kind in "iub" and arr.ndim == 1:
        if len(arr) == 0:
            return []
        uniq, first, inverse = np.unique(arr, return_index=True, return_inverse=True)
        order = np.argsort(inverse, kind="stable")
        counts = np.bincount(inverse, minlength=len(uniq))
        chunks = np.split(order + 1, np.cumsum(counts)[:-1])
        groups = [SymbolOccurrences(uniq[g].item(), chunks[g]) for g in range(len(uniq))]
        return [groups[g] for g in np.argsort(first, kind="stable")]
    table: dict[Any, list[int]] = {}
    for pos, value in enumerate(A, start=1):
        table.setdefault(value, []).append(pos)
    return [SymbolOccurrences(v, np.asarray(p, dtype=np.int64)) for v, p in table.items()]


def _left_end(P, a0: int, a1: int, k: int, num: int, den: int) -> tuple[int, int]:
    """Leftmost occurrence index and left end of the windows that contain P[k].

    Only occurrences P[a0:a1] are visible.  Scaled by num, the window
    [P[a], P[c]] (a <= k <= c) is a majority iff
    den*(k - a) + num*(P[a] - 1) > num*P[c] - den*(c - k + 1); the right-hand
    side is minimised once and the first index a passing the test wins.
    """
    if isinstance(P, np.ndarray):
        right = P[k:a1]
        v = int((num * right - den * np.arange(1, len(right) + 1)).min())
        left = P[a0 : k + 1]
        score = den * (k - np.arange(a0, k + 1)) + num * (left - 1)
        a = a0 + int(np.argmax(score > v))
    else:
        v = min(num * P[c] - den * (c - k + 1) for c in range(k, a1))
        a = k
        for cand in range(a0, k + 1):
            if den * (k - cand) + num * (P[cand] - 1) > v:
                a = cand
                break
    lo = (v - den * (k - a)) // num + 2
    return a, max(int(lo), 1)


def _right_end(P, a0: int, a1: int, k: int, num: int, den: int, n: int) -> tuple[int, int]:
    """Mirror image of _left_end: positions are reflected through n + 1."""
    if isinstance(P, np.ndarray):
        left = P[a0 : k + 1]
        v = int((num * (n + 1 - left) - den * (k - np.arange(a0, k + 1) + 1)).min())
        right = P[k:a1]
        score = den * np.arange(0, len(right)) + num * (n - right)
        a = a1 - 1 - int(np.argmax((score > v)[::-1]))
    else:
        v = min(num * (n + 1 - P[c]) - den * (k - c + 1) for c in range(a0, k + 1))
        a = k
        for cand in range(a1 - 1, k - 1, -1):
            if den * (cand - k) + num * (n - P[cand]) > v:
                a = cand
                break
    lo_mirror = (v - den * (a - k)) // num + 2
    return a, min(n + 1 - int(lo_mirror), n)


def _attach(segs: list[list[int]], lo: int, hi: int):
    """Append [lo, hi] to sorted disjoint segs, merging anything it touches."""
    while segs and segs[-1][1] >= lo - 1:
        plo, phi = segs.pop()
        lo, hi = min(lo, plo), max(hi, phi)
    segs.append([lo, hi])


def compute_segments(occ: SymbolOccurrences, tau, n: int) -> list[Segment]:
    """Divide and conquer over the occurrence list of one symbol.

    The union of majority windows through the middle occurrence is found in
    linear time; the occurrences strictly left and strictly right of it are
    solved recursively and the results stitched together.  Any window that
    crosses a subproblem boundary contains the middle occurrence of some
    ancestor call, so nothing is lost at the cuts.
    """
    tau = as_threshold(tau)
    num, den = tau.numerator, tau.denominator
    pos = np.asarray(occ.positions, dtype=np.int64)
    if len(pos) == 0:
        return []
    as_list = pos.tolist()
    vector_ok = max(num, den) * (n + 2) * 2 < 2**62

    def pick(a0: int, a1: int):
        return pos if vector_ok and a1 - a0 > _VECTOR_CUTOFF else as_list

    def solve(a0: int, a1: int) -> list[list[int]]:
        if a0 >= a1:
            return []
        k = (a0 + a1 - 1) // 2
        P = pick(a0, a1)
        _, lo = _left_end(P, a0, a1, k, num, den)
        _, hi = _right_end(P, a0, a1, k, num, den, n)
        # Windows that avoid P[k] but straddle the witnesses still matter, so
        # the halves are cut at k itself rather than at the witnesses.
        out = solve(a0, k)
        _attach(out, lo, hi)
        for rlo, rhi in solve(k + 1, a1):
            _attach(out, rlo, rhi)
        return out

    return [Segment(lo, hi, occ.symbol) for lo, hi in solve(0, len(pos))]


def brute_segments(A, tau, symbol) -> list[Segment]:
    """Segments of `symbol` by enumerating every window; quadratic, test use only."""
    tau = as_threshold(tau)
    arr = np.asarray(A, dtype=object) if not isinstance(A, np.ndarray) else A
    n = len(arr)
    check_oracle_size(n)
    hits = np.fromiter((a == symbol for a in arr), dtype=bool, count=n)
    W = np.concatenate([[0], np.cumsum(hits)]).astype(np.int64)
    num, den = tau.numerator, tau.denominator
    reach = np.zeros(n + 2, dtype=np.int64)  # reach[i] = furthest j of a window starting at i
    j = np.arange(1, n + 1)
    for i in range(1, n + 1):
        ok = (W[i:] - W[i - 1]) * den > num * (j[i - 1 :] - i + 1)
        if ok.any():
            reach[i] = i - 1 + int(np.flatnonzero(ok)[-1]) + 1
    out: list[list[int]] = []
    for i in range(1, n + 1):
        if reach[i]:
            if out and out[-1][1] >= i - 1:
                out[-1][1] = max(out[-1][1], int(reach[i]))
            else:
                out.append([i, int(reach[i])])
    return [Segment(lo, hi, symbol) for lo, hi in out]


def all_segments(occurrences: list[SymbolOccurrences], tau: Fraction, n: int) -> list[Segment]:
    segs: list[Segment] = []
    for occ in occurrences:
        segs.extend(compute_segments(occ, tau, n))
    return segs
