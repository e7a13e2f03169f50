"""Why majority encodings cannot be small: objects recovered from counts alone.

A sequence of m permutations of [3k] is laid out in an array of length 36km
such that counting the tau-majorities (tau = 1/(2k+2)) of well-chosen
ranges recovers every permutation.  So any structure that can count range
majorities must spend at least m lg((3k)!) bits.  A second layout stores a
bitmap B[1..m] in 4m entries, readable at any tau >= 1/4.

Decoders here get a counting callback ``counter(i, j) -> int`` and the
shape parameters, never the array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .oracle import oracle_count

Counter = Callable[[int, int], int]


class DecodeError(ValueError):
    """The counter's answers are inconsistent with any encoded permutation."""


def perm_tau(k: int) -> Fraction:
    return Fraction(1, 2 * k + 2)


@dataclass
class PermutationCode:
    k: int
    m: int
    tau: Fraction
    array: np.ndarray

    @property
    def n(self) -> int:
        return len(self.array)


def _check_perm(perm, k: int) -> list[int]:
    p = [int(x) for x in perm]
    if sorted(p) != list(range(1, 3 * k + 1)):
        raise ValueError(f"not a permutation of 1..{3 * k}: {p}")
    return p


def encode_perms(perms, k: int | None = None) -> PermutationCode:
    """Nine rows of 4k entries per permutation.

    Row r of third T reads: the values rk+1..rk+k, the sentinels -1..-2k,
    then x_{Tk+1}..x_{Tk+k}.
    """
    perms = [list(p) for p in perms]
    if not perms:
        raise ValueError("need at least one permutation")
    if k is None:
        if len(perms[0]) % 3:
            raise ValueError("permutation length must be a multiple of 3")
        k = len(perms[0]) // 3
    if k < 1:
        raise ValueError("k must be at least 1")
    sentinels = list(range(-1, -2 * k - 1, -1))
    out: list[int] = []
    for perm in perms:
        x = _check_perm(perm, k)
        for third in range(3):
            tail = x[third * k : (third + 1) * k]
            for row in range(3):
                out += list(range(row * k + 1, row * k + k + 1)) + sentinels + tail
    return PermutationCode(k, len(perms), perm_tau(k), np.asarray(out, dtype=np.int64))


@dataclass
class QueryLog:
    """Counting queries issued by a decoder, as (i, j, answer) triples."""

    entries: list[tuple[int, int, int]] = field(default_factory=list)

    def wrap(self, counter: Counter) -> Counter:
        def logged(i: int, j: int) -> int:
            c = int(counter(i, j))
            self.entries.append((i, j, c))
            return c

        return logged

    def __len__(self):
        return len(self.entries)


def decode_perms(code_or_km, counter: Counter, log: QueryLog | None = None) -> list[list[int]]:
    """Recover the permutations using only ``counter``.

    ``code_or_km`` is a PermutationCode or a ``(k, m)`` pair; only k and m
    are read from it.
    """
    if isinstance(code_or_km, PermutationCode):
        k, m = code_or_km.k, code_or_km.m
    else:
        k, m = code_or_km
    ask = log.wrap(counter) if log is not None else counter
    perms = []
    for i in range(m):
        x: list[int] = []
        for third in range(3):
            known: list[int] = []
            for g in range(1, k + 1):
                value = _find(ask, 36 * k * i + 12 * k * third, k, g, known)
                known.append(value)
            x += known
        perms.append(x)
    return perms


def _find(ask: Counter, start: int, k: int, g: int, known: list[int]) -> int:
    """Locate x_g of one third, whose rows begin after 0-based offset ``start``."""
    for row in range(3):
        o = start + 4 * k * row
        lo, hi = row * k + 1, row * k + k

        def residual(ell: int) -> int:
            # known x's inside the row's value window also appear twice; discount them
            c = ask(o + ell, o + 3 * k + g)
            return c - sum(1 for v in known if lo + ell - 1 <= v <= hi)

        r = residual(1)
        if r == 0:
            continue
        if r != 1:
            raise DecodeError(f"count {r} where 0 or 1 was expected")
        for ell in range(2, k + 1):
            r = residual(ell)
            if r == 0:
                return lo + ell - 2
            if r != 1:
                raise DecodeError(f"count {r} where 0 or 1 was expected")
        return hi
    raise DecodeError(f"x_{g} not found in any row")


def oracle_counter(array, tau) -> Counter:
    return lambda i, j: oracle_count(array, i, j, tau)


def encoding_counter(enc, tau=None) -> Counter:
    """Count majorities through a MajorityEncoding: the number of hits."""
    return lambda i, j: len(enc.query(i, j, enc.tau if tau is None else tau).hits)


def threshold_sane(k: int) -> bool:
    """Every probed range has length L = 3k+g-l+1 with tau*L >= 1 and tau*L < 2."""
    tau = perm_tau(k)
    for ell in range(1, k + 1):
        for g in range(1, k + 1):
            length = 3 * k + g - ell + 1
            if not (tau * length >= 1 and tau * length < 2):
                return False
    return True


BITMAP_TAU = Fraction(1, 4)


def encode_bitmap(bits) -> np.ndarray:
    """Each bit becomes four entries: 1,1,1,1 for a 1 and 1,2,3,4 for a 0."""
    out = []
    for b in bits:
        out += [1, 1, 1, 1] if int(b) else [1, 2, 3, 4]
    return np.asarray(out, dtype=np.int64)


def decode_bitmap(counter: Counter, length: int) -> list[int]:
    return [int(counter(4 * i + 1, 4 * i + 4) > 0) for i in range(length)]
