"""Cover bitmaps whose 1s come in runs.

``RunBitvec`` is the chunked layout for runs of length at least b: every
chunk of b bits is empty, full, or "mixed" with one leading block of 1s and
one trailing block of 1s.  ``SparseRunBitvec`` handles level-0 bitmaps,
whose runs may be shorter than any useful chunk size.
"""

from __future__ import annotations

import numpy as np

from ._bits import Reader, Writer
from .bitvec import PlainBitvec, SparseBitvec
from .errors import FormatError


def _runs_array(runs) -> np.ndarray:
    arr = np.asarray([tuple(r[:2]) for r in runs], dtype=np.int64).reshape(-1, 2)
    if len(arr):
        if np.any(arr[:, 1] < arr[:, 0]):
            raise ValueError("run with hi < lo")
        if np.any(arr[1:, 0] <= arr[:-1, 1] + 1):
            raise ValueError("runs must be sorted and separated by at least one 0")
    return arr


def _prefix_marks(values: np.ndarray) -> SparseBitvec:
    """Bitvector with a 1 at r + sum(values[:r]) for every r, so prefix sums are select(r) - r."""
    values = np.asarray(values, dtype=np.int64)
    marks = np.arange(1, len(values) + 1) + np.cumsum(values)
    return SparseBitvec(int(marks[-1]) if len(marks) else 0, marks)


def _prefix_sum(marks: SparseBitvec, r: int) -> int:
    return marks.select(r) - r if r else 0


def _prefix_sum_many(marks: SparseBitvec, r: np.ndarray) -> np.ndarray:
    safe = np.maximum(r, 1)
    return np.where(r > 0, marks.select_many(safe) - safe, 0) if marks.n else np.zeros_like(r)


class _CoverMixin:
    n: int

    def rank(self, i: int) -> int:  # pragma: no cover - overridden
        raise NotImplementedError

    def rank_many(self, i) -> np.ndarray:  # pragma: no cover - overridden
        raise NotImplementedError

    def covered(self, i: int, j: int) -> bool:
        """True iff every position of [i, j] is a 1."""
        return self.rank(j) - self.rank(i - 1) == j - i + 1

    def covered_many(self, i, j) -> np.ndarray:
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        return self.rank_many(j) - self.rank_many(i - 1) == j - i + 1

    def bits(self) -> np.ndarray:
        return np.diff(self.rank_many(np.arange(self.n + 1))).astype(np.uint8)


class RunBitvec(_CoverMixin):
    """Chunked cover bitmap.

    Stored parts: ``full`` marks all-1 chunks, ``mixed`` marks chunks holding
    both values, and for the j-th mixed chunk ``p10[j]`` (length of its
    leading 1s) and ``p01[j]`` (offset of the last 0 before its trailing 1s,
    b if none) are kept as prefix-sum mark vectors.
    """

    MAGIC = b"RBV1"

    def __init__(self, runs, n: int, b: int, strict: bool = True):
        if b < 1:
            raise ValueError("chunk size must be positive")
        arr = _runs_array(runs)
        if len(arr) and (arr[0, 0] < 1 or arr[-1, 1] > n):
            raise ValueError("run outside [1, n]")
        if strict and len(arr) and np.any(arr[:, 1] - arr[:, 0] + 1 < b):
            raise ValueError(f"run shorter than chunk size {b}")
        nchunks = -(-n // b)
        bits = np.zeros(nchunks * b, dtype=np.int8)
        for lo, hi in arr:
            bits[lo - 1 : hi] = 1
        chunks = bits.reshape(nchunks, b)
        ones = chunks.sum(axis=1)
        full = ones == b
        mixed = (ones > 0) & ~full
        mc = chunks[mixed]
        lead = np.where(mc[:, 0] == 1, np.argmin(mc, axis=1), 0)
        trail = np.where(mc[:, -1] == 1, np.argmin(mc[:, ::-1], axis=1), 0)
        p10, p01 = lead, b - trail
        if np.any(p10 + (b - p01) != ones[mixed]) or np.any(p10 >= p01):
            raise ValueError("a chunk holds a run that neither starts nor ends at its border")
        self.n, self.b = n, b
        self.full = PlainBitvec(full.astype(np.uint8))
        self.mixed = PlainBitvec(mixed.astype(np.uint8))
        self.s10 = _prefix_marks(p10)
        self.s01 = _prefix_marks(p01)
        self.ones = int(ones.sum())

    @classmethod
    def _from_parts(cls, n, b, full, mixed, s10, s01):
        obj = cls.__new__(cls)
        obj.n, obj.b, obj.full, obj.mixed, obj.s10, obj.s01 = n, b, full, mixed, s10, s01
        obj.ones = obj.rank(n)
        return obj

    @property
    def p10(self) -> np.ndarray:
        return np.diff(np.concatenate([[0], self.s10.positions() - np.arange(1, self.s10.n + 1)]))

    @property
    def p01(self) -> np.ndarray:
        return np.diff(np.concatenate([[0], self.s01.positions() - np.arange(1, self.s01.n + 1)]))

    def rank(self, i: int) -> int:
        if not 0 <= i <= self.n:
            raise IndexError(f"rank position {i} outside [0, {self.n}]")
        b = self.b
        c, k = divmod(i, b)
        r1 = self.full.rank(c)
        r2 = self.mixed.rank(c)
        s10, s01 = _prefix_sum(self.s10, r2), _prefix_sum(self.s01, r2)
        total = b * r1 + s10 + b * r2 - s01
        if k:
            if self.mixed[c + 1]:
                p10 = _prefix_sum(self.s10, r2 + 1) - s10
                p01 = _prefix_sum(self.s01, r2 + 1) - s01
                if k <= p10:
                    total += k
                elif k <= p01:
                    total += p10
                else:
                    total += p10 + k - p01
            elif self.full[c + 1]:
                total += k
        return total

    def rank_many(self, i) -> np.ndarray:
        i = np.asarray(i, dtype=np.int64)
        b = self.b
        c, k = np.divmod(i, b)
        r1 = self.full.rank_many(c)
        r2 = self.mixed.rank_many(c)
        s10 = _prefix_sum_many(self.s10, r2)
        s01 = _prefix_sum_many(self.s01, r2)
        total = b * r1 + s10 + b * r2 - s01
        nxt = np.minimum(c + 1, max(len(self.mixed), 1))
        has_k = k > 0
        if len(self.mixed):
            is_mixed = has_k & ((self.mixed.rank_many(nxt) - r2) > 0)
            is_full = has_k & ((self.full.rank_many(nxt) - r1) > 0)
        else:
            is_mixed = is_full = np.zeros(i.shape, dtype=bool)
        p10 = _prefix_sum_many(self.s10, np.where(is_mixed, r2 + 1, 0)) - np.where(is_mixed, s10, 0)
        p01 = _prefix_sum_many(self.s01, np.where(is_mixed, r2 + 1, 0)) - np.where(is_mixed, s01, 0)
        inchunk = np.where(k <= p10, k, np.where(k <= p01, p10, p10 + k - p01))
        return total + np.where(is_mixed, inchunk, 0) + np.where(is_full, k, 0)

    def size_in_bits(self) -> int:
        return sum(p.size_in_bits() for p in (self.full, self.mixed, self.s10, self.s01))

    def write(self, out: Writer):
        out.magic(self.MAGIC)
        out.u64(self.n)
        out.u64(self.b)
        for part in (self.full, self.mixed, self.s10, self.s01):
            part.write(out)

    @classmethod
    def read(cls, inp: Reader) -> "RunBitvec":
        inp.expect(cls.MAGIC)
        n, b = inp.u64(), inp.u64()
        if b < 1:
            raise FormatError("chunk size must be positive")
        full, mixed = PlainBitvec.read(inp), PlainBitvec.read(inp)
        s10, s01 = SparseBitvec.read(inp), SparseBitvec.read(inp)
        nchunks = -(-n // b)
        if len(full) != nchunks or len(mixed) != nchunks or s10.n != mixed.ones or s01.n != mixed.ones:
            raise FormatError("run bitvector parts disagree with header")
        return cls._from_parts(n, b, full, mixed, s10, s01)

    def __repr__(self):
        return f"RunBitvec(n={self.n}, b={self.b}, ones={self.ones})"


class SparseRunBitvec(_CoverMixin):
    """Runs stored as a start-position set plus prefix sums of run lengths.

    Rank finds the run through a rank on the starts, so it costs a binary
    search instead of constant time.
    """

    MAGIC = b"SRB1"

    def __init__(self, runs, n: int):
        arr = _runs_array(runs)
        if len(arr) and (arr[0, 0] < 1 or arr[-1, 1] > n):
            raise ValueError("run outside [1, n]")
        self.n = n
        self.starts = SparseBitvec(n, arr[:, 0])
        lengths = arr[:, 1] - arr[:, 0] + 1
        cum = np.cumsum(lengths)
        self.cum = SparseBitvec(int(cum[-1]) if len(cum) else 0, cum)
        self.ones = self.cum.m

    @classmethod
    def _from_parts(cls, n, starts, cum):
        obj = cls.__new__(cls)
        obj.n, obj.starts, obj.cum, obj.ones = n, starts, cum, cum.m
        return obj

    def runs(self) -> list[tuple[int, int]]:
        lo = self.starts.positions()
        cum = self.cum.positions()
        lengths = np.diff(np.concatenate([[0], cum]))
        return [(int(a), int(a + ln - 1)) for a, ln in zip(lo, lengths)]

    def rank(self, i: int) -> int:
        if not 0 <= i <= self.n:
            raise IndexError(f"rank position {i} outside [0, {self.n}]")
        t = self.starts.rank(i)
        if t == 0:
            return 0
        start = self.starts.select(t)
        before = self.cum.select(t - 1) if t > 1 else 0
        length = self.cum.select(t) - before
        return before + min(i - start + 1, length)

    def rank_many(self, i) -> np.ndarray:
        i = np.asarray(i, dtype=np.int64)
        if self.starts.n == 0:
            return np.zeros(i.shape, dtype=np.int64)
        t = self.starts.rank_many(i)
        safe = np.maximum(t, 1)
        start = self.starts.select_many(safe)
        end_cum = self.cum.select_many(safe)
        before = np.where(safe > 1, self.cum.select_many(np.maximum(safe - 1, 1)), 0)
        val = before + np.minimum(i - start + 1, end_cum - before)
        return np.where(t > 0, val, 0)

    def size_in_bits(self) -> int:
        return self.starts.size_in_bits() + self.cum.size_in_bits()

    def write(self, out: Writer):
        out.magic(self.MAGIC)
        out.u64(self.n)
        self.starts.write(out)
        self.cum.write(out)

    @classmethod
    def read(cls, inp: Reader) -> "SparseRunBitvec":
        inp.expect(cls.MAGIC)
        n = inp.u64()
        starts, cum = SparseBitvec.read(inp), SparseBitvec.read(inp)
        if starts.m != n or starts.n != cum.n:
            raise FormatError("sparse run parts disagree with header")
        return cls._from_parts(n, starts, cum)

    def __repr__(self):
        return f"SparseRunBitvec(n={self.n}, runs={self.starts.n}, ones={self.ones})"


def run_build(runs, n: int, b: int, strict: bool = True) -> RunBitvec:
    return RunBitvec(runs, n, b, strict)


def read_cover(inp: Reader):
    tag = inp.peek(4)
    if tag == RunBitvec.MAGIC:
        return RunBitvec.read(inp)
    if tag == SparseRunBitvec.MAGIC:
        return SparseRunBitvec.read(inp)
    raise FormatError(f"unknown cover bitmap tag {tag!r}")
