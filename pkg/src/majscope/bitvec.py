"""Plain and Elias-Fano bitvectors with 1-based rank/select.

Conventions shared by every structure in the package: positions are
1-based, ``rank(i)`` counts set bits in ``[1, i]`` (so ``rank(0) == 0``) and
``select(j)`` returns the position of the j-th set bit.  Each class has a
scalar method and a ``*_many`` twin that takes numpy arrays.
"""

from __future__ import annotations

from bisect import bisect_left

import numpy as np

from ._bits import (
    FormatError,
    Reader,
    Writer,
    bits_to_words,
    pack_ints,
    popcount,
    positions_to_words,
    select_in_word,
    select_in_words,
    smallest_uint,
    unpack_ints,
    words_to_bits,
)

_SB_WORDS = 8  # 512-bit superblocks over 64-bit blocks


class PlainBitvec:
    """Uncompressed bitvector with a two-level rank directory.

    Select and select0 binary-search the superblock counts and then scan at
    most eight block counters, so both stay logarithmic in the superblock
    count with no extra directory.
    """

    MAGIC = b"PBV1"

    def __init__(self, bits=()):
        words, m = bits_to_words(bits)
        self._setup(words, m)

    @classmethod
    def from_words(cls, words: np.ndarray, m: int) -> "PlainBitvec":
        obj = cls.__new__(cls)
        obj._setup(np.asarray(words, dtype=np.uint64), m)
        return obj

    @classmethod
    def from_positions(cls, positions, m: int) -> "PlainBitvec":
        """Bitvector of length m with 1s at the given 1-based positions."""
        pos = np.asarray(positions, dtype=np.int64)
        if len(pos) and (pos.min() < 1 or pos.max() > m):
            raise ValueError("position outside [1, m]")
        return cls.from_words(positions_to_words(pos - 1, m), m)

    def _setup(self, words: np.ndarray, m: int):
        nw = (m + 63) // 64
        if len(words) < nw:
            raise ValueError("word array shorter than bit length")
        padded = np.zeros(nw + 1, dtype=np.uint64)
        padded[:nw] = words[:nw]
        if m % 64:
            padded[nw - 1] &= np.uint64((1 << (m % 64)) - 1)
        self.m = m
        self._words = padded
        cum = np.zeros(len(padded) + 1, dtype=np.int64)
        np.cumsum(popcount(padded), out=cum[1:])
        self.ones = int(cum[nw])
        self._sb = cum[: len(padded) : _SB_WORDS].copy()
        sb_of_word = np.repeat(self._sb, _SB_WORDS)[: len(padded)]
        self._blk = (cum[: len(padded)] - sb_of_word).astype(np.uint16)
        # zero counts, used by select0
        starts = np.arange(0, len(padded), _SB_WORDS, dtype=np.int64) * 64
        self._sb0 = starts - self._sb
        local = (np.arange(len(padded), dtype=np.int64) % _SB_WORDS) * 64
        self._blk0 = (local - self._blk).astype(np.uint16)
        pad = (-len(padded)) % _SB_WORDS
        big = np.full(pad, np.iinfo(np.uint16).max, dtype=np.uint16)
        self._blk8 = np.concatenate([self._blk, big]).reshape(-1, _SB_WORDS)
        self._blk08 = np.concatenate([self._blk0, big]).reshape(-1, _SB_WORDS)
        self._lists = None

    def _py(self):
        # Python-list mirrors of the directories; scalar calls avoid numpy scalar overhead
        if self._lists is None:
            self._lists = (
                self._sb.tolist(),
                self._blk.tolist(),
                self._words.tolist(),
                self._sb0.tolist(),
                self._blk0.tolist(),
            )
        return self._lists

    def __len__(self) -> int:
        return self.m

    @property
    def zeros(self) -> int:
        return self.m - self.ones

    def __getitem__(self, i: int) -> int:
        """Bit at 1-based position i."""
        if not 1 <= i <= self.m:
            raise IndexError(i)
        p = i - 1
        return self._py()[2][p >> 6] >> (p & 63) & 1

    def bits(self) -> np.ndarray:
        return words_to_bits(self._words, self.m)

    def rank(self, i: int) -> int:
        if not 0 <= i <= self.m:
            raise IndexError(f"rank position {i} outside [0, {self.m}]")
        sb, blk, words, _, _ = self._py()
        w = i >> 6
        r = sb[w >> 3] + blk[w]
        off = i & 63
        if off:
            r += (words[w] & ((1 << off) - 1)).bit_count()
        return r

    def rank0(self, i: int) -> int:
        return i - self.rank(i)

    def select(self, j: int) -> int:
        if not 1 <= j <= self.ones:
            raise IndexError(f"select({j}) with {self.ones} ones")
        sb, blk, words, _, _ = self._py()
        return self._select(j, sb, blk, words, False)

    def select0(self, j: int) -> int:
        if not 1 <= j <= self.zeros:
            raise IndexError(f"select0({j}) with {self.zeros} zeros")
        _, _, words, sb0, blk0 = self._py()
        return self._select(j, sb0, blk0, words, True)

    @staticmethod
    def _select(j, sb, blk, words, invert) -> int:
        s = bisect_left(sb, j) - 1
        rel = j - sb[s]
        w = s * _SB_WORDS
        last = min(w + _SB_WORDS, len(blk))
        while w + 1 < last and blk[w + 1] < rel:
            w += 1
        word = words[w] ^ 0xFFFFFFFFFFFFFFFF if invert else words[w]
        return w * 64 + select_in_word(word, rel - blk[w]) + 1

    def rank_many(self, i) -> np.ndarray:
        i = np.asarray(i, dtype=np.int64)
        w = i >> 6
        off = (i & 63).astype(np.uint64)
        mask = (np.uint64(1) << off) - np.uint64(1)
        return self._sb[w >> 3] + self._blk[w].astype(np.int64) + popcount(self._words[w] & mask)

    def select_many(self, j) -> np.ndarray:
        j = np.asarray(j, dtype=np.int64)
        return self._select_many(j, self._sb, self._blk8, self._words)

    def select0_many(self, j) -> np.ndarray:
        j = np.asarray(j, dtype=np.int64)
        return self._select_many(j, self._sb0, self._blk08, ~self._words)

    @staticmethod
    def _select_many(j, sb, blk8, words) -> np.ndarray:
        if j.size == 0:
            return np.zeros(j.shape, dtype=np.int64)
        flat = j.ravel()
        s = np.searchsorted(sb, flat, side="left") - 1
        rel = flat - sb[s]
        rows = blk8[s]
        k = np.count_nonzero(rows < rel[:, None], axis=1) - 1
        w = s * _SB_WORDS + k
        inword = rel - rows[np.arange(len(k)), k].astype(np.int64)
        out = w * 64 + select_in_words(words[w], inword) + 1
        return out.reshape(j.shape)

    def size_in_bits(self) -> int:
        return self.m

    def write(self, out: Writer):
        out.magic(self.MAGIC)
        out.u64(self.m)
        nbytes = (self.m + 7) // 8
        out.buf += self._words.astype("<u8").tobytes()[:nbytes]

    @classmethod
    def read(cls, inp: Reader) -> "PlainBitvec":
        inp.expect(cls.MAGIC)
        m = inp.u64()
        if m > 8 * (inp.end - inp.pos):
            raise FormatError("plain bitvector length exceeds stream")
        raw = bytes(inp._take((m + 7) // 8))
        buf = np.zeros(((m + 63) // 64) * 8, dtype=np.uint8)
        buf[: len(raw)] = np.frombuffer(raw, dtype=np.uint8)
        return cls.from_words(buf.view("<u8").astype(np.uint64), m)

    def __repr__(self):
        return f"PlainBitvec(m={self.m}, ones={self.ones})"


def plain_build(bits) -> PlainBitvec:
    return PlainBitvec(bits)


def _ceil_lg(x: int) -> int:
    """Smallest b with 2**b >= x, for x >= 1."""
    return (x - 1).bit_length()


class SparseBitvec:
    """Elias-Fano bitvector over [1, m].

    Each set position p is split as ``p - 1 = high * 2**b + low``; the lows go
    to a b-bit array and the highs are written in unary into a plain
    bitvector ``H``.  select is a single select on ``H``; rank locates the
    high bucket with two select0 calls and binary-searches the lows inside it.
    """

    MAGIC = b"EFV1"

    def __init__(self, m: int, positions=()):
        pos = np.asarray(positions, dtype=np.int64).ravel()
        if m < 0:
            raise ValueError("universe size must be non-negative")
        if len(pos):
            if pos[0] < 1 or pos[-1] > m:
                raise ValueError("positions must lie in [1, m]")
            if len(pos) > 1 and np.any(np.diff(pos) <= 0):
                raise ValueError("positions must be strictly increasing")
        self.m = m
        self.n = len(pos)
        self.b = max(1, _ceil_lg(-(-m // self.n))) if self.n else 1
        x = pos - 1
        self.low = (x & ((1 << self.b) - 1)).astype(smallest_uint((1 << self.b) - 1))
        hi = x >> self.b
        buckets = -(-m // (1 << self.b))
        self.high = PlainBitvec.from_positions(np.arange(self.n) + hi + 1, self.n + buckets)

    @classmethod
    def from_bits(cls, bits) -> "SparseBitvec":
        arr = np.asarray(bits, dtype=np.int64).ravel()
        return cls(len(arr), np.flatnonzero(arr) + 1)

    @classmethod
    def _from_parts(cls, m: int, n: int, b: int, low: np.ndarray, high: PlainBitvec):
        obj = cls.__new__(cls)
        obj.m, obj.n, obj.b = m, n, b
        obj.low = low.astype(smallest_uint((1 << b) - 1))
        obj.high = high
        return obj

    def __len__(self) -> int:
        return self.m

    @property
    def ones(self) -> int:
        return self.n

    def select(self, j: int) -> int:
        if not 1 <= j <= self.n:
            raise IndexError(f"select({j}) with {self.n} ones")
        return ((self.high.select(j) - j) << self.b | self._low_list()[j - 1]) + 1

    def rank(self, i: int) -> int:
        if not 0 <= i <= self.m:
            raise IndexError(f"rank position {i} outside [0, {self.m}]")
        if self.n == 0:
            return 0
        h = i >> self.b
        lo = self.high.select0(h) - h if h else 0
        hi = self.high.select0(h + 1) - (h + 1) if h + 1 <= self.high.zeros else self.n
        target = i & ((1 << self.b) - 1)
        low = self._low_list()
        while lo < hi:
            mid = (lo + hi) >> 1
            if low[mid] < target:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def __getitem__(self, i: int) -> int:
        return self.rank(i) - self.rank(i - 1)

    def _low_list(self) -> list[int]:
        if getattr(self, "_low_l", None) is None:
            self._low_l = self.low.tolist()
        return self._low_l

    def select_many(self, j) -> np.ndarray:
        j = np.asarray(j, dtype=np.int64)
        s = self.high.select_many(j)
        return ((s - j) << self.b | self.low[j - 1].astype(np.int64)) + 1

    def rank_many(self, i) -> np.ndarray:
        i = np.asarray(i, dtype=np.int64)
        if self.n == 0:
            return np.zeros(i.shape, dtype=np.int64)
        h = i >> self.b
        zeros = self.high.zeros
        lo = np.where(h > 0, self.high.select0_many(np.maximum(h, 1)) - h, 0)
        h1 = h + 1
        inside = h1 <= zeros
        hi = np.where(inside, self.high.select0_many(np.where(inside, h1, 1)) - h1, self.n)
        target = (i & ((1 << self.b) - 1)).astype(np.int64)
        low = self.low.astype(np.int64)
        active = lo < hi
        while np.any(active):
            mid = (lo + hi) >> 1
            go_right = active & (low[np.minimum(mid, self.n - 1)] < target)
            lo = np.where(go_right, mid + 1, lo)
            hi = np.where(active & ~go_right, mid, hi)
            active = lo < hi
        return lo

    def positions(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        return self.select_many(np.arange(1, self.n + 1))

    def size_in_bits(self) -> int:
        return self.n * self.b + self.high.size_in_bits()

    def write(self, out: Writer):
        out.magic(self.MAGIC)
        out.u64(self.m)
        out.u64(self.n)
        out.u8(self.b)
        out.blob(pack_ints(self.low, self.b))
        self.high.write(out)

    @classmethod
    def read(cls, inp: Reader) -> "SparseBitvec":
        inp.expect(cls.MAGIC)
        m, n, b = inp.u64(), inp.u64(), inp.u8()
        if n > m or b > 63:
            raise FormatError("inconsistent sparse bitvector header")
        low = unpack_ints(inp.blob(), n, b)
        high = PlainBitvec.read(inp)
        if high.ones != n or high.m != n + -(-m // (1 << b)):
            raise FormatError("sparse bitvector high part does not match header")
        return cls._from_parts(m, n, b, low, high)

    def __repr__(self):
        return f"SparseBitvec(m={self.m}, n={self.n}, b={self.b})"


def sparse_build(m: int, positions) -> SparseBitvec:
    return SparseBitvec(m, positions)
