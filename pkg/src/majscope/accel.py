"""Piece index: fewer probes per query.

The plain query probes every coalesced pair.  Here [1, n] is cut, for each
level l, into pieces of length 2**l twice: an aligned tiling and a tiling
shifted by 2**(l-1).  Any range of length at most 2**(l-1) fits inside one
piece of one tiling.  Each piece keeps the ids of the pairs hosting more than
(tau/4) * 2**l of its positions; only those can certify a tau-majority for a
range of length above 2**(l-2) inside the piece, and there are fewer than
4/tau of them.

Ranges too short for the smallest piece level instead look up, for each of
their (few) positions, the pair hosting that position's segment.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ._bits import FormatError, Reader, Writer, pack_ints, unpack_ints
from .rational import ceil_lg_inverse

VARINT = 0
GAMMA = 1


def _ceil_lg(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


def query_level(length: int) -> int:
    """Piece level serving a range of this length: ceil(lg length) + 1."""
    return _ceil_lg(length) + 1


class _Tiling:
    """CSR id lists for one tiling of one level."""

    __slots__ = ("offsets", "ids")

    def __init__(self, offsets: np.ndarray, ids: np.ndarray):
        self.offsets = offsets
        self.ids = ids

    def __len__(self):
        return len(self.offsets) - 1

    def get(self, piece: int) -> np.ndarray:
        return self.ids[self.offsets[piece] : self.offsets[piece + 1]]

    def sizes(self) -> np.ndarray:
        return np.diff(self.offsets)


def _count_pieces(pos_id: np.ndarray, piece: np.ndarray, npieces: int, npairs: int, level: int, tau) -> _Tiling:
    # one counting pass: how many positions of each piece each pair hosts
    key = piece * npairs + pos_id
    keys, counts = np.unique(key, return_counts=True)
    keep = counts * 4 * tau.denominator > tau.numerator << level
    keys = keys[keep]
    p, ids = np.divmod(keys, npairs)
    offsets = np.zeros(npieces + 1, dtype=np.int64)
    np.cumsum(np.bincount(p, minlength=npieces), out=offsets[1:])
    return _Tiling(offsets, ids.astype(np.int64))


class PieceIndex:
    def __init__(self, n: int, tau: Fraction, npairs: int, pos_id: np.ndarray, first_level: int, tilings: dict):
        self.n = n
        self.tau = tau
        self.npairs = npairs
        self.pos_id = pos_id
        self.first_level = first_level
        self.tilings = tilings  # level -> (aligned, shifted)
        self._pos_list = None

    @property
    def levels(self) -> list[int]:
        return sorted(self.tilings)

    def pieces(self, level: int, shifted: bool) -> list[tuple[int, int]]:
        """1-based bounds of every piece of a tiling, clipped to [1, n]."""
        size, half = 1 << level, 1 << (level - 1)
        t = self.tilings[level][int(shifted)]
        out = []
        for k in range(len(t)):
            lo = k * size + 1 - (half if shifted else 0)
            out.append((max(lo, 1), min(lo + size - 1, self.n)))
        return out

    def max_list_size(self) -> int:
        sizes = [t.sizes().max() for pair in self.tilings.values() for t in pair if len(t)]
        return int(max(sizes, default=0))

    def candidates(self, i: int, j: int) -> tuple[str, np.ndarray]:
        """Pair ids to probe for [i, j] and which path produced them."""
        level = query_level(j - i + 1)
        if level < self.first_level or level not in self.tilings:
            if self._pos_list is None:
                self._pos_list = self.pos_id.tolist()
            return "short", sorted(set(self._pos_list[i - 1 : j]))
        aligned, shifted = self.tilings[level]
        k = (i - 1) >> level
        if (j - 1) >> level == k:
            return "aligned", aligned.get(k)
        half = 1 << (level - 1)
        s = (i - 1 + half) >> level
        return "shifted", shifted.get(s)

    def candidate_matrix(self, I: np.ndarray, J: np.ndarray) -> np.ndarray:
        """Boolean (ranges x pairs) matrix of the pairs each range would probe."""
        I = np.asarray(I, dtype=np.int64)
        J = np.asarray(J, dtype=np.int64)
        L = J - I + 1
        mat = np.zeros((len(I), self.npairs), dtype=bool)
        lv = np.array([query_level(int(x)) for x in L], dtype=np.int64) if len(L) else np.zeros(0, np.int64)
        short = (lv < self.first_level) | ~np.isin(lv, self.levels)
        rs = np.flatnonzero(short)
        if len(rs):
            for d in range(int(L[rs].max())):
                rs = rs[L[rs] > d]
                mat[rs, self.pos_id[I[rs] - 1 + d]] = True
        for level in np.unique(lv[~short]).tolist():
            rows = np.flatnonzero((lv == level) & ~short)
            aligned, shifted = self.tilings[level]
            k = (I[rows] - 1) >> level
            use_aligned = (J[rows] - 1) >> level == k
            half = 1 << (level - 1)
            for t, mask, piece in (
                (aligned, use_aligned, k),
                (shifted, ~use_aligned, (I[rows] - 1 + half) >> level),
            ):
                r, p = rows[mask], piece[mask]
                start = t.offsets[p]
                size = t.offsets[p + 1] - start
                rr = np.repeat(r, size)
                within = np.arange(len(rr)) - np.repeat(np.cumsum(size) - size, size)
                mat[rr, t.ids[np.repeat(start, size) + within]] = True
        return mat

    # -- space and serialization ------------------------------------------

    def _streams(self):
        for level in self.levels:
            for t in self.tilings[level]:
                yield level, t

    def size_in_bits(self, coding: int = GAMMA) -> int:
        """Bits for the id lists plus the packed per-position ids."""
        width = _ceil_lg(max(self.npairs, 1))
        total = self.n * width
        for _, t in self._streams():
            sizes = t.sizes()
            if coding == GAMMA:
                total += int(_gamma_len(sizes + 1).sum())
                for piece in range(len(t)):
                    total += int(_gamma_len(_deltas(t.get(piece)) + 1).sum())
            else:
                total += int(_varint_len(sizes).sum()) * 8
                for piece in range(len(t)):
                    total += int(_varint_len(_deltas(t.get(piece))).sum()) * 8
        return total

    def write(self, out: Writer, coding: int = VARINT):
        out.magic(b"PIX1")
        out.u8(coding)
        out.u64(self.n)
        out.u32(self.npairs)
        out.u16(self.first_level)
        out.u16(len(self.tilings))
        width = _ceil_lg(max(self.npairs, 1))
        out.blob(pack_ints(self.pos_id, width))
        for level, t in self._streams():
            out.u16(level)
            out.u64(len(t))
            values = []
            for piece in range(len(t)):
                ids = t.get(piece)
                values.append(len(ids))
                values.extend(_deltas(ids).tolist())
            if coding == GAMMA:
                out.blob(gamma_encode(np.asarray(values, dtype=np.int64) + 1))
            else:
                w = Writer()
                for v in values:
                    w.varint(v)
                out.blob(w.getvalue())

    @classmethod
    def read(cls, inp: Reader, enc=None) -> "PieceIndex":
        inp.expect(b"PIX1")
        coding = inp.u8()
        if coding not in (VARINT, GAMMA):
            raise FormatError(f"unknown id-list coding {coding}")
        n, npairs, first_level, nlevels = inp.u64(), inp.u32(), inp.u16(), inp.u16()
        if enc is not None and (n != enc.n or npairs != len(enc.pairs)):
            raise FormatError("piece index does not match its encoding")
        width = _ceil_lg(max(npairs, 1))
        pos_id = unpack_ints(inp.blob(), n, width).astype(np.int64)
        if n and pos_id.max() >= max(npairs, 1):
            raise FormatError("position id out of range")
        tilings: dict = {}
        for _ in range(2 * nlevels):
            level = inp.u16()
            npieces = inp.u64()
            if npieces > n + 2:
                raise FormatError("too many pieces")
            payload = inp.blob()
            tilings.setdefault(level, []).append(_decode_lists(payload, npieces, npairs, coding))
        if any(len(v) != 2 for v in tilings.values()):
            raise FormatError("each piece level needs two tilings")
        tau = enc.tau if enc is not None else None
        return cls(n, tau, npairs, pos_id, first_level, {k: tuple(v) for k, v in tilings.items()})


def _decode_lists(payload: bytes, npieces: int, npairs: int, coding: int) -> _Tiling:
    if coding == GAMMA:
        values = (gamma_decode(payload) - 1).tolist()
    else:
        r = Reader(payload)
        values = []
        while not r.at_end():
            values.append(r.varint())
    offsets = np.zeros(npieces + 1, dtype=np.int64)
    ids: list[int] = []
    pos = 0
    for piece in range(npieces):
        if pos >= len(values):
            raise FormatError("id lists truncated")
        size = values[pos]
        chunk = values[pos + 1 : pos + 1 + size]
        if len(chunk) != size:
            raise FormatError("id lists truncated")
        pos += 1 + size
        ids.extend(np.cumsum(chunk).tolist() if size else [])
        offsets[piece + 1] = len(ids)
    if pos != len(values) and coding == VARINT:
        raise FormatError("trailing id-list data")
    arr = np.asarray(ids, dtype=np.int64)
    if len(arr) and (arr.min() < 0 or arr.max() >= npairs):
        raise FormatError("pair id out of range")
    return _Tiling(offsets, arr)


def _deltas(ids: np.ndarray) -> np.ndarray:
    return np.diff(np.asarray(ids, dtype=np.int64), prepend=0)


def _varint_len(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=np.int64)
    bits = np.maximum(np.ceil(np.log2(v + 1)), 1)
    return np.ceil(bits / 7).astype(np.int64)


def _gamma_len(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=np.int64)
    return 2 * np.floor(np.log2(v)).astype(np.int64) + 1


def gamma_encode(values) -> bytes:
    """Elias gamma codes of positive ints, concatenated MSB first, zero padded to a byte."""
    bits: list[int] = []
    for v in np.asarray(values, dtype=np.int64).tolist():
        if v < 1:
            raise ValueError("gamma codes need positive integers")
        nb = v.bit_length()
        bits.extend([0] * (nb - 1))
        bits.extend((v >> s) & 1 for s in range(nb - 1, -1, -1))
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes() if bits else b""


def gamma_decode(data: bytes) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8)).tolist()
    out = []
    pos, total = 0, len(bits)
    while pos < total:
        zeros = 0
        while pos < total and bits[pos] == 0:
            zeros += 1
            pos += 1
        if pos == total:
            break  # padding
        if pos + zeros + 1 > total:
            raise FormatError("gamma stream truncated")
        v = 0
        for b in bits[pos : pos + zeros + 1]:
            v = v << 1 | b
        pos += zeros + 1
        out.append(v)
    return np.asarray(out, dtype=np.int64)


def accel_build(enc, layout=None) -> PieceIndex:
    """Counting pass per level and tiling over the per-position pair ids."""
    layout = layout if layout is not None else enc.layout
    n, tau, npairs = enc.n, enc.tau, len(enc.pairs)
    if layout is not None and len(layout.seg_of_position) == n:
        pos_id = np.asarray(layout.seg_of_position, dtype=np.int64)
    else:
        pos_id = derive_pos_id(enc)
    first = max(1, ceil_lg_inverse(tau))
    top = _ceil_lg(max(n, 1)) + 1
    k = np.arange(n, dtype=np.int64)
    tilings = {}
    for level in range(first, top + 1):
        half = 1 << (level - 1)
        aligned_piece = k >> level
        shifted_piece = (k + half) >> level
        na = ((n - 1) >> level) + 1 if n else 0
        ns = ((n - 1 + half) >> level) + 1 if n else 0
        tilings[level] = (
            _count_pieces(pos_id, aligned_piece, na, max(npairs, 1), level, tau),
            _count_pieces(pos_id, shifted_piece, ns, max(npairs, 1), level, tau),
        )
    return PieceIndex(n, tau, npairs, pos_id, first, tilings)


def derive_pos_id(enc) -> np.ndarray:
    """Per-position hosting pair, recovered from the pairs alone.

    Position k belongs to the pair whose cover has a 1 at k and whose
    occurrence bitmap has a 1 at k's mapped position; exactly one pair
    qualifies because every position is an occurrence of its own symbol.
    """
    pos_id = np.full(enc.n, -1, dtype=np.int64)
    k = np.arange(1, enc.n + 1, dtype=np.int64)
    for p in enc.pairs:
        c = p.cover.rank_many(k)
        inside = c - p.cover.rank_many(k - 1) == 1
        mapped = c[inside]
        hit = p.occ.rank_many(mapped) - p.occ.rank_many(mapped - 1) == 1
        pos_id[k[inside][hit] - 1] = p.id
    return pos_id


def query_fast(enc, i: int, j: int, tau_prime=None, index: PieceIndex | None = None):
    """Same answer as ``enc.query``, probing only the candidate pairs."""
    index = index if index is not None else enc.piece_index
    if index is None:
        raise ValueError("encoding has no piece index; build with accel=True")
    tp = enc._check(i, j, enc.tau if tau_prime is None else tau_prime)
    _, ids = index.candidates(i, j)
    return enc.probe_ids(ids, i, j, tp)


def query_fast_many(enc, I, J, tau_prime=None, index: PieceIndex | None = None):
    index = index if index is not None else enc.piece_index
    if index is None:
        raise ValueError("encoding has no piece index; build with accel=True")
    return enc.query_many(I, J, tau_prime, candidates=index.candidate_matrix(I, J))
